use caromlab::oracle::{OnTheFlyOracle, RecordingOracle};
use caromlab::par::map_trials;
use caromlab::schemes::{cp, eval, ConjugateScheme, ConstantScheme, CopyProtectionScheme, CounterScheme, PadScheme};

/// Run CP and a few evaluations `runs` times, returning the largest number of
/// queries seen in CP and in a single evaluation.
fn max_queries<S: CopyProtectionScheme>(scheme: &S, runs: u64, evals: usize) -> (usize, usize) {
    let p = scheme.params();
    let counts = map_trials(31, runs, |_, rng| {
        let d = scheme.sample_function(rng);
        let mut rec = RecordingOracle::new(OnTheFlyOracle::new(p.oracle_in_len, p.oracle_out_len, rng.fork()));
        let mut state = cp(scheme, &d, &mut rec, rng).unwrap();
        let cp_count = rec.transcript().len();
        let (mut oracle, _) = rec.into_parts();
        let mut eval_max = 0;
        for _ in 0..evals {
            let mut rec = RecordingOracle::new(&mut oracle);
            let x = scheme.sample_input(rng);
            state = eval(scheme, state, &x, &mut rec, rng).unwrap().0;
            eval_max = eval_max.max(rec.transcript().len());
        }
        (cp_count, eval_max)
    });
    counts.into_iter().fold((0, 0), |(a, b), (c, e)| (a.max(c), b.max(e)))
}

#[test]
fn every_toy_respects_its_declared_query_bounds() {
    let runs = 10_000;
    let check = |name: &str, (cp_max, eval_max): (usize, usize), m: usize, n: usize| {
        assert!(cp_max <= m, "{name}: CP made {cp_max} > {m} queries");
        assert!(eval_max <= n, "{name}: Eval made {eval_max} > {n} queries");
    };
    let pad = PadScheme::default();
    check("pad", max_queries(&pad, runs, 3), pad.params().cp_queries, pad.params().eval_queries);
    let counter = CounterScheme::new(8, 10, 3).unwrap();
    check("counter", max_queries(&counter, runs, 3), 10, 3);
    let conj = ConjugateScheme::default();
    check("conjugate", max_queries(&conj, runs, 3), conj.params().cp_queries, 1);
    check("constant", max_queries(&ConstantScheme::default(), runs, 3), 0, 0);
}
