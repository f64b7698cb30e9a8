use crate::bits::Bits;
use crate::par::map_trials;
use crate::schemes::{PlainScheme, SchemeError};

use super::ExperimentReport;

/// `Pr[f(x) ← Eval(ρ_f, x)]` at a fixed input, over `f ← D_F` and CP's
/// randomness.
pub fn estimate_correctness<P: PlainScheme>(
    scheme: &P,
    x: &Bits,
    trials: u64,
    seed: u64,
) -> Result<ExperimentReport, SchemeError> {
    let outcomes = map_trials(seed, trials, |_, rng| {
        let d = scheme.sample_function(rng);
        let program = scheme.generate(&d, rng)?;
        let (_, y) = scheme.run(program, x, rng)?;
        Ok(y == scheme.function_value(&d, x))
    });
    report("correctness", outcomes, seed)
}

/// Correctness averaged over `x ← D_X`.
pub fn estimate_mean_correctness<P: PlainScheme>(
    scheme: &P,
    trials: u64,
    seed: u64,
) -> Result<ExperimentReport, SchemeError> {
    estimate_reusability(scheme, 1, trials, seed).map(|mut r| {
        r.game = "mean_correctness".into();
        r
    })
}

/// Success of the `m`-th output of an `m`-fold chained evaluation on inputs
/// drawn from `D_X`.
pub fn estimate_reusability<P: PlainScheme>(
    scheme: &P,
    m: usize,
    trials: u64,
    seed: u64,
) -> Result<ExperimentReport, SchemeError> {
    assert!(m >= 1, "chain length must be at least 1");
    let outcomes = map_trials(seed, trials, |_, rng| {
        let d = scheme.sample_function(rng);
        let mut program = scheme.generate(&d, rng)?;
        let mut correct = false;
        for _ in 0..m {
            let x = scheme.sample_input(rng);
            let (next, y) = scheme.run(program, &x, rng)?;
            correct = y == scheme.function_value(&d, &x);
            program = next;
        }
        Ok(correct)
    });
    report("reusability", outcomes, seed)
}

/// Success of every step of one chain, for chain lengths `1..=m` at once.
pub fn reusability_profile<P: PlainScheme>(
    scheme: &P,
    m: usize,
    trials: u64,
    seed: u64,
) -> Result<Vec<ExperimentReport>, SchemeError> {
    let chains = map_trials(seed, trials, |_, rng| {
        let d = scheme.sample_function(rng);
        let mut program = scheme.generate(&d, rng)?;
        let mut hits = Vec::with_capacity(m);
        for _ in 0..m {
            let x = scheme.sample_input(rng);
            let (next, y) = scheme.run(program, &x, rng)?;
            hits.push(y == scheme.function_value(&d, &x));
            program = next;
        }
        Ok::<_, SchemeError>(hits)
    });
    let chains = chains.into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok((0..m)
        .map(|k| {
            let successes = chains.iter().filter(|c| c[k]).count() as u64;
            ExperimentReport::from_counts(format!("reusability_k{}", k + 1), successes, trials, seed)
        })
        .collect())
}

fn report(game: &str, outcomes: Vec<Result<bool, SchemeError>>, seed: u64) -> Result<ExperimentReport, SchemeError> {
    let outcomes = outcomes.into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok(ExperimentReport::from_outcomes(game, &outcomes, seed))
}
