//! Acceptance criteria 1–9. Each test prints one PASS/FAIL line to stderr,
//! bypassing output capture, then asserts.

use std::io::{self, Write};

use caromlab::deoraclizer::{capture_trial, estimate_capture_failure, Budget, CaptureReport, DeoraclizerConfig, StopRule};
use caromlab::harness::{
    compare_lift, estimate_mean_correctness, gentle_bound_experiment, reusability_decay, wilson_interval,
    ClassicalClonePirate, ConjugateHalfSplitPirate, ConjugateMeasureClonePirate, DecaySettings, LiftComparison,
    SoloPirate, Z99,
};
use caromlab::rng::SeededRng;
use caromlab::schemes::{ConjugateScheme, ConstantScheme, CopyProtectionScheme, CounterScheme, PadScheme, RandomOracleModel};
use caromlab::CompiledScheme;

const EPSILONS: [f64; 3] = [0.05, 0.1, 0.2];

fn verdict(id: u32, title: &str, pass: bool, detail: &str) {
    let tag = if pass { "PASS" } else { "FAIL" };
    let _ = writeln!(io::stderr(), "criterion {id} {tag}: {title} ({detail})");
}

fn capture<S: CopyProtectionScheme>(scheme: &S, config: &DeoraclizerConfig, trials: u64, seed: u64) -> CaptureReport {
    estimate_capture_failure(scheme, config, trials, seed).unwrap()
}

fn capture_cells<S: CopyProtectionScheme>(name: &str, scheme: &S, budget: Budget, seed: u64) -> Vec<(String, CaptureReport)> {
    EPSILONS
        .iter()
        .map(|eps| {
            let config = DeoraclizerConfig::new(*eps).unwrap().with_budget(budget);
            (format!("{name} eps={eps}"), capture(scheme, &config, 10_000, seed))
        })
        .collect()
}

fn describe(cells: &[(String, CaptureReport)]) -> String {
    cells
        .iter()
        .map(|(name, r)| format!("{name}: {:.4}±{:.4} T={}", r.estimate, r.stderr, r.test_budget))
        .collect::<Vec<_>>()
        .join("; ")
}

#[test]
fn criterion_1_capture_bound() {
    let mut cells = capture_cells("pad", &PadScheme::default(), Budget::RandomStop, 1);
    cells.extend(capture_cells("counter", &CounterScheme::default(), Budget::RandomStop, 2));
    cells.extend(capture_cells("conjugate", &ConjugateScheme::default(), Budget::RandomStop, 3));
    cells.extend(capture_cells("constant", &ConstantScheme::default(), Budget::RandomStop, 4));
    let pass = cells.iter().all(|(_, r)| r.within_bound() && r.trials >= 10_000);
    verdict(1, "capture failure <= eps/2 + 3 stderr", pass, &describe(&cells));
    assert!(pass);
}

#[test]
fn criterion_2_exact_counter_value() {
    let scheme = CounterScheme::default();
    let config = DeoraclizerConfig::new(0.1).unwrap();
    let t = config.test_budget_for(&scheme.params());
    let mut rng = SeededRng::new(0);
    let failures: u64 = (0..t)
        .map(|c| {
            let fixed = config.clone().with_stop(StopRule::Fixed(c));
            capture_trial(&scheme, &fixed, &mut rng).unwrap().failed as u64
        })
        .sum();
    let exact = failures as f64 / t as f64;
    let mc = capture(&scheme, &config, 100_000, 7);
    let (lo, hi) = wilson_interval(mc.failures, mc.trials, Z99);
    let pass = t == 200 && failures == 10 && lo <= 0.05 && 0.05 <= hi;
    verdict(
        2,
        "counter capture failure is exactly M/T",
        pass,
        &format!("enumerated {failures}/{t} = {exact}; Monte Carlo {:.5} with 99% CI [{lo:.5}, {hi:.5}]", mc.estimate),
    );
    assert!(pass);
}

#[test]
fn criterion_3_random_stopping_is_necessary() {
    let scheme = CounterScheme::default();
    let config = DeoraclizerConfig::new(0.1).unwrap();
    let fixed: Vec<CaptureReport> = (0..10)
        .map(|c| capture(&scheme, &config.clone().with_stop(StopRule::Fixed(c)), 1000, 10 + c))
        .collect();
    let random = capture(&scheme, &config, 20_000, 9);
    let all_fail = fixed.iter().all(|r| r.failures == r.trials);
    let random_ok = (random.estimate - 0.05).abs() <= 3.0 * random.stderr;
    let pass = all_fail && random_ok;
    verdict(
        3,
        "fixed S < M always fails, uniform S fails at M/T",
        pass,
        &format!(
            "fixed rates {:?}; uniform {:.4}±{:.4}",
            fixed.iter().map(|r| r.estimate).collect::<Vec<_>>(),
            random.estimate,
            random.stderr
        ),
    );
    assert!(pass);
}

fn chain_cells<S>(name: &str, scheme: S, seed: u64) -> Vec<(String, f64, f64, f64, bool)>
where
    S: CopyProtectionScheme + Clone,
{
    let base = estimate_mean_correctness(&RandomOracleModel(scheme.clone()), 10_000, seed).unwrap();
    EPSILONS
        .iter()
        .map(|eps| {
            let compiled = CompiledScheme::new(scheme.clone(), DeoraclizerConfig::new(*eps).unwrap());
            let r = estimate_mean_correctness(&compiled, 10_000, seed + 1).unwrap();
            let floor = base.estimate - eps / 2.0 - 3.0 * r.combined_stderr(&base);
            (format!("{name} eps={eps}"), base.estimate, r.estimate, floor, r.estimate >= floor)
        })
        .collect()
}

#[test]
fn criterion_4_correctness_chain() {
    let mut cells = chain_cells("pad", PadScheme::default(), 40);
    cells.extend(chain_cells("conjugate", ConjugateScheme::default(), 50));
    let pass = cells.iter().all(|c| c.4);
    let detail = cells
        .iter()
        .map(|(n, b, c, f, _)| format!("{n}: base {b:.4} compiled {c:.4} floor {f:.4}"))
        .collect::<Vec<_>>()
        .join("; ");
    verdict(4, "compiled mean-correctness >= base - eps/2 - 3 stderr", pass, &detail);
    assert!(pass);
}

#[test]
fn criterion_5_counting_identity() {
    // capture_trial asserts Σ w_i ≤ M on every trial; the report keeps the max.
    let cells = [
        ("pad", capture(&PadScheme::default(), &DeoraclizerConfig::new(0.1).unwrap(), 10_000, 5), 16),
        ("counter", capture(&CounterScheme::default(), &DeoraclizerConfig::new(0.1).unwrap(), 10_000, 5), 10),
        ("counter N=3", capture(&CounterScheme::new(8, 10, 3).unwrap(), &DeoraclizerConfig::new(0.2).unwrap(), 10_000, 5), 10),
        ("conjugate", capture(&ConjugateScheme::default(), &DeoraclizerConfig::new(0.1).unwrap(), 10_000, 5), 8),
    ];
    let pass = cells.iter().all(|(_, r, m)| r.max_new_query_total <= *m);
    let detail = cells
        .iter()
        .map(|(n, r, m)| format!("{n}: max sum {} <= M={m} over {} trials", r.max_new_query_total, r.trials))
        .collect::<Vec<_>>()
        .join("; ");
    verdict(5, "sum of new CP queries never exceeds M", pass, &detail);
    assert!(pass);
}

#[test]
fn criterion_6_gentle_measurement() {
    let mut cells = Vec::new();
    for qubits in 1..=3 {
        for (i, eps) in [0.01, 0.04, 0.09].into_iter().enumerate() {
            cells.push(gentle_bound_experiment(qubits, eps, 1000, 100 * qubits as u64 + i as u64).unwrap());
        }
    }
    let pass = cells.iter().all(|c| c.holds() && c.instances >= 1000);
    let detail = cells
        .iter()
        .map(|c| format!("{}q eps={}: max {:.4} <= {:.4}", c.qubits, c.epsilon, c.max_distance, c.bound))
        .collect::<Vec<_>>()
        .join("; ");
    verdict(6, "recovered state within sqrt(eps)", pass, &detail);
    assert!(pass);
}

#[test]
fn criterion_7_reusability_decay() {
    let mut points = Vec::new();
    for (i, eps) in [0.0025, 0.01].into_iter().enumerate() {
        let settings = DecaySettings {
            scheme: ConjugateScheme::new(2, 3, 4, eps).unwrap(),
            max_k: 10,
            shots: 10_000,
            seed: 70 + i as u64,
        };
        points.extend(reusability_decay(&settings).unwrap());
    }
    let pass = points.iter().all(|p| p.within());
    let detail = points
        .iter()
        .map(|p| format!("eps={} k={}: {:.4} (exact {:.4}) <= {:.4}", p.epsilon, p.k, p.observed, p.exact, p.bound))
        .collect::<Vec<_>>()
        .join("; ");
    verdict(7, "tomographic distance after k evaluations <= k sqrt(eps)", pass, &detail);
    assert!(pass);
}

#[test]
fn criterion_8_security_lift() {
    let trials = 10_000;
    let config = DeoraclizerConfig::new(0.1).unwrap();
    let pad = CompiledScheme::new(PadScheme::default(), config.clone());
    let counter = CompiledScheme::new(CounterScheme::default(), config.clone());
    let constant = CompiledScheme::new(ConstantScheme::default(), config.clone());
    let conj = CompiledScheme::new(ConjugateScheme::default(), config);
    let pairs: Vec<(&str, LiftComparison)> = vec![
        ("pad/clone", compare_lift(&pad, ClassicalClonePirate, trials, 81).unwrap()),
        ("pad/solo", compare_lift(&pad, SoloPirate, trials, 82).unwrap()),
        ("counter/clone", compare_lift(&counter, ClassicalClonePirate, trials, 83).unwrap()),
        ("counter/solo", compare_lift(&counter, SoloPirate, trials, 84).unwrap()),
        ("constant/clone", compare_lift(&constant, ClassicalClonePirate, trials, 85).unwrap()),
        ("conjugate/measure-clone", compare_lift(&conj, ConjugateMeasureClonePirate, trials, 86).unwrap()),
        ("conjugate/half-split", compare_lift(&conj, ConjugateHalfSplitPirate, trials, 87).unwrap()),
    ];
    let pass = pairs.iter().all(|(_, c)| c.within(3.0));
    let detail = pairs
        .iter()
        .map(|(n, c)| format!("{n}: {:.4} vs {:.4} (3se {:.4})", c.plain.estimate, c.lifted.estimate, 3.0 * c.combined_stderr))
        .collect::<Vec<_>>()
        .join("; ");
    verdict(8, "plain pirate on compiled scheme matches lifted pirate", pass, &detail);
    assert!(pass);
}

type CellRunner = Box<dyn Fn(Budget, u64) -> Vec<(String, CaptureReport)>>;

#[test]
fn criterion_9_factor_n_improvement() {
    let toys: Vec<(&str, CellRunner, usize, usize)> = vec![
        ("pad", Box::new(|b, s| capture_cells("pad", &PadScheme::default(), b, s)), 16, 1),
        ("counter N=5", Box::new(|b, s| capture_cells("counter", &CounterScheme::new(8, 10, 5).unwrap(), b, s)), 10, 5),
    ];
    let mut pass = true;
    let mut detail = Vec::new();
    for (name, run, m, n) in &toys {
        let fast = run(Budget::RandomStop, 91);
        let slow = run(Budget::Ckp15FactorN, 92);
        for ((_, a), (_, b)) in fast.iter().zip(&slow) {
            let exact_factor = b.test_budget == *n as u64 * a.test_budget;
            let expected_t = (2 * m) as f64 / a.bound / 2.0;
            pass &= a.within_bound() && b.within_bound() && exact_factor && a.test_budget as f64 == expected_t.ceil();
            detail.push(format!(
                "{name} eps={}: T {} vs {} (x{}), failure {:.4} / {:.4}, mean S {:.1} / {:.1}",
                2.0 * a.bound,
                a.test_budget,
                b.test_budget,
                n,
                a.estimate,
                b.estimate,
                a.mean_test_executions(),
                b.mean_test_executions()
            ));
        }
    }
    verdict(9, "both budgets meet the capture bound, random stop uses N times fewer tests", pass, &detail.join("; "));
    assert!(pass);
}
