use anyhow::{anyhow, bail, Result};
use caromlab::deoraclizer::{estimate_capture_failure, Budget, CaptureReport, DeoraclizerConfig, StopRule};
use caromlab::harness::{
    compare_lift, estimate_mean_correctness, gentle_bound_experiment, reusability_decay, run_learnability_experiment,
    BudgetLearner, ClassicalClonePirate, ConjugateHalfSplitPirate, ConjugateMeasureClonePirate, DecaySettings,
    ExhaustiveLearner, LearnerConfig, LiftComparison, PointFunctions, SoloPirate,
};
use caromlab::schemes::{ConjugateScheme, CopyProtectionScheme, RandomOracleModel, SchemeSpec};
use caromlab::{with_scheme, CompiledScheme};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{Experiment, LearnerKind, PirateKind, RunConfig};

/// Everything an experiment produces before it is written out.
#[derive(Debug, Default)]
pub struct Outcome {
    /// One JSON record per game and configuration.
    pub records: Vec<(String, Value)>,
    pub csv_header: Vec<&'static str>,
    pub csv_rows: Vec<Vec<String>>,
    /// Human-readable descriptions of violated bounds.
    pub violations: Vec<String>,
}

impl Outcome {
    fn new(header: &[&'static str]) -> Self {
        Self {
            csv_header: header.to_vec(),
            ..Self::default()
        }
    }

    fn record(&mut self, game: &str, body: impl Serialize) {
        self.records
            .push((game.to_string(), serde_json::to_value(body).expect("reports serialize")));
    }

    fn row(&mut self, cells: Vec<String>) {
        self.csv_rows.push(cells);
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.violations.push(what());
        }
    }
}

pub fn run(config: &RunConfig) -> Result<Outcome> {
    match config.experiment {
        Experiment::CaptureBound => capture_bound(config),
        Experiment::CorrectnessChain => correctness_chain(config),
        Experiment::CounterNecessity => counter_necessity(config),
        Experiment::GentleBound => gentle_bound(config),
        Experiment::ReusabilityDecay => decay(config),
        Experiment::PiracyLift => piracy_lift(config),
        Experiment::ClassicalCkp15 => classical_ckp15(config),
        Experiment::Learnability => learnability(config),
    }
}

fn scheme(config: &RunConfig) -> &SchemeSpec {
    config.scheme.as_ref().expect("validated")
}

fn compiler(config: &RunConfig) -> Result<DeoraclizerConfig> {
    Ok(DeoraclizerConfig::new(config.epsilon)?
        .with_budget(config.budget.unwrap_or(Budget::RandomStop))
        .with_stop(config.stop.unwrap_or(StopRule::Uniform)))
}

fn capture(spec: &SchemeSpec, dc: &DeoraclizerConfig, trials: u64, seed: u64) -> Result<CaptureReport> {
    Ok(with_scheme!(spec, s => estimate_capture_failure(s, dc, trials, seed))?)
}

fn capture_bound(config: &RunConfig) -> Result<Outcome> {
    let spec = scheme(config);
    let dc = compiler(config)?;
    let r = capture(spec, &dc, config.trials, config.seed)?;
    let m = spec.params().cp_queries;
    let mut out = Outcome::new(&["step_new_queries", "steps"]);
    for (w, n) in r.per_step_new_query_counts.iter().enumerate() {
        out.row(vec![w.to_string(), n.to_string()]);
    }
    out.check(r.within_bound(), || {
        format!("capture failure {} exceeds eps/2 = {} by more than 3 stderr", r.estimate, r.bound)
    });
    out.check(r.max_new_query_total <= m, || format!("sum of new CP queries {} > M = {m}", r.max_new_query_total));
    out.record("capture_failure", &r);
    Ok(out)
}

fn correctness_chain(config: &RunConfig) -> Result<Outcome> {
    let spec = scheme(config);
    let dc = compiler(config)?;
    let (base, compiled) = with_scheme!(spec, s => (
        estimate_mean_correctness(&RandomOracleModel(s.clone()), config.trials, config.seed)?,
        estimate_mean_correctness(&CompiledScheme::new(s.clone(), dc.clone()), config.trials, config.seed ^ 1)?,
    ));
    let floor = base.estimate - config.epsilon / 2.0 - 3.0 * base.combined_stderr(&compiled);
    let mut out = Outcome::new(&["model", "estimate", "stderr", "ci_low", "ci_high"]);
    for (model, r) in [("oracle", &base), ("compiled", &compiled)] {
        out.row(vec![model.into(), r.estimate.to_string(), r.stderr.to_string(), r.ci_low.to_string(), r.ci_high.to_string()]);
    }
    out.check(compiled.estimate >= floor, || {
        format!("compiled mean-correctness {} below {floor}", compiled.estimate)
    });
    out.record("mean_correctness_oracle", &base);
    out.record("mean_correctness_compiled", json!({ "report": compiled, "floor": floor }));
    Ok(out)
}

fn counter_necessity(config: &RunConfig) -> Result<Outcome> {
    let spec = scheme(config);
    let p = spec.params();
    let dc = DeoraclizerConfig::new(config.epsilon)?;
    let t = dc.test_budget_for(&p);
    let cutoff = p.cp_queries.div_ceil(p.eval_queries) as u64;
    let mut out = Outcome::new(&["stop", "failure_rate", "stderr"]);
    for c in 0..(cutoff + 5).min(t) {
        let r = capture(spec, &dc.clone().with_stop(StopRule::Fixed(c)), config.trials, config.seed + c)?;
        out.row(vec![c.to_string(), r.estimate.to_string(), r.stderr.to_string()]);
        if c < cutoff {
            out.check(r.failures == r.trials, || format!("fixed S = {c} captured in some trial"));
        }
        out.record("capture_failure_fixed", json!({ "stop": c, "report": r }));
    }
    let r = capture(spec, &dc, config.trials, config.seed)?;
    out.row(vec!["uniform".into(), r.estimate.to_string(), r.stderr.to_string()]);
    let exact = cutoff as f64 / t as f64;
    out.check(r.within_bound(), || format!("uniform S failure {} exceeds eps/2", r.estimate));
    out.record("capture_failure_uniform", json!({ "report": r, "exact": exact }));
    Ok(out)
}

fn gentle_bound(config: &RunConfig) -> Result<Outcome> {
    let qubits = config.qubits.clone().unwrap_or_else(|| vec![1, 2, 3]);
    let mut out = Outcome::new(&["qubits", "epsilon", "instances", "max_distance", "mean_distance", "bound"]);
    for (i, q) in qubits.iter().enumerate() {
        let cell = gentle_bound_experiment(*q, config.epsilon, config.trials, config.seed + i as u64)?;
        out.row(vec![
            q.to_string(),
            cell.epsilon.to_string(),
            cell.instances.to_string(),
            cell.max_distance.to_string(),
            cell.mean_distance.to_string(),
            cell.bound.to_string(),
        ]);
        out.check(cell.holds(), || format!("{} of {} recoveries on {q} qubits exceed sqrt(eps)", cell.violations, cell.instances));
        out.record("gentle_recovery", &cell);
    }
    Ok(out)
}

fn decay(config: &RunConfig) -> Result<Outcome> {
    let SchemeSpec::Conjugate(base) = scheme(config) else {
        bail!("reusability_decay needs the conjugate scheme");
    };
    let scheme = ConjugateScheme::new(base.key_qubits, base.input_len, base.output_len, config.epsilon)?;
    let settings = DecaySettings {
        scheme,
        max_k: config.max_k.unwrap_or(10),
        shots: config.trials,
        seed: config.seed,
    };
    let mut out = Outcome::new(&["k", "observed", "exact", "bound"]);
    for p in reusability_decay(&settings)? {
        out.row(vec![p.k.to_string(), p.observed.to_string(), p.exact.to_string(), p.bound.to_string()]);
        out.check(p.within(), || format!("distance {} after k = {} exceeds {}", p.observed, p.k, p.bound));
        out.record("reusability_decay", &p);
    }
    Ok(out)
}

fn piracy_lift(config: &RunConfig) -> Result<Outcome> {
    let spec = scheme(config);
    let dc = compiler(config)?;
    let (t, s) = (config.trials, config.seed);
    let kind = config.pirate.unwrap_or(match spec {
        SchemeSpec::Conjugate(_) => PirateKind::MeasureClone,
        _ => PirateKind::Clone,
    });
    let c: LiftComparison = match (kind, spec) {
        (PirateKind::Clone, _) => with_scheme!(spec, x => compare_lift(&CompiledScheme::new(x.clone(), dc), ClassicalClonePirate, t, s))?,
        (PirateKind::Solo, _) => with_scheme!(spec, x => compare_lift(&CompiledScheme::new(x.clone(), dc), SoloPirate, t, s))?,
        (PirateKind::MeasureClone, SchemeSpec::Conjugate(x)) => {
            compare_lift(&CompiledScheme::new(x.clone(), dc), ConjugateMeasureClonePirate, t, s)?
        }
        (PirateKind::HalfSplit, SchemeSpec::Conjugate(x)) => {
            compare_lift(&CompiledScheme::new(x.clone(), dc), ConjugateHalfSplitPirate, t, s)?
        }
        (k, _) => return Err(anyhow!("pirate {k:?} only applies to the conjugate scheme")),
    };
    let mut out = Outcome::new(&["model", "estimate", "stderr", "ci_low", "ci_high"]);
    for (model, r) in [("plain_on_compiled", &c.plain), ("lifted_on_oracle", &c.lifted)] {
        out.row(vec![model.into(), r.estimate.to_string(), r.stderr.to_string(), r.ci_low.to_string(), r.ci_high.to_string()]);
    }
    out.check(c.within(3.0), || {
        format!("success rates differ by {} > 3 x {}", c.difference, c.combined_stderr)
    });
    out.record("piracy_lift", json!({ "pirate": kind, "comparison": c }));
    Ok(out)
}

fn classical_ckp15(config: &RunConfig) -> Result<Outcome> {
    let spec = scheme(config);
    let p = spec.params();
    let mut out = Outcome::new(&["budget", "test_budget", "mean_test_executions", "failure_rate", "stderr"]);
    let mut reports = Vec::new();
    for (budget, seed) in [(Budget::RandomStop, config.seed), (Budget::Ckp15FactorN, config.seed ^ 1)] {
        let dc = DeoraclizerConfig::new(config.epsilon)?.with_budget(budget);
        let r = capture(spec, &dc, config.trials, seed)?;
        let name = serde_json::to_value(budget)?.as_str().unwrap_or_default().to_string();
        out.row(vec![
            name.clone(),
            r.test_budget.to_string(),
            r.mean_test_executions().to_string(),
            r.estimate.to_string(),
            r.stderr.to_string(),
        ]);
        out.check(r.within_bound(), || format!("{name}: capture failure {} exceeds eps/2", r.estimate));
        out.record("capture_failure", json!({ "budget": budget, "report": r }));
        reports.push(r);
    }
    let (fast, slow) = (&reports[0], &reports[1]);
    let n = p.eval_queries as u64;
    let exact = (2.0 * p.cp_queries as f64 / config.epsilon).fract() == 0.0;
    if exact {
        out.check(slow.test_budget == n * fast.test_budget, || {
            format!("T ratio {} / {} is not N = {n}", slow.test_budget, fast.test_budget)
        });
    }
    Ok(out)
}

fn learnability(config: &RunConfig) -> Result<Outcome> {
    let bits = config.domain_bits.unwrap_or(4);
    let size = 1usize << bits;
    let family = PointFunctions { input_len: bits };
    let learner = config.learner.unwrap_or(LearnerKind::Budget);
    let budget = config.query_budget.unwrap_or(match learner {
        LearnerKind::Exhaustive => size,
        LearnerKind::Budget => 0,
    });
    let lc = LearnerConfig {
        nu: config.nu.unwrap_or(1.0),
        query_budget: budget,
    };
    let r = match learner {
        LearnerKind::Exhaustive => run_learnability_experiment(&family, &ExhaustiveLearner, lc, config.trials, config.seed)?,
        LearnerKind::Budget => {
            run_learnability_experiment(&family, &BudgetLearner { queries: budget }, lc, config.trials, config.seed)?
        }
    };
    let ceiling = match learner {
        LearnerKind::Exhaustive => 1.0,
        LearnerKind::Budget => ((budget + 1) as f64 / size as f64).min(1.0),
    };
    let mut out = Outcome::new(&["learner", "query_budget", "domain", "estimate", "stderr", "ceiling"]);
    out.row(vec![
        format!("{learner:?}").to_lowercase(),
        budget.to_string(),
        size.to_string(),
        r.estimate.to_string(),
        r.stderr.to_string(),
        ceiling.to_string(),
    ]);
    if learner == LearnerKind::Budget && lc.nu == 1.0 {
        out.check(r.estimate <= ceiling + 3.0 * r.stderr, || {
            format!("learner success {} above (b+1)/|X| = {ceiling}", r.estimate)
        });
    }
    out.record("learnability", json!({ "learner": learner, "config": lc, "report": r }));
    Ok(out)
}

/// Scheme parameters for the provenance block.
pub fn scheme_params(config: &RunConfig) -> Option<Value> {
    config
        .scheme
        .as_ref()
        .map(|s| serde_json::to_value(with_scheme!(s, x => x.params())).expect("params serialize"))
}
