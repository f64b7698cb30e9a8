use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{compile_traced, DeoraclizerConfig, DeoraclizerError};
use crate::bits::Bits;
use crate::oracle::{OnTheFlyOracle, RecordingOracle};
use crate::par::map_trials;
use crate::rng::SeededRng;
use crate::schemes::{eval, CopyProtectionScheme};

/// One compile-then-evaluate run checked for capture failure.
#[derive(Clone, Debug, PartialEq)]
pub struct CaptureTrial {
    pub s_used: u64,
    /// A query of the final evaluation hit `D_CP \ D_Eval`.
    pub failed: bool,
    /// `w_i`: new `D_CP` inputs queried at step `i`, for steps `1..=S+1`.
    pub new_cp_queries: Vec<usize>,
    /// The final evaluation returned `f(x)`.
    pub correct: bool,
}

/// Compile a fresh program and run one more evaluation against the true
/// oracle, watching for queries in `D_CP \ D_Eval`.
pub fn capture_trial<S: CopyProtectionScheme + ?Sized>(
    scheme: &S,
    config: &DeoraclizerConfig,
    rng: &mut SeededRng,
) -> Result<CaptureTrial, DeoraclizerError> {
    let d = scheme.sample_function(rng);
    let trace = compile_traced(scheme, &d, config, rng)?;
    let recorded: BTreeSet<Bits> = trace.program.database.inputs();
    let uncaptured: BTreeSet<Bits> = trace.cp_queries.difference(&recorded).copied().collect();

    let x = scheme.sample_input(rng);
    let mut live = RecordingOracle::new(OnTheFlyOracle::resume(trace.live, rng.fork()));
    let (_, y) = eval(scheme, trace.program.state, &x, &mut live, rng)?;
    let final_queries = live.transcript().inputs();
    let failed = !final_queries.is_disjoint(&uncaptured);

    let mut seen = BTreeSet::new();
    let new_cp_queries: Vec<usize> = trace
        .step_queries
        .iter()
        .chain(std::iter::once(&final_queries))
        .map(|q| {
            let fresh = q
                .iter()
                .filter(|x| trace.cp_queries.contains(x) && !seen.contains(*x))
                .count();
            seen.extend(q.iter().copied());
            fresh
        })
        .collect();
    let total: usize = new_cp_queries.iter().sum();
    let m = scheme.params().cp_queries;
    assert!(total <= m, "counting identity violated: Σ w_i = {total} > M = {m}");

    Ok(CaptureTrial {
        s_used: trace.program.s_used,
        failed,
        new_cp_queries,
        correct: y == scheme.function_value(&d, &x),
    })
}

/// Aggregate of capture trials.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaptureReport {
    pub trials: u64,
    pub failures: u64,
    pub estimate: f64,
    pub stderr: f64,
    /// Entry `w` counts test steps that made `w` new `D_CP` queries.
    pub per_step_new_query_counts: Vec<u64>,
    /// Largest `Σ_i w_i` seen in a single trial.
    pub max_new_query_total: usize,
    pub bound: f64,
    pub test_budget: u64,
    pub total_test_executions: u64,
    pub final_correct: u64,
}

impl CaptureReport {
    pub fn new(bound: f64, test_budget: u64) -> Self {
        Self {
            trials: 0,
            failures: 0,
            estimate: 0.0,
            stderr: 0.0,
            per_step_new_query_counts: Vec::new(),
            max_new_query_total: 0,
            bound,
            test_budget,
            total_test_executions: 0,
            final_correct: 0,
        }
    }

    pub fn add(&mut self, t: &CaptureTrial) {
        self.trials += 1;
        self.failures += t.failed as u64;
        self.final_correct += t.correct as u64;
        self.total_test_executions += t.s_used;
        for w in &t.new_cp_queries {
            if self.per_step_new_query_counts.len() <= *w {
                self.per_step_new_query_counts.resize(w + 1, 0);
            }
            self.per_step_new_query_counts[*w] += 1;
        }
        self.max_new_query_total = self.max_new_query_total.max(t.new_cp_queries.iter().sum());
        self.refresh();
    }

    /// Combine two reports over disjoint trials.
    pub fn merge(mut self, other: &CaptureReport) -> Self {
        self.trials += other.trials;
        self.failures += other.failures;
        self.final_correct += other.final_correct;
        self.total_test_executions += other.total_test_executions;
        let len = self.per_step_new_query_counts.len().max(other.per_step_new_query_counts.len());
        self.per_step_new_query_counts.resize(len, 0);
        for (a, b) in self.per_step_new_query_counts.iter_mut().zip(&other.per_step_new_query_counts) {
            *a += b;
        }
        self.max_new_query_total = self.max_new_query_total.max(other.max_new_query_total);
        self.refresh();
        self
    }

    fn refresh(&mut self) {
        if self.trials > 0 {
            let n = self.trials as f64;
            self.estimate = self.failures as f64 / n;
            self.stderr = (self.estimate * (1.0 - self.estimate) / n).sqrt();
        }
    }

    /// `estimate ≤ bound + 3·stderr`.
    pub fn within_bound(&self) -> bool {
        self.estimate <= self.bound + 3.0 * self.stderr
    }

    pub fn mean_test_executions(&self) -> f64 {
        self.total_test_executions as f64 / self.trials.max(1) as f64
    }
}

/// Estimate `Pr[¬E]` over `trials` independent compilations.
pub fn estimate_capture_failure<S: CopyProtectionScheme + ?Sized>(
    scheme: &S,
    config: &DeoraclizerConfig,
    trials: u64,
    seed: u64,
) -> Result<CaptureReport, DeoraclizerError> {
    let results = map_trials(seed, trials, |_, rng| capture_trial(scheme, config, rng));
    let mut report = CaptureReport::new(config.epsilon / 2.0, config.test_budget_for(&scheme.params()));
    for r in results {
        report.add(&r?);
    }
    Ok(report)
}
