use serde::{Deserialize, Serialize};

/// Two-sided 99% standard normal quantile.
pub const Z99: f64 = 2.575_829_303_548_900_4;

/// Wilson score interval for `successes` out of `trials` at quantile `z`.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    assert!(trials > 0, "no trials");
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Binomial standard error `√(p̂(1−p̂)/n)`.
pub fn binomial_stderr(successes: u64, trials: u64) -> f64 {
    let n = trials as f64;
    let p = successes as f64 / n;
    (p * (1.0 - p) / n).sqrt()
}

/// Success-rate estimate of a game with its 99% Wilson interval.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub game: String,
    pub trials: u64,
    pub successes: u64,
    pub estimate: f64,
    pub stderr: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub seed: u64,
}

impl ExperimentReport {
    pub fn from_counts(game: impl Into<String>, successes: u64, trials: u64, seed: u64) -> Self {
        let (ci_low, ci_high) = wilson_interval(successes, trials, Z99);
        let estimate = successes as f64 / trials as f64;
        Self {
            game: game.into(),
            trials,
            successes,
            estimate,
            stderr: binomial_stderr(successes, trials),
            // the Wilson interval always contains p̂; clamp rounding
            ci_low: ci_low.min(estimate),
            ci_high: ci_high.max(estimate),
            seed,
        }
    }

    pub fn from_outcomes(game: impl Into<String>, outcomes: &[bool], seed: u64) -> Self {
        let successes = outcomes.iter().filter(|b| **b).count() as u64;
        Self::from_counts(game, successes, outcomes.len() as u64, seed)
    }

    /// Pool two reports of the same game over disjoint trials.
    pub fn merge(&self, other: &ExperimentReport) -> Self {
        Self::from_counts(self.game.clone(), self.successes + other.successes, self.trials + other.trials, self.seed)
    }

    /// `√(se₁² + se₂²)`, the standard error of the difference of two
    /// independent estimates.
    pub fn combined_stderr(&self, other: &ExperimentReport) -> f64 {
        (self.stderr.powi(2) + other.stderr.powi(2)).sqrt()
    }

    pub fn contains(&self, p: f64) -> bool {
        self.ci_low <= p && p <= self.ci_high
    }
}
