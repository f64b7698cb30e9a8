//! Monte Carlo check of the gentle-measurement recovery bound.

use serde::{Deserialize, Serialize};

use crate::par::map_trials;
use crate::qsim::random::{random_density, random_near_certain_measurement};
use crate::qsim::{gentle_recover, outcome_distribution, trace_distance, QsimError};

/// Results for one `(qubits, ε)` cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GentleCell {
    pub qubits: usize,
    pub epsilon: f64,
    pub instances: u64,
    pub max_distance: f64,
    pub mean_distance: f64,
    /// Largest rejection probability `1 − p_0` among the instances.
    pub max_rejection: f64,
    pub bound: f64,
    pub violations: u64,
}

impl GentleCell {
    pub fn holds(&self) -> bool {
        self.violations == 0
    }
}

/// For each instance draw a random state of random rank and a two-outcome
/// measurement accepting it with probability at least `1 − ε`, condition on
/// acceptance, recover, and compare with the original.
pub fn gentle_bound_experiment(qubits: usize, epsilon: f64, instances: u64, seed: u64) -> Result<GentleCell, QsimError> {
    let dim = 1usize << qubits;
    let rows = map_trials(seed, instances, |_, rng| -> Result<(f64, f64), QsimError> {
        let rank = 1 + rng.below(dim as u64) as usize;
        let rho = random_density(qubits, rank, rng);
        let m = random_near_certain_measurement(&rho, epsilon, rng);
        let branches = outcome_distribution(&rho, &m)?;
        let accepted = &branches[0];
        let post = accepted.post_state.as_ref().expect("acceptance is near certain");
        let recovered = gentle_recover(post, &m, 0)?;
        Ok((trace_distance(&rho, &recovered)?, 1.0 - accepted.probability))
    });
    let bound = epsilon.sqrt();
    let mut cell = GentleCell {
        qubits,
        epsilon,
        instances,
        max_distance: 0.0,
        mean_distance: 0.0,
        max_rejection: 0.0,
        bound,
        violations: 0,
    };
    for row in rows {
        let (d, rejection) = row?;
        cell.max_distance = cell.max_distance.max(d);
        cell.mean_distance += d;
        cell.max_rejection = cell.max_rejection.max(rejection);
        cell.violations += (d > bound) as u64;
    }
    cell.mean_distance /= instances.max(1) as f64;
    Ok(cell)
}
