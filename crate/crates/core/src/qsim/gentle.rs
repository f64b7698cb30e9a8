//! Recovery after a near-certain measurement.
//!
//! A measurement `(M_i)` on dimension `d` is purified into the unitary `V`
//! completing the isometry `|ψ⟩ ↦ Σ_i |i⟩ ⊗ M_i|ψ⟩`. Recovery takes the
//! post-measurement state of outcome `o`, places it back in ancilla branch
//! `o`, applies `V†` and discards the ancilla.

use super::density::DensityOperator;
use super::linalg::{self, CMatrix};
use super::measurement::Measurement;
use super::state::sample_index;
use super::{QsimError, DEGENERATE_PROBABILITY};
use crate::rng::SeededRng;

/// The recovery channel of a fixed measurement. It never sees the state that
/// was measured.
#[derive(Clone, Debug)]
pub struct GentleRecovery {
    dim: usize,
    outcomes: usize,
    purification: CMatrix,
}

impl GentleRecovery {
    pub fn new(operators: &[CMatrix]) -> Self {
        let dim = operators[0].nrows();
        let outcomes = operators.len();
        let mut stacked = CMatrix::zeros(dim * outcomes, dim);
        for (i, m) in operators.iter().enumerate() {
            stacked.view_mut((i * dim, 0), (dim, dim)).copy_from(m);
        }
        Self {
            dim,
            outcomes,
            purification: linalg::complete_to_unitary(&stacked),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Apply the recovery for `outcome` to its post-measurement state.
    pub fn recover(&self, post_state: &DensityOperator, outcome: usize) -> Result<DensityOperator, QsimError> {
        post_state.check_dim(self.dim)?;
        if outcome >= self.outcomes {
            return Err(QsimError::OutcomeOutOfRange {
                index: outcome,
                outcomes: self.outcomes,
            });
        }
        let d = self.dim;
        let rows = self.purification.rows(outcome * d, d);
        // V† (|o⟩⟨o| ⊗ σ) V restricted to the rows of branch o
        let lifted = rows.adjoint() * post_state.matrix() * rows;
        let mut out = CMatrix::zeros(d, d);
        for a in 0..self.outcomes {
            out += lifted.view((a * d, a * d), (d, d));
        }
        DensityOperator::new(linalg::hermitian_part(&out))
    }
}

/// Undo the disturbance of observing `observed_outcome` of a two-outcome
/// measurement. If that outcome had probability at least `1 − ε` on `ρ`, the
/// result is within `√ε` of `ρ` in trace distance.
pub fn gentle_recover(
    post_state: &DensityOperator,
    m: &Measurement,
    observed_outcome: usize,
) -> Result<DensityOperator, QsimError> {
    if m.num_outcomes() != 2 {
        return Err(QsimError::NonBinaryMeasurement(m.num_outcomes()));
    }
    GentleRecovery::new(m.operators()).recover(post_state, observed_outcome)
}

/// A quantum algorithm with classical output, given by its instrument on each
/// input: outcome `y` occurs with Kraus operator `K_y`.
pub trait ClassicalOutputAlgorithm {
    fn instrument(&self, x: usize) -> Instrument;
    /// The output `f(x)` the algorithm is meant to produce.
    fn intended_output(&self, x: usize) -> usize;
}

/// Kraus operators indexed by classical output.
#[derive(Clone, Debug)]
pub struct Instrument {
    pub kraus: Vec<CMatrix>,
}

#[derive(Clone, Debug)]
pub struct WrappedOutput {
    pub output: usize,
    pub probability: f64,
    /// Residual state after recovery.
    pub state: DensityOperator,
}

impl WrappedOutput {
    pub fn on_target<A: ClassicalOutputAlgorithm + ?Sized>(&self, alg: &A, x: usize) -> bool {
        self.output == alg.intended_output(x)
    }
}

/// Run `alg` on `(ρ, x)`, keep its classical output and rewind its quantum
/// side effect. The output has the unwrapped distribution; when it equals
/// `f(x)` and `Pr[f(x)] ≥ 1 − ε(x)`, the residual state is within `√ε(x)` of `ρ`.
pub fn classical_output_wrapper<A: ClassicalOutputAlgorithm + ?Sized>(
    alg: &A,
    rho: &DensityOperator,
    x: usize,
    rng: &mut SeededRng,
) -> Result<WrappedOutput, QsimError> {
    let instrument = alg.instrument(x);
    let m = Measurement::new(instrument.kraus)?;
    let probs = m.probabilities(rho)?;
    let y = sample_index(&probs, rng);
    let p = probs[y];
    if p <= DEGENERATE_PROBABILITY {
        return Ok(WrappedOutput {
            output: y,
            probability: p,
            state: rho.clone(),
        });
    }
    let k = &m.operators()[y];
    let post = DensityOperator::new((k * rho.matrix() * k.adjoint()).scale(1.0 / p))?;
    let state = GentleRecovery::new(m.operators()).recover(&post, y)?;
    Ok(WrappedOutput {
        output: y,
        probability: p,
        state,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::density::trace_distance;
    use crate::qsim::linalg::C64;
    use crate::qsim::measurement::{basis_projector, measure};
    use crate::qsim::random::{random_channel, random_density, random_near_certain_measurement, random_unitary};
    use proptest::prelude::*;

    #[test]
    fn trivial_measurement_recovers_exactly() {
        let mut rng = SeededRng::new(2);
        let rho = random_density(2, 3, &mut rng);
        let m = Measurement::new(vec![linalg::identity(4), CMatrix::zeros(4, 4)]).unwrap();
        let back = gentle_recover(&rho, &m, 0).unwrap();
        assert!(trace_distance(&rho, &back).unwrap() < 1e-12);
    }

    #[test]
    fn projector_on_diagonal_state() {
        let rho = DensityOperator::diagonal(&[0.96, 0.04]).unwrap();
        let m = Measurement::new(vec![basis_projector(2, 0), basis_projector(2, 1)]).unwrap();
        let post = DensityOperator::diagonal(&[1.0, 0.0]).unwrap();
        let back = gentle_recover(&post, &m, 0).unwrap();
        let d = trace_distance(&rho, &back).unwrap();
        assert!(d <= 0.2, "{d}");
        // a projective check leaves nothing to undo
        assert!((d - 0.04).abs() < 1e-12);
    }

    #[test]
    fn non_binary_measurement_rejected() {
        let m = Measurement::computational_basis(2);
        let rho = DensityOperator::maximally_mixed(2).unwrap();
        assert!(matches!(
            gentle_recover(&rho, &m, 0),
            Err(QsimError::NonBinaryMeasurement(4))
        ));
    }

    #[test]
    fn recovery_is_independent_of_the_state() {
        let mut rng = SeededRng::new(8);
        let rho = random_density(2, 4, &mut rng);
        let m = random_near_certain_measurement(&rho, 0.1, &mut rng);
        let r1 = GentleRecovery::new(m.operators());
        let r2 = GentleRecovery::new(m.operators());
        let sigma = random_density(2, 1, &mut rng);
        assert_eq!(r1.recover(&sigma, 0).unwrap(), r2.recover(&sigma, 0).unwrap());
    }

    #[test]
    fn bound_on_random_three_qubit_instances() {
        let mut rng = SeededRng::new(31);
        for _ in 0..1000 {
            let rank = 1 + rng.below(8) as usize;
            let rho = random_density(3, rank, &mut rng);
            let m = random_near_certain_measurement(&rho, 0.01, &mut rng);
            let out = measure(&rho, &m, &mut rng).unwrap();
            if out.outcome_index != 0 {
                continue;
            }
            let back = gentle_recover(out.post_state.as_ref().unwrap(), &m, 0).unwrap();
            assert!(trace_distance(&rho, &back).unwrap() <= 0.1 + 1e-9);
        }
    }

    struct NoisyBit {
        eps: f64,
        twist: CMatrix,
    }

    impl ClassicalOutputAlgorithm for NoisyBit {
        fn instrument(&self, _x: usize) -> Instrument {
            // E = (1 − ε) I + ε |0⟩⟨0| accepts every state w.p. ≥ 1 − ε
            let e = linalg::identity(2).scale(1.0 - self.eps) + basis_projector(2, 0).scale(self.eps);
            let two = Measurement::from_effect(&e).unwrap();
            Instrument {
                kraus: vec![&self.twist * &two.operators()[0], two.operators()[1].clone()],
            }
        }
        fn intended_output(&self, _x: usize) -> usize {
            0
        }
    }

    #[test]
    fn deterministic_algorithm_is_undisturbed() {
        let mut rng = SeededRng::new(4);
        let alg = NoisyBit {
            eps: 0.0,
            twist: random_unitary(2, &mut rng),
        };
        let rho = random_density(1, 2, &mut rng);
        let out = classical_output_wrapper(&alg, &rho, 0, &mut rng).unwrap();
        assert_eq!(out.output, 0);
        assert!(trace_distance(&rho, &out.state).unwrap() < 1e-12);
    }

    #[test]
    fn wrapper_bound_and_output_distribution() {
        let mut rng = SeededRng::new(6);
        let alg = NoisyBit {
            eps: 0.04,
            twist: random_unitary(2, &mut rng),
        };
        let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let plus = DensityOperator::from_pure(&crate::qsim::PureState::from_amplitudes(vec![s, s]).unwrap()).unwrap();
        let mut misses = 0;
        for _ in 0..1000 {
            let out = classical_output_wrapper(&alg, &plus, 0, &mut rng).unwrap();
            if out.on_target(&alg, 0) {
                assert!(trace_distance(&plus, &out.state).unwrap() <= 0.2 + 1e-9);
            } else {
                misses += 1;
            }
        }
        // Pr[y = 1] = ε/2 = 0.02 on |+⟩
        let p = misses as f64 / 1000.0;
        assert!((p - 0.02).abs() < 3.0 * (0.02f64 * 0.98 / 1000.0).sqrt());
    }

    #[test]
    fn chained_wrapped_calls_stay_within_union_bound() {
        let mut rng = SeededRng::new(12);
        let alg = NoisyBit {
            eps: 0.01,
            twist: random_unitary(2, &mut rng),
        };
        for _ in 0..200 {
            let rho = random_density(1, 2, &mut rng);
            let mut cur = rho.clone();
            for k in 1..=5 {
                let out = classical_output_wrapper(&alg, &cur, 0, &mut rng).unwrap();
                if !out.on_target(&alg, 0) {
                    break;
                }
                cur = out.state;
                assert!(trace_distance(&rho, &cur).unwrap() <= k as f64 * 0.1 + 1e-9);
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn channels_do_not_increase_distance(seed in any::<u64>(), n in 1usize..=3, count in 1usize..=3) {
            let mut rng = SeededRng::new(seed);
            let a = random_density(n, 1 + rng.below(1 << n) as usize, &mut rng);
            let b = random_density(n, 1 + rng.below(1 << n) as usize, &mut rng);
            let kraus = random_channel(1 << n, count, &mut rng);
            let before = trace_distance(&a, &b).unwrap();
            let after = trace_distance(&a.apply_channel(&kraus).unwrap(), &b.apply_channel(&kraus).unwrap()).unwrap();
            prop_assert!(after <= before + 1e-7);
        }
    }
}
