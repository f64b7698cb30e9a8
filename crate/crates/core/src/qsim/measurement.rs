use super::density::DensityOperator;
use super::linalg::{self, CMatrix, C64};
use super::state::sample_index;
use super::{QsimError, DEGENERATE_PROBABILITY, STATE_TOLERANCE};
use crate::rng::SeededRng;

/// A general measurement `(M_i)` with `Σ M_i† M_i = I`.
#[derive(Clone, Debug)]
pub struct Measurement {
    operators: Vec<CMatrix>,
}

impl Measurement {
    pub fn new(operators: Vec<CMatrix>) -> Result<Self, QsimError> {
        let dim = operators.first().map(|m| m.nrows()).ok_or(QsimError::EmptyMeasurement)?;
        let mut sum = CMatrix::zeros(dim, dim);
        for m in &operators {
            if m.nrows() != dim || m.ncols() != dim {
                return Err(QsimError::DimensionMismatch {
                    expected: dim,
                    found: m.nrows().max(m.ncols()),
                });
            }
            sum += m.adjoint() * m;
        }
        let defect = linalg::hermitian_operator_norm(&(sum - linalg::identity(dim)));
        if defect > STATE_TOLERANCE {
            return Err(QsimError::IncompleteMeasurement(defect));
        }
        Ok(Self { operators })
    }

    /// Projective measurement in the computational basis of `num_qubits` qubits.
    pub fn computational_basis(num_qubits: usize) -> Self {
        let dim = 1usize << num_qubits;
        let operators = (0..dim)
            .map(|i| {
                let mut p = CMatrix::zeros(dim, dim);
                p[(i, i)] = linalg::ONE;
                p
            })
            .collect();
        Self { operators }
    }

    /// Two-outcome measurement `(√E, √(I−E))` for an effect `0 ≤ E ≤ I`.
    pub fn from_effect(effect: &CMatrix) -> Result<Self, QsimError> {
        let h = linalg::hermitian_part(effect);
        let eig = h.clone().symmetric_eigen();
        let dim = h.nrows();
        let mut accept = CMatrix::zeros(dim, dim);
        let mut reject = CMatrix::zeros(dim, dim);
        for (k, lambda) in eig.eigenvalues.iter().enumerate() {
            if *lambda < -STATE_TOLERANCE || *lambda > 1.0 + STATE_TOLERANCE {
                return Err(QsimError::IncompleteMeasurement(*lambda));
            }
            let l = lambda.clamp(0.0, 1.0);
            let v = eig.eigenvectors.column(k);
            let proj = v * v.adjoint();
            accept += proj.scale(l.sqrt());
            reject += proj.scale((1.0 - l).sqrt());
        }
        Self::new(vec![accept, reject])
    }

    pub fn operators(&self) -> &[CMatrix] {
        &self.operators
    }

    pub fn num_outcomes(&self) -> usize {
        self.operators.len()
    }

    pub fn dim(&self) -> usize {
        self.operators[0].nrows()
    }

    /// `Tr(M_i ρ M_i†)` for every outcome.
    pub fn probabilities(&self, state: &DensityOperator) -> Result<Vec<f64>, QsimError> {
        state.check_dim(self.dim())?;
        Ok(self
            .operators
            .iter()
            .map(|m| (m * state.matrix() * m.adjoint()).trace().re.max(0.0))
            .collect())
    }

    fn branch(&self, state: &DensityOperator, i: usize, probability: f64) -> Result<MeasurementOutcome, QsimError> {
        let post_state = if probability > DEGENERATE_PROBABILITY {
            let m = &self.operators[i];
            let unnormalized = m * state.matrix() * m.adjoint();
            Some(DensityOperator::new(unnormalized.scale(1.0 / probability))?)
        } else {
            None
        };
        Ok(MeasurementOutcome {
            outcome_index: i,
            probability,
            post_state,
        })
    }
}

/// Result of one measurement branch.
///
/// `post_state` is `None` for degenerate outcomes whose probability is below
/// [`DEGENERATE_PROBABILITY`].
#[derive(Clone, Debug)]
pub struct MeasurementOutcome {
    pub outcome_index: usize,
    pub probability: f64,
    pub post_state: Option<DensityOperator>,
}

impl MeasurementOutcome {
    pub fn is_degenerate(&self) -> bool {
        self.post_state.is_none()
    }
}

/// Sample an outcome with probability `Tr(M_i ρ M_i†)` and return the
/// normalized post-measurement state.
pub fn measure(
    state: &DensityOperator,
    m: &Measurement,
    rng: &mut SeededRng,
) -> Result<MeasurementOutcome, QsimError> {
    let probs = m.probabilities(state)?;
    let i = sample_index(&probs, rng);
    m.branch(state, i, probs[i])
}

/// Every branch of the measurement, in outcome order.
pub fn outcome_distribution(
    state: &DensityOperator,
    m: &Measurement,
) -> Result<Vec<MeasurementOutcome>, QsimError> {
    let probs = m.probabilities(state)?;
    probs
        .iter()
        .enumerate()
        .map(|(i, p)| m.branch(state, i, *p))
        .collect()
}

/// Post-measurement state when the outcome is not revealed: `Σ_i M_i ρ M_i†`.
pub fn unrevealed_mixture(state: &DensityOperator, m: &Measurement) -> Result<DensityOperator, QsimError> {
    state.apply_channel(m.operators())
}

/// Projector `|b⟩⟨b|` onto computational basis state `b` of dimension `dim`.
pub fn basis_projector(dim: usize, b: usize) -> CMatrix {
    let mut p = CMatrix::zeros(dim, dim);
    p[(b, b)] = C64::new(1.0, 0.0);
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::linalg::{ONE, ZERO};
    use crate::qsim::random::{random_density, random_near_certain_measurement};
    use crate::qsim::state::PureState;

    fn plus() -> DensityOperator {
        let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        PureState::from_amplitudes(vec![s, s]).unwrap().to_density().unwrap()
    }

    #[test]
    fn eigenstate_is_undisturbed() {
        let zero = DensityOperator::from_pure(&PureState::basis(1, 0).unwrap()).unwrap();
        let m = Measurement::computational_basis(1);
        let mut rng = SeededRng::new(0);
        for _ in 0..10 {
            let out = measure(&zero, &m, &mut rng).unwrap();
            assert_eq!(out.outcome_index, 0);
            assert!((out.probability - 1.0).abs() < 1e-12);
            assert_eq!(out.post_state.unwrap(), zero);
        }
        let dist = outcome_distribution(&zero, &m).unwrap();
        assert!(dist[1].is_degenerate());
        assert_eq!(dist[1].probability, 0.0);
    }

    #[test]
    fn plus_gives_even_split() {
        let dist = outcome_distribution(&plus(), &Measurement::computational_basis(1)).unwrap();
        // Tr(|i⟩⟨i| ρ |i⟩⟨i|) = |⟨i|+⟩|² = 1/2
        assert!((dist[0].probability - 0.5).abs() < 1e-12);
        assert!((dist[1].probability - 0.5).abs() < 1e-12);
    }

    #[test]
    fn diagonal_mixture_collapses() {
        let rho = DensityOperator::diagonal(&[0.9, 0.1]).unwrap();
        let m = Measurement::new(vec![basis_projector(2, 0), basis_projector(2, 1)]).unwrap();
        let dist = outcome_distribution(&rho, &m).unwrap();
        assert!((dist[0].probability - 0.9).abs() < 1e-12);
        let zero = DensityOperator::from_pure(&PureState::basis(1, 0).unwrap()).unwrap();
        assert_eq!(dist[0].post_state.as_ref().unwrap(), &zero);

        let mut rng = SeededRng::new(17);
        let hits = (0..20_000)
            .filter(|_| measure(&rho, &m, &mut rng).unwrap().outcome_index == 0)
            .count();
        let p = hits as f64 / 20_000.0;
        assert!((p - 0.9).abs() < 3.0 * (0.09f64 / 20_000.0).sqrt() * 1.5);
    }

    #[test]
    fn incomplete_measurement_rejected() {
        let half = linalg::identity(2).scale(0.5);
        assert!(matches!(
            Measurement::new(vec![half.clone(), half]),
            Err(QsimError::IncompleteMeasurement(_))
        ));
        assert!(matches!(Measurement::new(vec![]), Err(QsimError::EmptyMeasurement)));
    }

    #[test]
    fn distribution_sums_to_one_and_mixture_is_a_state() {
        let mut rng = SeededRng::new(21);
        for n in 1..=3 {
            for _ in 0..40 {
                let rho = random_density(n, 2, &mut rng);
                let m = random_near_certain_measurement(&rho, 0.3, &mut rng);
                let total: f64 = outcome_distribution(&rho, &m)
                    .unwrap()
                    .iter()
                    .map(|o| o.probability)
                    .sum();
                assert!((total - 1.0).abs() < 1e-9);
                unrevealed_mixture(&rho, &m).unwrap();
            }
        }
    }

    #[test]
    fn effect_construction_is_complete() {
        let e = CMatrix::from_row_slice(2, 2, &[C64::new(0.7, 0.0), C64::new(0.1, 0.1), C64::new(0.1, -0.1), C64::new(0.4, 0.0)]);
        let m = Measurement::from_effect(&e).unwrap();
        let acc = &m.operators()[0];
        let back = acc.adjoint() * acc;
        assert!((back - e).iter().all(|z| z.norm() < 1e-12));
        let _ = (ONE, ZERO);
    }
}
