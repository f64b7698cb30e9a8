use super::linalg::{self, CMatrix, C64};
use super::state::PureState;
use super::{QsimError, MAX_MIXED_QUBITS, STATE_TOLERANCE};

/// A density operator: Hermitian, positive semidefinite, unit trace.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator {
    num_qubits: usize,
    matrix: CMatrix,
}

impl DensityOperator {
    /// Validates every invariant. The matrix is stored after symmetrizing to
    /// its Hermitian part, which removes rounding-level asymmetry.
    pub fn new(matrix: CMatrix) -> Result<Self, QsimError> {
        let num_qubits = check_square_power_of_two(&matrix)?;
        if num_qubits > MAX_MIXED_QUBITS {
            return Err(QsimError::TooManyQubits {
                requested: num_qubits,
                cap: MAX_MIXED_QUBITS,
            });
        }
        let defect = linalg::hermiticity_defect(&matrix);
        if defect > STATE_TOLERANCE {
            return Err(QsimError::NotHermitian(defect));
        }
        let matrix = linalg::hermitian_part(&matrix);
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > STATE_TOLERANCE || tr.im.abs() > STATE_TOLERANCE {
            return Err(QsimError::BadTrace(tr.re));
        }
        let min_eig = linalg::hermitian_eigenvalues(&matrix)
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        if min_eig < -STATE_TOLERANCE {
            return Err(QsimError::NotPositive(min_eig));
        }
        Ok(Self { num_qubits, matrix })
    }

    pub fn from_pure(state: &PureState) -> Result<Self, QsimError> {
        if state.num_qubits() > MAX_MIXED_QUBITS {
            return Err(QsimError::TooManyQubits {
                requested: state.num_qubits(),
                cap: MAX_MIXED_QUBITS,
            });
        }
        let v = nalgebra::DVector::from_column_slice(state.amplitudes());
        Ok(Self {
            num_qubits: state.num_qubits(),
            matrix: &v * v.adjoint(),
        })
    }

    /// Diagonal state with the given basis-state probabilities.
    pub fn diagonal(probs: &[f64]) -> Result<Self, QsimError> {
        let d = nalgebra::DVector::from_iterator(probs.len(), probs.iter().map(|p| C64::new(*p, 0.0)));
        Self::new(CMatrix::from_diagonal(&d))
    }

    pub fn maximally_mixed(num_qubits: usize) -> Result<Self, QsimError> {
        let dim = 1usize << num_qubits;
        Self::new(linalg::identity(dim).scale(1.0 / dim as f64))
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    pub fn check_dim(&self, dim: usize) -> Result<(), QsimError> {
        if dim != self.dim() {
            return Err(QsimError::DimensionMismatch {
                expected: self.dim(),
                found: dim,
            });
        }
        Ok(())
    }

    /// `U ρ U†`.
    pub fn conjugate(&self, u: &CMatrix) -> Result<Self, QsimError> {
        self.check_dim(u.nrows())?;
        Self::new(u * &self.matrix * u.adjoint())
    }

    /// Apply the channel with Kraus operators `kraus`.
    pub fn apply_channel(&self, kraus: &[CMatrix]) -> Result<Self, QsimError> {
        let mut out = CMatrix::zeros(self.dim(), self.dim());
        for k in kraus {
            self.check_dim(k.ncols())?;
            out += k * &self.matrix * k.adjoint();
        }
        Self::new(out)
    }

    /// `Tr(O ρ)` for a Hermitian observable.
    pub fn expectation(&self, observable: &CMatrix) -> Result<f64, QsimError> {
        self.check_dim(observable.nrows())?;
        Ok((observable * &self.matrix).trace().re)
    }
}

fn check_square_power_of_two(m: &CMatrix) -> Result<usize, QsimError> {
    if m.nrows() != m.ncols() {
        return Err(QsimError::DimensionMismatch {
            expected: m.nrows(),
            found: m.ncols(),
        });
    }
    let dim = m.nrows();
    if dim == 0 || !dim.is_power_of_two() {
        return Err(QsimError::DimensionMismatch {
            expected: dim.next_power_of_two().max(1),
            found: dim,
        });
    }
    Ok(dim.trailing_zeros() as usize)
}

/// Normalized trace distance `½ Tr√((ρ−σ)²)`, computed from the eigenvalues of
/// the Hermitian difference.
pub fn trace_distance(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64, QsimError> {
    rho.check_dim(sigma.dim())?;
    Ok(hermitian_distance(rho.matrix(), sigma.matrix()))
}

/// Trace distance between two Hermitian matrices that need not be valid
/// states, e.g. tomographic estimates.
pub fn hermitian_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    (0.5 * linalg::hermitian_trace_norm(&(a - b))).min(1.0)
}

/// `√(1 − |⟨ψ|φ⟩|²)`, the trace distance between two pure states.
pub fn pure_trace_distance(psi: &PureState, phi: &PureState) -> Result<f64, QsimError> {
    let overlap = psi.inner(phi)?.norm_sqr();
    Ok((1.0 - overlap).max(0.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::linalg::{ONE, ZERO};
    use crate::qsim::oracle_linalg::jacobi_trace_norm;
    use crate::qsim::random::{random_density, random_pure_state, random_unitary};
    use crate::rng::SeededRng;

    fn ket(v: &[C64]) -> DensityOperator {
        DensityOperator::from_pure(&PureState::from_amplitudes(v.to_vec()).unwrap()).unwrap()
    }

    #[test]
    fn identical_and_orthogonal() {
        let zero = ket(&[ONE, ZERO]);
        let one = ket(&[ZERO, ONE]);
        assert_eq!(trace_distance(&zero, &zero).unwrap(), 0.0);
        assert!((trace_distance(&zero, &one).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    #[allow(clippy::approx_constant)]
    fn zero_vs_plus_matches_independent_oracle() {
        let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let zero = ket(&[ONE, ZERO]);
        let plus = ket(&[s, s]);
        // Frozen from the Jacobi eigen-solver on the real embedding of ρ−σ.
        let oracle = 0.5 * jacobi_trace_norm(&(zero.matrix() - plus.matrix()));
        assert!((oracle - 0.707_106_781_186_547_6).abs() < 1e-12);
        let d = trace_distance(&zero, &plus).unwrap();
        assert!((d - 0.707_106_781_186_547_6).abs() < 1e-9);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let a = DensityOperator::maximally_mixed(1).unwrap();
        let b = DensityOperator::maximally_mixed(2).unwrap();
        assert!(matches!(
            trace_distance(&a, &b),
            Err(QsimError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn validation_rejects_bad_operators() {
        let not_psd = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            C64::new(1.5, 0.0),
            C64::new(-0.5, 0.0),
        ]));
        assert!(matches!(DensityOperator::new(not_psd), Err(QsimError::NotPositive(_))));
        let bad_trace = linalg::identity(2);
        assert!(matches!(DensityOperator::new(bad_trace), Err(QsimError::BadTrace(_))));
        let mut not_herm = linalg::identity(2).scale(0.5);
        not_herm[(0, 1)] = C64::new(0.1, 0.0);
        assert!(matches!(DensityOperator::new(not_herm), Err(QsimError::NotHermitian(_))));
        assert!(matches!(
            DensityOperator::maximally_mixed(7),
            Err(QsimError::TooManyQubits { .. })
        ));
    }

    #[test]
    fn agrees_with_oracle_on_random_mixed_pairs() {
        let mut rng = SeededRng::new(11);
        for n in 1..=3 {
            for _ in 0..30 {
                let a = random_density(n, 1 << n, &mut rng);
                let b = random_density(n, 2, &mut rng);
                let fast = trace_distance(&a, &b).unwrap();
                let slow = 0.5 * jacobi_trace_norm(&(a.matrix() - b.matrix()));
                assert!((fast - slow).abs() < 1e-9, "{fast} vs {slow}");
            }
        }
    }

    #[test]
    fn pure_closed_form_on_random_pairs() {
        let mut rng = SeededRng::new(3);
        for n in 1..=4 {
            for _ in 0..50 {
                let psi = random_pure_state(n, &mut rng);
                let phi = random_pure_state(n, &mut rng);
                let d = trace_distance(&psi.to_density().unwrap(), &phi.to_density().unwrap()).unwrap();
                let closed = pure_trace_distance(&psi, &phi).unwrap();
                assert!((d - closed).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn unitary_channels_preserve_and_symmetry_holds() {
        let mut rng = SeededRng::new(5);
        let a = random_density(2, 4, &mut rng);
        let b = random_density(2, 1, &mut rng);
        let u = random_unitary(4, &mut rng);
        let d0 = trace_distance(&a, &b).unwrap();
        let d1 = trace_distance(&a.conjugate(&u).unwrap(), &b.conjugate(&u).unwrap()).unwrap();
        assert!((d0 - d1).abs() < 1e-9);
        assert!((d0 - trace_distance(&b, &a).unwrap()).abs() < 1e-12);
    }
}
