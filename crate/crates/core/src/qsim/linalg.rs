//! Dense complex linear algebra helpers shared by the simulator.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Eigenvalues below this magnitude are treated as exact zeros.
pub const EIGEN_CLAMP: f64 = 1e-12;

pub fn identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

pub fn dagger(m: &CMatrix) -> CMatrix {
    m.adjoint()
}

/// `(m + m†) / 2`.
pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Largest entrywise deviation `|m_ij - conj(m_ji)|`.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Real eigenvalues of a Hermitian matrix (only its Hermitian part is used).
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let h = hermitian_part(m);
    h.symmetric_eigenvalues().iter().copied().collect()
}

/// Trace norm `Tr|h|` of a Hermitian matrix, with tiny eigenvalues clamped to zero.
pub fn hermitian_trace_norm(h: &CMatrix) -> f64 {
    hermitian_eigenvalues(h)
        .into_iter()
        .filter(|l| l.abs() >= EIGEN_CLAMP)
        .map(f64::abs)
        .sum()
}

/// Operator (spectral) norm of a Hermitian matrix.
pub fn hermitian_operator_norm(h: &CMatrix) -> f64 {
    hermitian_eigenvalues(h)
        .into_iter()
        .map(f64::abs)
        .fold(0.0, f64::max)
}

pub fn trace(m: &CMatrix) -> C64 {
    m.trace()
}

/// Extend a matrix with orthonormal columns to a square unitary whose leading
/// columns are exactly those of `isometry`.
///
/// Missing columns are obtained by Gram-Schmidt over the standard basis, so the
/// completion is a fixed function of `isometry`.
pub fn complete_to_unitary(isometry: &CMatrix) -> CMatrix {
    let rows = isometry.nrows();
    let cols = isometry.ncols();
    assert!(cols <= rows, "isometry has more columns than rows");
    let mut basis: Vec<Vec<C64>> = (0..cols)
        .map(|c| isometry.column(c).iter().copied().collect())
        .collect();

    for e in 0..rows {
        if basis.len() == rows {
            break;
        }
        let mut v = vec![ZERO; rows];
        v[e] = ONE;
        // two passes of modified Gram-Schmidt
        for _ in 0..2 {
            for b in &basis {
                let proj: C64 = b.iter().zip(&v).map(|(bi, vi)| bi.conj() * vi).sum();
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi -= proj * bi;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            for vi in &mut v {
                *vi /= norm;
            }
            basis.push(v);
        }
    }
    assert_eq!(basis.len(), rows, "failed to complete the unitary");
    CMatrix::from_fn(rows, rows, |r, c| basis[c][r])
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}
