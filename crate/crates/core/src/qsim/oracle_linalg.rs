//! Independent reference linear algebra for tests: cyclic Jacobi on the real
//! symmetric embedding of a Hermitian matrix.

use super::linalg::CMatrix;

/// Eigenvalues of the real symmetric matrix `a` (row-major, `n × n`).
pub fn jacobi_eigenvalues(mut a: Vec<f64>, n: usize) -> Vec<f64> {
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |j| *j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j] * a[i * n + j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[i * n + i]).collect()
}

/// `Tr|h|` for Hermitian `h`. The embedding `[[A, −B], [B, A]]` of `A + iB`
/// repeats every eigenvalue twice.
pub fn jacobi_trace_norm(h: &CMatrix) -> f64 {
    let d = h.nrows();
    let n = 2 * d;
    let mut a = vec![0.0; n * n];
    for i in 0..d {
        for j in 0..d {
            let z = h[(i, j)];
            a[i * n + j] = z.re;
            a[(i + d) * n + (j + d)] = z.re;
            a[i * n + (j + d)] = -z.im;
            a[(i + d) * n + j] = z.im;
        }
    }
    jacobi_eigenvalues(a, n).iter().map(|l| l.abs()).sum::<f64>() / 2.0
}

#[test]
fn jacobi_diagonalizes_a_known_matrix() {
    // [[2, 1], [1, 2]] has eigenvalues 1 and 3
    let mut e = jacobi_eigenvalues(vec![2.0, 1.0, 1.0, 2.0], 2);
    e.sort_by(f64::total_cmp);
    assert!((e[0] - 1.0).abs() < 1e-14 && (e[1] - 3.0).abs() < 1e-14);
}
