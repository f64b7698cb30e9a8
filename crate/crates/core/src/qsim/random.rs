//! Samplers for random states, unitaries and measurements.

use super::density::DensityOperator;
use super::linalg::{self, CMatrix, C64};
use super::measurement::Measurement;
use super::state::PureState;
use crate::rng::SeededRng;

/// Standard complex Gaussian with `E|z|² = 1`.
pub fn complex_gaussian(rng: &mut SeededRng) -> C64 {
    // Box-Muller
    let u1 = 1.0 - rng.unit();
    let u2 = rng.unit();
    let r = (-u1.ln()).sqrt();
    let phi = 2.0 * std::f64::consts::PI * u2;
    C64::new(r * phi.cos(), r * phi.sin())
}

fn ginibre(rows: usize, cols: usize, rng: &mut SeededRng) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

/// Haar-random pure state on `n` qubits.
pub fn random_pure_state(n: usize, rng: &mut SeededRng) -> PureState {
    let dim = 1usize << n;
    let v: Vec<C64> = (0..dim).map(|_| complex_gaussian(rng)).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    PureState::from_amplitudes(v.into_iter().map(|z| z / norm).collect()).expect("normalized")
}

/// Random density operator `GG†/Tr(GG†)` with `G` a `2^n × rank` Ginibre matrix.
pub fn random_density(n: usize, rank: usize, rng: &mut SeededRng) -> DensityOperator {
    let g = ginibre(1 << n, rank.max(1), rng);
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    DensityOperator::new(m.scale(1.0 / tr)).expect("Ginibre construction is a state")
}

/// Haar-random unitary of dimension `dim`.
pub fn random_unitary(dim: usize, rng: &mut SeededRng) -> CMatrix {
    let g = ginibre(dim, dim, rng);
    let mut cols: Vec<nalgebra::DVector<C64>> = Vec::with_capacity(dim);
    for c in 0..dim {
        let mut v = g.column(c).into_owned();
        for _ in 0..2 {
            for b in &cols {
                let proj = b.dotc(&v);
                v -= b * proj;
            }
        }
        let norm = v.norm();
        cols.push(v / C64::new(norm, 0.0));
    }
    CMatrix::from_columns(&cols)
}

/// Random positive operator with operator norm exactly 1.
fn random_unit_norm_psd(dim: usize, rng: &mut SeededRng) -> CMatrix {
    let rank = 1 + rng.below(dim as u64) as usize;
    let g = ginibre(dim, rank, rng);
    let m = linalg::hermitian_part(&(&g * g.adjoint()));
    let top = linalg::hermitian_operator_norm(&m);
    m.scale(1.0 / top)
}

/// Two-outcome measurement `(U√E, U′√(I−E))` whose outcome 0 has probability
/// at least `1 − eps` on `rho`.
///
/// The rejection weight is drawn from `(0, eps]`, hitting `eps` exactly about
/// a quarter of the time so the bound is probed at its edge.
pub fn random_near_certain_measurement(rho: &DensityOperator, eps: f64, rng: &mut SeededRng) -> Measurement {
    let dim = rho.dim();
    let g = random_unit_norm_psd(dim, rng);
    let weight = rho.expectation(&g).expect("dimensions match").max(1e-300);
    let target = if rng.chance(0.25) { eps } else { eps * rng.unit() };
    let t = (target / weight).min(1.0);
    let effect = linalg::identity(dim) - g.scale(t);
    let two = Measurement::from_effect(&effect).expect("0 ≤ E ≤ I");
    let u0 = random_unitary(dim, rng);
    let u1 = random_unitary(dim, rng);
    let ops = two.operators();
    Measurement::new(vec![&u0 * &ops[0], &u1 * &ops[1]]).expect("unitary rotation keeps completeness")
}

/// Kraus operators of a random channel with `count` operators, taken as
/// blocks of a random isometry.
pub fn random_channel(dim: usize, count: usize, rng: &mut SeededRng) -> Vec<CMatrix> {
    let u = random_unitary(dim * count, rng);
    (0..count)
        .map(|k| u.view((k * dim, 0), (dim, dim)).into_owned())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn samplers_satisfy_invariants() {
        let mut rng = SeededRng::new(1);
        let u = random_unitary(8, &mut rng);
        assert!((&u.adjoint() * &u - linalg::identity(8)).iter().all(|z| z.norm() < 1e-12));
        let rho = random_density(3, 2, &mut rng);
        for eps in [0.01, 0.2] {
            for _ in 0..50 {
                let m = random_near_certain_measurement(&rho, eps, &mut rng);
                assert!(m.probabilities(&rho).unwrap()[0] >= 1.0 - eps - 1e-12);
            }
        }
        let kraus = random_channel(4, 3, &mut rng);
        let sum = kraus.iter().fold(CMatrix::zeros(4, 4), |acc, k| acc + k.adjoint() * k);
        assert!((sum - linalg::identity(4)).iter().all(|z| z.norm() < 1e-12));
    }
}
