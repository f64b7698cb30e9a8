//! Pauli tomography and the disturbance of chained evaluations.

use serde::{Deserialize, Serialize};

use crate::oracle::FixedFunctionOracle;
use crate::par::map_trials;
use crate::qsim::linalg::{kron, ONE, ZERO};
use crate::qsim::state::{hadamard, rotation_y, sample_index};
use crate::qsim::{hermitian_distance, CMatrix, DensityOperator, Gate1, PureState, C64};
use crate::rng::SeededRng;
use crate::schemes::{cp, eval, ConjugateScheme, CopyProtectionScheme, SchemeError, TruthTable};

use super::HarnessError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn matrix(self) -> CMatrix {
        let i = C64::new(0.0, 1.0);
        let entries = match self {
            Pauli::I => [ONE, ZERO, ZERO, ONE],
            Pauli::X => [ZERO, ONE, ONE, ZERO],
            Pauli::Y => [ZERO, -i, i, ZERO],
            Pauli::Z => [ONE, ZERO, ZERO, -ONE],
        };
        CMatrix::from_row_slice(2, 2, &entries)
    }
}

/// Number of measurement settings `3^n`.
pub fn setting_count(n: usize) -> usize {
    3usize.pow(n as u32)
}

/// Axes of setting `s`, read as base-3 digits with qubit 0 most significant.
pub fn measurement_setting(n: usize, s: usize) -> Vec<Pauli> {
    (0..n)
        .map(|q| match (s / 3usize.pow((n - 1 - q) as u32)) % 3 {
            0 => Pauli::X,
            1 => Pauli::Y,
            _ => Pauli::Z,
        })
        .collect()
}

fn s_dagger() -> Gate1 {
    [[ONE, ZERO], [ZERO, C64::new(0.0, -1.0)]]
}

/// Outcome distribution of measuring every qubit along its axis, without
/// disturbing `state`.
pub fn setting_probabilities(state: &PureState, axes: &[Pauli]) -> Vec<f64> {
    let mut s = state.clone();
    for (q, axis) in axes.iter().enumerate() {
        match axis {
            Pauli::X => s.apply_gate(q, &hadamard()),
            Pauli::Y => {
                s.apply_gate(q, &s_dagger());
                s.apply_gate(q, &hadamard());
            }
            Pauli::I | Pauli::Z => {}
        }
    }
    s.amplitudes().iter().map(|a| a.norm_sqr()).collect()
}

/// Linear-inversion estimate `2^{-n} Σ_P ⟨P⟩ P` from outcome counts per
/// setting. Each `⟨P⟩` pools every setting that agrees with `P` off its
/// identity factors. The estimate is Hermitian with unit trace but need not
/// be positive.
pub fn pauli_tomography(n: usize, counts: &[Vec<u64>]) -> CMatrix {
    assert_eq!(counts.len(), setting_count(n), "one count vector per setting");
    let dim = 1usize << n;
    let settings: Vec<Vec<Pauli>> = (0..counts.len()).map(|s| measurement_setting(n, s)).collect();
    let mut rho = CMatrix::zeros(dim, dim);
    for p in 0..4usize.pow(n as u32) {
        let paulis: Vec<Pauli> = (0..n)
            .map(|q| [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z][(p >> (2 * (n - 1 - q))) & 3])
            .collect();
        let support: Vec<usize> = (0..n).filter(|q| paulis[*q] != Pauli::I).collect();
        let mut sum = 0.0;
        let mut shots = 0u64;
        for (axes, c) in settings.iter().zip(counts) {
            if support.iter().any(|q| axes[*q] != paulis[*q]) {
                continue;
            }
            for (outcome, k) in c.iter().enumerate() {
                let parity = support.iter().filter(|q| (outcome >> (n - 1 - **q)) & 1 == 1).count();
                sum += if parity % 2 == 0 { *k as f64 } else { -(*k as f64) };
                shots += k;
            }
        }
        if shots == 0 {
            continue;
        }
        let matrix = paulis
            .iter()
            .skip(1)
            .fold(paulis[0].matrix(), |acc, q| kron(&acc, &q.matrix()));
        rho += matrix.scale(sum / shots as f64);
    }
    rho.scale(1.0 / dim as f64)
}

#[derive(Clone, Debug)]
pub struct DecaySettings {
    pub scheme: ConjugateScheme,
    pub max_k: usize,
    /// Shots per Pauli setting.
    pub shots: u64,
    pub seed: u64,
}

/// Distance between the fresh key register and its state after `k` chained
/// evaluations on uniform inputs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayPoint {
    pub k: usize,
    pub epsilon: f64,
    /// From the tomographic estimate.
    pub observed: f64,
    /// From the exact evaluation channel.
    pub exact: f64,
    /// `k√ε`.
    pub bound: f64,
}

impl DecayPoint {
    pub fn within(&self) -> bool {
        self.observed <= self.bound
    }
}

/// Kraus operators of one evaluation acting on the key register, averaged
/// over inputs, readout flips and query outcomes.
fn evaluation_channel(scheme: &ConjugateScheme, bases: &[bool]) -> Result<Vec<CMatrix>, HarnessError> {
    let n = scheme.key_qubits;
    (0..1usize << n)
        .map(|b| {
            let mut v = PureState::basis(n, b)?;
            v.apply_gate(0, &rotation_y(-scheme.tilt()));
            for (q, h) in bases.iter().enumerate() {
                if *h {
                    v.apply_gate(q, &hadamard());
                }
            }
            let col = CMatrix::from_column_slice(1 << n, 1, v.amplitudes());
            Ok(&col * col.adjoint())
        })
        .collect()
}

/// Fix `d_f`, the oracle and one CP output, then run one independent chain
/// per shot. At every `k` each chain contributes a single tomography outcome
/// drawn from its current state without collapsing it.
pub fn reusability_decay(settings: &DecaySettings) -> Result<Vec<DecayPoint>, HarnessError> {
    let scheme = &settings.scheme;
    let n = scheme.key_qubits;
    let p = scheme.params();
    let mut rng = SeededRng::new(settings.seed);
    let f = scheme.sample_function(&mut rng);
    let table = TruthTable::random(p.oracle_in_len, p.oracle_out_len, &mut rng);
    let oracle = FixedFunctionOracle::from_table(p.oracle_in_len, p.oracle_out_len, table.values);
    let fresh = cp(scheme, &f, &mut oracle.clone(), &mut rng)?;
    let chain_seed = rand::RngCore::next_u64(&mut rng);

    let register = fresh.quantum.as_ref().ok_or(SchemeError::Malformed("missing key register"))?;
    let rho0 = register.state().to_density()?;

    let settings_n = setting_count(n);
    let chains = map_trials(chain_seed, settings_n as u64 * settings.shots, |i, rng| {
        let axes = measurement_setting(n, (i / settings.shots) as usize);
        let mut o = oracle.clone();
        let mut state = fresh.clone();
        let mut outcomes = Vec::with_capacity(settings.max_k);
        for _ in 0..settings.max_k {
            let x = scheme.sample_input(rng);
            state = eval(scheme, state, &x, &mut o, rng)?.0;
            let key = state.quantum.as_ref().ok_or(SchemeError::Malformed("missing key register"))?;
            outcomes.push(sample_index(&setting_probabilities(key.state(), &axes), rng));
        }
        Ok::<_, SchemeError>(outcomes)
    });

    let mut counts = vec![vec![vec![0u64; 1 << n]; settings_n]; settings.max_k];
    for (i, chain) in chains.into_iter().enumerate() {
        let s = i / settings.shots as usize;
        for (k, outcome) in chain?.into_iter().enumerate() {
            counts[k][s][outcome] += 1;
        }
    }

    let kraus = evaluation_channel(scheme, &fresh.classical.bases)?;
    let mut exact = rho0.clone();
    let eps = scheme.disturbance;
    let mut points = Vec::with_capacity(settings.max_k);
    for (k, c) in counts.iter().enumerate() {
        exact = exact.apply_channel(&kraus)?;
        points.push(DecayPoint {
            k: k + 1,
            epsilon: eps,
            observed: hermitian_distance(rho0.matrix(), &pauli_tomography(n, c)),
            exact: hermitian_distance(rho0.matrix(), exact.matrix()),
            bound: (k + 1) as f64 * eps.sqrt(),
        });
    }
    Ok(points)
}

/// Exact `k`-fold evaluated key state, for callers that want the whole
/// trajectory rather than distances.
pub fn exact_decay(scheme: &ConjugateScheme, fresh: &PureState, bases: &[bool], k: usize) -> Result<DensityOperator, HarnessError> {
    let kraus = evaluation_channel(scheme, bases)?;
    let mut rho = fresh.to_density()?;
    for _ in 0..k {
        rho = rho.apply_channel(&kraus)?;
    }
    Ok(rho)
}
