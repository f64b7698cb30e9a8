use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::density::DensityOperator;
use super::linalg::{CMatrix, C64, ONE, ZERO};
use super::{QsimError, MAX_PURE_QUBITS, STATE_TOLERANCE};
use crate::rng::SeededRng;

/// A contiguous range of qubits `[start, start + len)`.
///
/// Qubit `start` is the most significant bit of the register value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Register {
    pub start: usize,
    pub len: usize,
}

impl Register {
    pub fn new(start: usize, len: usize) -> Self {
        Self { start, len }
    }

    pub fn end(&self) -> usize {
        self.start + self.len
    }

    pub fn overlaps(&self, other: &Register) -> bool {
        self.start < other.end() && other.start < self.end()
    }

    fn shift(&self, num_qubits: usize) -> usize {
        num_qubits - self.end()
    }

    fn mask(&self) -> usize {
        (1usize << self.len) - 1
    }

    /// Value held by this register in computational basis index `index`.
    pub fn value_in(&self, index: usize, num_qubits: usize) -> usize {
        (index >> self.shift(num_qubits)) & self.mask()
    }

    /// `index` with this register XORed by `value`.
    pub fn xor_into(&self, index: usize, value: usize, num_qubits: usize) -> usize {
        index ^ ((value & self.mask()) << self.shift(num_qubits))
    }
}

pub type Gate1 = [[C64; 2]; 2];

pub fn hadamard() -> Gate1 {
    let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    [[s, s], [s, -s]]
}

pub fn pauli_x() -> Gate1 {
    [[ZERO, ONE], [ONE, ZERO]]
}

/// Rotation `exp(-i θ Y / 2)`.
pub fn rotation_y(theta: f64) -> Gate1 {
    let (s, c) = (theta / 2.0).sin_cos();
    [[C64::new(c, 0.0), C64::new(-s, 0.0)], [C64::new(s, 0.0), C64::new(c, 0.0)]]
}

/// A normalized state vector over `num_qubits` qubits.
///
/// Basis index bit `num_qubits - 1 - q` holds qubit `q`, so qubit 0 is the
/// leftmost tensor factor.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    num_qubits: usize,
    amps: Vec<C64>,
}

impl PureState {
    pub fn basis(num_qubits: usize, index: usize) -> Result<Self, QsimError> {
        check_pure_cap(num_qubits)?;
        let dim = 1usize << num_qubits;
        if index >= dim {
            return Err(QsimError::DimensionMismatch {
                expected: dim,
                found: index,
            });
        }
        let mut amps = vec![ZERO; dim];
        amps[index] = ONE;
        Ok(Self { num_qubits, amps })
    }

    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Self, QsimError> {
        let dim = amps.len();
        if dim == 0 || !dim.is_power_of_two() {
            return Err(QsimError::DimensionMismatch {
                expected: dim.next_power_of_two().max(1),
                found: dim,
            });
        }
        let num_qubits = dim.trailing_zeros() as usize;
        check_pure_cap(num_qubits)?;
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > STATE_TOLERANCE {
            return Err(QsimError::NotNormalized(norm));
        }
        Ok(Self { num_qubits, amps })
    }

    /// Tensor product of single-qubit states `(α, β)`, each normalized.
    pub fn product(qubits: &[[C64; 2]]) -> Result<Self, QsimError> {
        let mut amps = vec![ONE];
        for q in qubits {
            let norm = (q[0].norm_sqr() + q[1].norm_sqr()).sqrt();
            if (norm - 1.0).abs() > STATE_TOLERANCE {
                return Err(QsimError::NotNormalized(norm));
            }
            amps = amps
                .iter()
                .flat_map(|a| [a * q[0], a * q[1]])
                .collect();
        }
        Self::from_amplitudes(amps)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &PureState) -> Result<C64, QsimError> {
        self.check_same_dim(other.dim())?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    fn check_same_dim(&self, dim: usize) -> Result<(), QsimError> {
        if dim != self.dim() {
            return Err(QsimError::DimensionMismatch {
                expected: self.dim(),
                found: dim,
            });
        }
        Ok(())
    }

    pub fn check_register(&self, reg: Register) -> Result<(), QsimError> {
        if reg.len == 0 || reg.end() > self.num_qubits {
            return Err(QsimError::InvalidRegister {
                start: reg.start,
                len: reg.len,
                num_qubits: self.num_qubits,
            });
        }
        Ok(())
    }

    pub fn apply_gate(&mut self, qubit: usize, g: &Gate1) {
        assert!(qubit < self.num_qubits, "qubit {qubit} out of range");
        let stride = 1usize << (self.num_qubits - 1 - qubit);
        let dim = self.amps.len();
        let mut base = 0;
        while base < dim {
            for i in base..base + stride {
                let a0 = self.amps[i];
                let a1 = self.amps[i + stride];
                self.amps[i] = g[0][0] * a0 + g[0][1] * a1;
                self.amps[i + stride] = g[1][0] * a0 + g[1][1] * a1;
            }
            base += 2 * stride;
        }
    }

    pub fn apply_x(&mut self, qubit: usize) {
        assert!(qubit < self.num_qubits, "qubit {qubit} out of range");
        let stride = 1usize << (self.num_qubits - 1 - qubit);
        for i in 0..self.amps.len() {
            if i & stride == 0 {
                self.amps.swap(i, i | stride);
            }
        }
    }

    /// Apply a full-dimension unitary matrix.
    pub fn apply_matrix(&mut self, u: &CMatrix) -> Result<(), QsimError> {
        self.check_same_dim(u.nrows())?;
        let v = nalgebra::DVector::from_column_slice(&self.amps);
        let out = u * v;
        self.amps = out.iter().copied().collect();
        Ok(())
    }

    /// `self ⊗ other`.
    pub fn tensor(&self, other: &PureState) -> Result<PureState, QsimError> {
        check_pure_cap(self.num_qubits + other.num_qubits)?;
        let amps = self
            .amps
            .iter()
            .flat_map(|a| other.amps.iter().map(move |b| a * b))
            .collect();
        Ok(PureState {
            num_qubits: self.num_qubits + other.num_qubits,
            amps,
        })
    }

    /// Append `count` qubits in `|0⟩`.
    pub fn extend_zeros(&self, count: usize) -> Result<PureState, QsimError> {
        self.tensor(&PureState::basis(count, 0)?)
    }

    /// Outcome distribution of a computational-basis measurement of `reg`.
    pub fn register_probabilities(&self, reg: Register) -> Result<Vec<f64>, QsimError> {
        self.check_register(reg)?;
        let mut probs = vec![0.0; 1 << reg.len];
        for (i, a) in self.amps.iter().enumerate() {
            probs[reg.value_in(i, self.num_qubits)] += a.norm_sqr();
        }
        Ok(probs)
    }

    /// Projectively measure `reg` in the computational basis.
    pub fn measure_register(
        &self,
        reg: Register,
        rng: &mut SeededRng,
    ) -> Result<(usize, PureState), QsimError> {
        let probs = self.register_probabilities(reg)?;
        let value = sample_index(&probs, rng);
        Ok((value, self.collapse(reg, value, probs[value])))
    }

    pub(crate) fn collapse(&self, reg: Register, value: usize, prob: f64) -> PureState {
        let scale = 1.0 / prob.sqrt();
        let amps = self
            .amps
            .iter()
            .enumerate()
            .map(|(i, a)| {
                if reg.value_in(i, self.num_qubits) == value {
                    a * scale
                } else {
                    ZERO
                }
            })
            .collect();
        PureState {
            num_qubits: self.num_qubits,
            amps,
        }
    }

    /// Remove the trailing `count` qubits, which must be in a computational basis
    /// state; returns the remaining state and the removed register's value.
    pub fn detach_basis_suffix(&self, count: usize) -> Result<(PureState, usize), QsimError> {
        if count == 0 || count >= self.num_qubits {
            return Err(QsimError::InvalidRegister {
                start: self.num_qubits.saturating_sub(count),
                len: count,
                num_qubits: self.num_qubits,
            });
        }
        let reg = Register::new(self.num_qubits - count, count);
        let probs = self.register_probabilities(reg)?;
        let (value, p) = probs
            .iter()
            .copied()
            .enumerate()
            .fold((0, -1.0), |best, (v, p)| if p > best.1 { (v, p) } else { best });
        if (p - 1.0).abs() > STATE_TOLERANCE {
            return Err(QsimError::NotProduct);
        }
        let sub_dim = 1usize << count;
        let amps = (0..self.dim() / sub_dim)
            .map(|hi| self.amps[hi * sub_dim + value])
            .collect();
        Ok((PureState::from_amplitudes(amps)?, value))
    }

    /// Split into `(first at qubits, rest)` when the state is a product across
    /// that cut.
    pub fn split_product(&self, at: usize) -> Result<(PureState, PureState), QsimError> {
        if at == 0 || at >= self.num_qubits {
            return Err(QsimError::InvalidRegister {
                start: 0,
                len: at,
                num_qubits: self.num_qubits,
            });
        }
        let cols = 1usize << (self.num_qubits - at);
        let rows = self.dim() / cols;
        // pick the largest entry as pivot of the rank-one factorization
        let (pivot, _) = self
            .amps
            .iter()
            .enumerate()
            .fold((0, -1.0), |best, (i, a)| {
                if a.norm_sqr() > best.1 {
                    (i, a.norm_sqr())
                } else {
                    best
                }
            });
        let (pr, pc) = (pivot / cols, pivot % cols);
        let mut left: Vec<C64> = (0..rows).map(|r| self.amps[r * cols + pc]).collect();
        let mut right: Vec<C64> = (0..cols).map(|c| self.amps[pr * cols + c]).collect();
        let ln = left.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        let rn = right.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        left.iter_mut().for_each(|a| *a /= ln);
        right.iter_mut().for_each(|a| *a /= rn);
        // fix the global phase so left ⊗ right reproduces self
        let phase = self.amps[pivot] / (left[pr] * right[pc]);
        let phase = phase / phase.norm();
        left.iter_mut().for_each(|a| *a *= phase);
        let a = PureState::from_amplitudes(left)?;
        let b = PureState::from_amplitudes(right)?;
        let recon = a.tensor(&b)?;
        let err: f64 = recon
            .amps
            .iter()
            .zip(&self.amps)
            .map(|(x, y)| (x - y).norm_sqr())
            .sum::<f64>()
            .sqrt();
        if err > 1e-7 {
            return Err(QsimError::NotProduct);
        }
        Ok((a, b))
    }

    pub fn to_density(&self) -> Result<DensityOperator, QsimError> {
        DensityOperator::from_pure(self)
    }
}

fn check_pure_cap(num_qubits: usize) -> Result<(), QsimError> {
    if num_qubits > MAX_PURE_QUBITS {
        return Err(QsimError::TooManyQubits {
            requested: num_qubits,
            cap: MAX_PURE_QUBITS,
        });
    }
    Ok(())
}

/// Sample an index from a (numerically) normalized probability vector.
pub(crate) fn sample_index(probs: &[f64], rng: &mut SeededRng) -> usize {
    let total: f64 = probs.iter().sum();
    let u = rng.unit() * total;
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (i, p) in probs.iter().enumerate() {
        if *p > 0.0 {
            last_positive = i;
        }
        acc += p;
        if u < acc {
            return i;
        }
    }
    last_positive
}

impl Serialize for PureState {
    /// Amplitudes as `[re, im]` pairs.
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            num_qubits: usize,
            amplitudes: Vec<[f64; 2]>,
        }
        Repr {
            num_qubits: self.num_qubits,
            amplitudes: self.amps.iter().map(|a| [a.re, a.im]).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PureState {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            num_qubits: usize,
            amplitudes: Vec<[f64; 2]>,
        }
        let r = Repr::deserialize(d)?;
        let state = PureState::from_amplitudes(
            r.amplitudes.iter().map(|p| C64::new(p[0], p[1])).collect(),
        )
        .map_err(serde::de::Error::custom)?;
        if state.num_qubits != r.num_qubits {
            return Err(serde::de::Error::custom("num_qubits does not match amplitudes"));
        }
        Ok(state)
    }
}
