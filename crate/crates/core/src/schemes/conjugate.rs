use serde::{Deserialize, Serialize};

use super::{CopyProtectionScheme, ProtectedState, QuantumRegister, SchemeError, SchemeParams, TruthTable};
use crate::bits::Bits;
use crate::oracle::{classical_query, ClassicalOracle, SuffixedOracle};
use crate::qsim::state::{hadamard, rotation_y};
use crate::qsim::{PureState, Register, C64};
use crate::rng::SeededRng;

/// Share of the disturbance budget realized as a genuine quantum error on the
/// probe qubit. The rest is classical readout noise, which leaves the state
/// intact.
pub const QUANTUM_FRACTION: f64 = 0.25;

/// Quantum scheme: a random key `k` is stored as `⊗_i H^{θ_i}|k_i⟩` and the
/// truth table is masked with `O(k ‖ x)`.
///
/// Eval rotates the key into the computational basis, tilts the first qubit by
/// a small angle, reads the key through the oracle query and rotates back. A
/// misread key (probability `ε_dist`) yields a uniformly random output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConjugateScheme {
    pub key_qubits: usize,
    pub input_len: u32,
    pub output_len: u32,
    pub disturbance: f64,
}

impl Default for ConjugateScheme {
    fn default() -> Self {
        Self {
            key_qubits: 2,
            input_len: 3,
            output_len: 4,
            disturbance: 0.01,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConjugateClassical {
    /// `true` for the Hadamard basis.
    pub bases: Vec<bool>,
    pub masked: Vec<Bits>,
}

impl ConjugateScheme {
    pub fn new(key_qubits: usize, input_len: u32, output_len: u32, disturbance: f64) -> Result<Self, SchemeError> {
        if key_qubits == 0 || key_qubits > 8 {
            return Err(SchemeError::Parameters(format!("{key_qubits} key qubits, expected 1..=8")));
        }
        if key_qubits + output_len as usize > crate::qsim::MAX_PURE_QUBITS {
            return Err(SchemeError::Parameters("key plus answer register exceeds the qubit cap".into()));
        }
        if input_len == 0 || input_len > 8 {
            return Err(SchemeError::Parameters(format!("input length {input_len}, expected 1..=8")));
        }
        if !(0.0..0.5).contains(&disturbance) {
            return Err(SchemeError::Parameters(format!("disturbance {disturbance} outside [0, 0.5)")));
        }
        Ok(Self {
            key_qubits,
            input_len,
            output_len,
            disturbance,
        })
    }

    /// Probability that the probe qubit is misread by the quantum tilt.
    pub fn quantum_error(&self) -> f64 {
        QUANTUM_FRACTION * self.disturbance
    }

    /// Probability of a classical readout flip, chosen so the two error
    /// sources combine to exactly `ε_dist`.
    pub fn readout_error(&self) -> f64 {
        let q = self.quantum_error();
        (self.disturbance - q) / (1.0 - 2.0 * q)
    }

    /// Design value `1 − ε_dist (1 − 2^{−ℓ_y})` of single-shot correctness.
    pub fn design_correctness(&self) -> f64 {
        1.0 - self.disturbance * (1.0 - (-(self.output_len as f64)).exp2())
    }

    /// `H^{θ}|b⟩` as a single-qubit amplitude pair.
    pub fn encode_qubit(bit: bool, hadamard_basis: bool) -> [C64; 2] {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        match (bit, hadamard_basis) {
            (false, false) => [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
            (true, false) => [C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
            (false, true) => [C64::new(s, 0.0), C64::new(s, 0.0)],
            (true, true) => [C64::new(s, 0.0), C64::new(-s, 0.0)],
        }
    }

    /// The key register `⊗_i H^{θ_i}|k_i⟩`.
    pub fn encode_key(key: &Bits, bases: &[bool]) -> Result<PureState, SchemeError> {
        let qubits: Vec<[C64; 2]> = bases
            .iter()
            .enumerate()
            .map(|(i, h)| Self::encode_qubit(key.bit(i as u32), *h))
            .collect();
        Ok(PureState::product(&qubits)?)
    }

    /// Angle of the `R_y` tilt applied to the probe qubit.
    pub fn tilt(&self) -> f64 {
        2.0 * self.quantum_error().sqrt().asin()
    }
}

impl CopyProtectionScheme for ConjugateScheme {
    type Description = TruthTable;
    type Classical = ConjugateClassical;

    fn params(&self) -> SchemeParams {
        SchemeParams {
            name: "conjugate".into(),
            lambda: self.key_qubits as u32,
            cp_queries: 1 << self.input_len,
            eval_queries: 1,
            oracle_in_len: self.key_qubits as u32 + self.input_len,
            oracle_out_len: self.output_len,
            input_len: self.input_len,
            output_len: self.output_len,
            classical: false,
        }
    }

    fn sample_function(&self, rng: &mut SeededRng) -> TruthTable {
        TruthTable::random(self.input_len, self.output_len, rng)
    }

    fn function_value(&self, d: &TruthTable, x: &Bits) -> Bits {
        d.eval(x)
    }

    fn protect(
        &self,
        d: &TruthTable,
        oracle: &mut dyn ClassicalOracle,
        rng: &mut SeededRng,
    ) -> Result<ProtectedState<ConjugateClassical>, SchemeError> {
        let n = self.key_qubits as u32;
        let key = Bits::random(n, rng);
        let bases: Vec<bool> = (0..n).map(|_| rng.chance(0.5)).collect();
        let masked = d
            .values
            .iter()
            .enumerate()
            .map(|(x, fx)| {
                let point = key.concat(&Bits::truncated(x as u64, self.input_len))?;
                Ok(fx.xor(&oracle.query(&point)?))
            })
            .collect::<Result<Vec<_>, SchemeError>>()?;
        Ok(ProtectedState {
            quantum: Some(QuantumRegister::prepare(Self::encode_key(&key, &bases)?)),
            classical: ConjugateClassical { bases, masked },
        })
    }

    fn evaluate(
        &self,
        mut state: ProtectedState<ConjugateClassical>,
        x: &Bits,
        oracle: &mut dyn ClassicalOracle,
        rng: &mut SeededRng,
    ) -> Result<(ProtectedState<ConjugateClassical>, Bits), SchemeError> {
        let n = self.key_qubits;
        let register = state.quantum.as_mut().ok_or(SchemeError::Malformed("missing key register"))?;
        if register.num_qubits() != n || state.classical.bases.len() != n {
            return Err(SchemeError::Malformed("key register width"));
        }
        let masked = *state
            .classical
            .masked
            .get(x.value() as usize)
            .ok_or(SchemeError::Malformed("input outside the masked table"))?;
        let bases = &state.classical.bases;

        let mut s = register.state().extend_zeros(self.output_len as usize)?;
        for (q, h) in bases.iter().enumerate() {
            if *h {
                s.apply_gate(q, &hadamard());
            }
        }
        let tilt = self.tilt();
        s.apply_gate(0, &rotation_y(tilt));
        let flip = rng.chance(self.readout_error());
        if flip {
            s.apply_x(0);
        }
        let mut keyed = SuffixedOracle::new(oracle, *x);
        let (mut s, _) = classical_query(
            &s,
            Register::new(0, n),
            Register::new(n, self.output_len as usize),
            &mut keyed,
            rng,
        )?;
        if flip {
            s.apply_x(0);
        }
        s.apply_gate(0, &rotation_y(-tilt));
        for (q, h) in bases.iter().enumerate() {
            if *h {
                s.apply_gate(q, &hadamard());
            }
        }
        let (key_state, answer) = s.detach_basis_suffix(self.output_len as usize)?;
        register.evolve(key_state)?;
        let y = masked.xor(&Bits::new(answer as u64, self.output_len)?);
        Ok((state, y))
    }
}
