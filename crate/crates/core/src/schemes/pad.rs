use serde::{Deserialize, Serialize};

use super::{CopyProtectionScheme, ProtectedState, SchemeError, SchemeParams, TruthTable};
use crate::bits::Bits;
use crate::oracle::ClassicalOracle;
use crate::rng::SeededRng;

/// Exact classical scheme: the truth table is masked with oracle answers at
/// `k ‖ h(x)`, where `h(x) = x mod M`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PadScheme {
    pub key_len: u32,
    pub input_len: u32,
    pub output_len: u32,
    pub pad_size: usize,
}

impl Default for PadScheme {
    fn default() -> Self {
        Self {
            key_len: 8,
            input_len: 6,
            output_len: 8,
            pad_size: 16,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PadClassical {
    pub key: Bits,
    pub masked: Vec<Bits>,
}

impl PadScheme {
    pub fn new(key_len: u32, input_len: u32, output_len: u32, pad_size: usize) -> Result<Self, SchemeError> {
        if pad_size == 0 || pad_size as u64 > 1u64 << input_len {
            return Err(SchemeError::Parameters(format!(
                "pad size {pad_size} must be in 1..=2^{input_len}"
            )));
        }
        if key_len + input_len > 64 || input_len > 16 || output_len > 64 {
            return Err(SchemeError::Parameters("widths too large".into()));
        }
        Ok(Self {
            key_len,
            input_len,
            output_len,
            pad_size,
        })
    }

    /// Pad slot used by input `x`.
    pub fn slot(&self, x: &Bits) -> u64 {
        x.value() % self.pad_size as u64
    }

    fn point(&self, key: &Bits, slot: u64) -> Bits {
        key.concat(&Bits::truncated(slot, self.input_len)).expect("fits in 64 bits")
    }
}

impl CopyProtectionScheme for PadScheme {
    type Description = TruthTable;
    type Classical = PadClassical;

    fn params(&self) -> SchemeParams {
        SchemeParams {
            name: "pad".into(),
            lambda: self.key_len,
            cp_queries: self.pad_size,
            eval_queries: 1,
            oracle_in_len: self.key_len + self.input_len,
            oracle_out_len: self.output_len,
            input_len: self.input_len,
            output_len: self.output_len,
            classical: true,
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
    ) -> Result<ProtectedState<PadClassical>, SchemeError> {
        let key = Bits::random(self.key_len, rng);
        let pad = (0..self.pad_size as u64)
            .map(|i| oracle.query(&self.point(&key, i)))
            .collect::<Result<Vec<_>, _>>()?;
        let masked = d
            .values
            .iter()
            .enumerate()
            .map(|(x, fx)| fx.xor(&pad[x % self.pad_size]))
            .collect();
        Ok(ProtectedState::classical_only(PadClassical { key, masked }))
    }

    fn evaluate(
        &self,
        state: ProtectedState<PadClassical>,
        x: &Bits,
        oracle: &mut dyn ClassicalOracle,
        _rng: &mut SeededRng,
    ) -> Result<(ProtectedState<PadClassical>, Bits), SchemeError> {
        let c = &state.classical;
        let masked = *c
            .masked
            .get(x.value() as usize)
            .ok_or(SchemeError::Malformed("input outside the masked table"))?;
        let pad = oracle.query(&self.point(&c.key, self.slot(x)))?;
        Ok((state, masked.xor(&pad)))
    }
}
