use serde::{Deserialize, Serialize};

use super::{CopyProtectionScheme, ProtectedState, SchemeError, SchemeParams, TruthTable};
use crate::bits::Bits;
use crate::oracle::ClassicalOracle;
use crate::rng::SeededRng;

/// A broken scheme that ignores its program and outputs zero. It makes no
/// oracle queries at all.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConstantScheme {
    pub input_len: u32,
    pub output_len: u32,
}

impl Default for ConstantScheme {
    fn default() -> Self {
        Self {
            input_len: 3,
            output_len: 4,
        }
    }
}

impl ConstantScheme {
    pub fn new(input_len: u32, output_len: u32) -> Result<Self, SchemeError> {
        if input_len == 0 || input_len > 16 || output_len == 0 || output_len > 64 {
            return Err(SchemeError::Parameters(format!(
                "widths {input_len} -> {output_len} outside 1..=16 -> 1..=64"
            )));
        }
        Ok(Self { input_len, output_len })
    }
}

impl CopyProtectionScheme for ConstantScheme {
    type Description = TruthTable;
    type Classical = ();

    fn params(&self) -> SchemeParams {
        SchemeParams {
            name: "constant".into(),
            lambda: 1,
            cp_queries: 0,
            eval_queries: 0,
            oracle_in_len: 1,
            oracle_out_len: 1,
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
        _d: &TruthTable,
        _oracle: &mut dyn ClassicalOracle,
        _rng: &mut SeededRng,
    ) -> Result<ProtectedState<()>, SchemeError> {
        Ok(ProtectedState::classical_only(()))
    }

    fn evaluate(
        &self,
        state: ProtectedState<()>,
        _x: &Bits,
        _oracle: &mut dyn ClassicalOracle,
        _rng: &mut SeededRng,
    ) -> Result<(ProtectedState<()>, Bits), SchemeError> {
        Ok((state, Bits::zeros(self.output_len)))
    }
}
