use serde::{Deserialize, Serialize};

use super::{ConjugateScheme, ConstantScheme, CopyProtectionScheme, CounterScheme, PadScheme, SchemeError, SchemeParams};

/// A toy scheme chosen by name, with any omitted parameter at its default.
///
/// Serialized as `{"name": "counter", "points": 10, ...}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum SchemeSpec {
    Pad(PadScheme),
    Counter(CounterScheme),
    Conjugate(ConjugateScheme),
    Constant(ConstantScheme),
}

impl SchemeSpec {
    /// Re-run the constructor's checks on the deserialized parameters.
    pub fn validate(&self) -> Result<(), SchemeError> {
        match self {
            SchemeSpec::Pad(s) => PadScheme::new(s.key_len, s.input_len, s.output_len, s.pad_size).map(drop),
            SchemeSpec::Counter(s) => CounterScheme::new(s.key_len, s.points, s.queries_per_eval).map(drop),
            SchemeSpec::Conjugate(s) => {
                ConjugateScheme::new(s.key_qubits, s.input_len, s.output_len, s.disturbance).map(drop)
            }
            SchemeSpec::Constant(s) => ConstantScheme::new(s.input_len, s.output_len).map(drop),
        }
    }

    pub fn params(&self) -> SchemeParams {
        crate::with_scheme!(self, s => s.params())
    }
}

/// Bind the concrete scheme inside a [`SchemeSpec`] and evaluate `$body`
/// once per variant.
#[macro_export]
macro_rules! with_scheme {
    ($spec:expr, $s:ident => $body:expr) => {
        match $spec {
            $crate::schemes::SchemeSpec::Pad($s) => $body,
            $crate::schemes::SchemeSpec::Counter($s) => $body,
            $crate::schemes::SchemeSpec::Conjugate($s) => $body,
            $crate::schemes::SchemeSpec::Constant($s) => $body,
        }
    };
}
