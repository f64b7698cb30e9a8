//! Classical-accessible oracles.
//!
//! An oracle maps fixed-length bitstrings to fixed-length bitstrings. Quantum
//! callers go through [`classical_query`], which measures the query register
//! before the answer is XORed in.

mod database;
mod query;
mod realizations;

pub use database::{on_the_fly_answer, replay_answer, AnswerTape, OracleDatabase, QueryRecord, QueryTranscript};
pub use query::classical_query;
pub use realizations::{
    BoundedOracle, FixedFunctionOracle, OnTheFlyOracle, RecordingOracle, ReplayOracle, SuffixedOracle,
    TapeCoupledOracle,
};

use crate::bits::{Bits, BitsError};
use crate::qsim::QsimError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OracleError {
    #[error("expected a {expected}-bit string, got {found} bits")]
    LengthMismatch { expected: u32, found: u32 },
    #[error("database already maps {input} to a different output")]
    Inconsistent { input: Bits },
    #[error("tape index {index} outside 1..={len}")]
    TapeIndex { index: usize, len: usize },
    #[error("evaluation needs more than {len} fresh answers")]
    TapeExhausted { len: usize },
    #[error("oracle query bound {bound} exceeded")]
    QueryBound { bound: usize },
    #[error("query and answer registers overlap")]
    OverlappingRegisters,
    #[error(transparent)]
    Qsim(#[from] QsimError),
    #[error(transparent)]
    Bits(#[from] BitsError),
    #[error("malformed serialized form: {0}")]
    Format(String),
}

/// Anything that answers classical oracle queries.
pub trait ClassicalOracle {
    fn in_len(&self) -> u32;
    fn out_len(&self) -> u32;
    fn query(&mut self, x: &Bits) -> Result<Bits, OracleError>;
}

impl<O: ClassicalOracle + ?Sized> ClassicalOracle for &mut O {
    fn in_len(&self) -> u32 {
        (**self).in_len()
    }
    fn out_len(&self) -> u32 {
        (**self).out_len()
    }
    fn query(&mut self, x: &Bits) -> Result<Bits, OracleError> {
        (**self).query(x)
    }
}

pub(crate) fn check_len(bits: &Bits, expected: u32) -> Result<(), OracleError> {
    if bits.len() != expected {
        return Err(OracleError::LengthMismatch {
            expected,
            found: bits.len(),
        });
    }
    Ok(())
}
