//! Dense small-dimension quantum simulation.

pub mod density;
pub mod gentle;
pub mod linalg;
pub mod measurement;
pub mod random;
pub mod state;

#[cfg(test)]
pub(crate) mod oracle_linalg;

pub use density::{hermitian_distance, pure_trace_distance, trace_distance, DensityOperator};
pub use gentle::{
    classical_output_wrapper, gentle_recover, ClassicalOutputAlgorithm, GentleRecovery, Instrument,
    WrappedOutput,
};
pub use linalg::{CMatrix, C64};
pub use measurement::{measure, outcome_distribution, unrevealed_mixture, Measurement, MeasurementOutcome};
pub use state::{Gate1, PureState, Register};

/// Largest supported pure-state register.
pub const MAX_PURE_QUBITS: usize = 12;
/// Largest supported density operator.
pub const MAX_MIXED_QUBITS: usize = 6;
pub const STATE_TOLERANCE: f64 = 1e-9;
/// Outcomes less likely than this carry no post-measurement state.
pub const DEGENERATE_PROBABILITY: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QsimError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("{requested} qubits exceeds the cap of {cap}")]
    TooManyQubits { requested: usize, cap: usize },
    #[error("state norm {0} is not 1")]
    NotNormalized(f64),
    #[error("matrix is not Hermitian (defect {0:e})")]
    NotHermitian(f64),
    #[error("matrix has negative eigenvalue {0:e}")]
    NotPositive(f64),
    #[error("trace {0} is not 1")]
    BadTrace(f64),
    #[error("measurement operators are not complete (defect {0:e})")]
    IncompleteMeasurement(f64),
    #[error("measurement has no operators")]
    EmptyMeasurement,
    #[error("expected a two-outcome measurement, got {0} outcomes")]
    NonBinaryMeasurement(usize),
    #[error("register [{start}, {start}+{len}) is invalid for {num_qubits} qubits")]
    InvalidRegister { start: usize, len: usize, num_qubits: usize },
    #[error("registers overlap")]
    OverlappingRegisters,
    #[error("state is not a product across the requested cut")]
    NotProduct,
    #[error("outcome {index} out of range for {outcomes} outcomes")]
    OutcomeOutOfRange { index: usize, outcomes: usize },
}
