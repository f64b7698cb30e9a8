//! Simulation of oracle removal for quantum copy-protection schemes whose
//! random oracle is only classically accessible.
//!
//! The crate is layered bottom-up: [`qsim`] simulates small quantum systems,
//! [`oracle`] realizes classical random oracles, [`schemes`] defines
//! copy-protection schemes and toy instances, [`deoraclizer`] compiles an
//! oracle scheme into the plain model, and [`harness`] runs the security and
//! correctness games.

pub mod bits;
pub mod deoraclizer;
pub mod harness;
pub mod oracle;
pub mod par;
pub mod qsim;
pub mod rng;
pub mod schemes;

pub use bits::{Bits, BitsError};
pub use deoraclizer::{
    compile, eval_plain, estimate_capture_failure, Budget, CaptureReport, CompiledScheme, DeoraclizedProgram,
    DeoraclizerConfig, DeoraclizerError, StopRule,
};
pub use harness::{ExperimentReport, HarnessError};
pub use oracle::{ClassicalOracle, OnTheFlyOracle, OracleDatabase, OracleError};
pub use qsim::{DensityOperator, Measurement, PureState, QsimError};
pub use rng::SeededRng;
pub use schemes::{
    ConjugateScheme, ConstantScheme, CopyProtectionScheme, CounterScheme, PadScheme, PlainScheme, ProtectedState,
    RandomOracleModel, SchemeError, SchemeParams, SchemeSpec,
};
