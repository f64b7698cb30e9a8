//! Game-level experiments: correctness, reusability, piracy, the pirate lift,
//! unlearnability, and the measurement-disturbance experiments.

mod correctness;
mod gentle;
mod learnability;
mod piracy;
mod pirates;
mod stats;
mod tomography;

pub use correctness::{estimate_correctness, estimate_mean_correctness, estimate_reusability, reusability_profile};
pub use gentle::{gentle_bound_experiment, GentleCell};
pub use learnability::{
    run_learnability_experiment, BudgetLearner, ExhaustiveLearner, FunctionFamily, Hypothesis, Learner,
    LearnerConfig, PointFunctions, QueryAccess, TableHypothesis, MAX_DOMAIN_BITS, ZERO_QUERY_LEARNER,
};
pub use piracy::{
    compare_lift, lift_pirate, run_oracle_piracy_experiment, run_piracy_experiment, LiftComparison, LiftedPirate,
    NoShare, OraclePirate, PlainPirate, QubitHolder,
};
pub use pirates::{ClassicalClonePirate, ConjugateHalfSplitPirate, ConjugateMeasureClonePirate, HalfKeyShare, SoloPirate};
pub use stats::{binomial_stderr, wilson_interval, ExperimentReport, Z99};
pub use tomography::{
    exact_decay, measurement_setting, pauli_tomography, reusability_decay, setting_count, setting_probabilities, DecayPoint,
    DecaySettings, Pauli,
};

use crate::bits::BitsError;
use crate::deoraclizer::DeoraclizerError;
use crate::oracle::OracleError;
use crate::qsim::QsimError;
use crate::schemes::SchemeError;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("pirate shares hold a common qubit")]
    SharedQubits,
    #[error("malformed pirate: {0}")]
    Pirate(&'static str),
    #[error("learner exceeded its budget of {0} queries")]
    QueryBudget(usize),
    #[error("domain of {0} bits is too large to enumerate")]
    DomainTooLarge(u32),
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error(transparent)]
    Deoraclizer(#[from] DeoraclizerError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Qsim(#[from] QsimError),
    #[error(transparent)]
    Bits(#[from] BitsError),
}
