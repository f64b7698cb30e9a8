//! Copy-protection schemes with classical oracle access, and three toy
//! instances.

mod conjugate;
mod constant;
mod counter;
mod pad;
mod spec;

pub use conjugate::{ConjugateClassical, ConjugateScheme};
pub use constant::ConstantScheme;
pub use counter::{CounterClassical, CounterScheme};
pub use pad::{PadClassical, PadScheme};
pub use spec::SchemeSpec;

use std::fmt::Debug;
use std::sync::atomic::{AtomicU64, Ordering};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::bits::{Bits, BitsError};
use crate::oracle::{BoundedOracle, ClassicalOracle, OnTheFlyOracle, OracleError};
use crate::qsim::{PureState, QsimError};
use crate::rng::SeededRng;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SchemeError {
    #[error("{phase} exceeded its declared bound of {bound} oracle queries")]
    QueryBound { phase: &'static str, bound: usize },
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Qsim(#[from] QsimError),
    #[error(transparent)]
    Bits(#[from] BitsError),
    #[error("invalid scheme parameters: {0}")]
    Parameters(String),
    #[error("protected state does not belong to this scheme: {0}")]
    Malformed(&'static str),
}

/// Static shape of a scheme.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchemeParams {
    pub name: String,
    pub lambda: u32,
    /// Upper bound `M` on CP's oracle queries.
    pub cp_queries: usize,
    /// Upper bound `N` on Eval's oracle queries.
    pub eval_queries: usize,
    pub oracle_in_len: u32,
    pub oracle_out_len: u32,
    pub input_len: u32,
    pub output_len: u32,
    /// The scheme never holds quantum state.
    pub classical: bool,
}

/// A function `f: {0,1}^in_len → {0,1}^out_len` given by its full table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruthTable {
    pub in_len: u32,
    pub out_len: u32,
    pub values: Vec<Bits>,
}

impl TruthTable {
    pub fn random(in_len: u32, out_len: u32, rng: &mut SeededRng) -> Self {
        Self {
            in_len,
            out_len,
            values: (0..1u64 << in_len).map(|_| Bits::random(out_len, rng)).collect(),
        }
    }

    pub fn eval(&self, x: &Bits) -> Bits {
        assert_eq!(x.len(), self.in_len, "input length");
        self.values[x.value() as usize]
    }
}

static NEXT_TAG: AtomicU64 = AtomicU64::new(1);

fn mint_tags(count: usize) -> Vec<u64> {
    let first = NEXT_TAG.fetch_add(count as u64, Ordering::Relaxed);
    (first..first + count as u64).collect()
}

/// A quantum register whose qubits carry identity tags.
///
/// Tags follow the physical qubits: `Clone` duplicates them, so two values
/// holding a common tag are copies of the same qubit. Only freshly prepared
/// registers receive new tags.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumRegister {
    state: PureState,
    tags: Vec<u64>,
}

impl QuantumRegister {
    /// Newly prepared qubits.
    pub fn prepare(state: PureState) -> Self {
        let tags = mint_tags(state.num_qubits());
        Self { state, tags }
    }

    /// Replace the state after evolving the same qubits.
    pub fn evolve(&mut self, state: PureState) -> Result<(), SchemeError> {
        if state.num_qubits() != self.tags.len() {
            return Err(SchemeError::Malformed("qubit count changed"));
        }
        self.state = state;
        Ok(())
    }

    pub fn state(&self) -> &PureState {
        &self.state
    }

    pub fn tags(&self) -> &[u64] {
        &self.tags
    }

    pub fn num_qubits(&self) -> usize {
        self.tags.len()
    }

    /// Split a product state into its first `at` qubits and the rest.
    pub fn split(self, at: usize) -> Result<(QuantumRegister, QuantumRegister), SchemeError> {
        let (a, b) = self.state.split_product(at)?;
        let mut tags = self.tags;
        let rest = tags.split_off(at);
        Ok((QuantumRegister { state: a, tags }, QuantumRegister { state: b, tags: rest }))
    }

    /// `self ⊗ other`, keeping both sets of tags.
    pub fn join(self, other: QuantumRegister) -> Result<QuantumRegister, SchemeError> {
        let state = self.state.tensor(&other.state)?;
        let mut tags = self.tags;
        tags.extend(other.tags);
        Ok(QuantumRegister { state, tags })
    }
}

impl Serialize for QuantumRegister {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.state.serialize(s)
    }
}

impl<'de> Deserialize<'de> for QuantumRegister {
    /// Imported qubits are treated as newly prepared.
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Ok(QuantumRegister::prepare(PureState::deserialize(d)?))
    }
}

/// Output of CP: an optional quantum part and a classical record.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtectedState<C> {
    pub quantum: Option<QuantumRegister>,
    pub classical: C,
}

impl<C> ProtectedState<C> {
    pub fn classical_only(classical: C) -> Self {
        Self { quantum: None, classical }
    }

    pub fn qubit_tags(&self) -> Vec<u64> {
        self.quantum.iter().flat_map(|q| q.tags().iter().copied()).collect()
    }
}

/// A copy-protection scheme whose algorithms query a classical-accessible
/// oracle.
pub trait CopyProtectionScheme: Send + Sync {
    type Description: Clone + Debug + Send + Sync;
    type Classical: Clone + Debug + PartialEq + Send + Sync + Serialize + DeserializeOwned;

    fn params(&self) -> SchemeParams;

    /// Draw `d_f` from `D_F`.
    fn sample_function(&self, rng: &mut SeededRng) -> Self::Description;

    fn function_value(&self, d: &Self::Description, x: &Bits) -> Bits;

    /// Draw an input from `D_X`.
    fn sample_input(&self, rng: &mut SeededRng) -> Bits {
        Bits::random(self.params().input_len, rng)
    }

    /// Draw a piracy challenge from `𝔇_X(f)`.
    fn sample_challenge(&self, _d: &Self::Description, rng: &mut SeededRng) -> Bits {
        self.sample_input(rng)
    }

    fn protect(
        &self,
        d: &Self::Description,
        oracle: &mut dyn ClassicalOracle,
        rng: &mut SeededRng,
    ) -> Result<ProtectedState<Self::Classical>, SchemeError>;

    fn evaluate(
        &self,
        state: ProtectedState<Self::Classical>,
        x: &Bits,
        oracle: &mut dyn ClassicalOracle,
        rng: &mut SeededRng,
    ) -> Result<(ProtectedState<Self::Classical>, Bits), SchemeError>;
}

pub type StateOf<S> = ProtectedState<<S as CopyProtectionScheme>::Classical>;

fn bound_error(phase: &'static str, e: SchemeError) -> SchemeError {
    match e {
        SchemeError::Oracle(OracleError::QueryBound { bound }) => SchemeError::QueryBound { phase, bound },
        e => e,
    }
}

/// CP with its query bound `M` enforced.
pub fn cp<S: CopyProtectionScheme + ?Sized>(
    scheme: &S,
    d: &S::Description,
    oracle: &mut dyn ClassicalOracle,
    rng: &mut SeededRng,
) -> Result<StateOf<S>, SchemeError> {
    let mut bounded = BoundedOracle::new(oracle, scheme.params().cp_queries);
    scheme.protect(d, &mut bounded, rng).map_err(|e| bound_error("CP", e))
}

/// Eval with its query bound `N` enforced.
pub fn eval<S: CopyProtectionScheme + ?Sized>(
    scheme: &S,
    state: StateOf<S>,
    x: &Bits,
    oracle: &mut dyn ClassicalOracle,
    rng: &mut SeededRng,
) -> Result<(StateOf<S>, Bits), SchemeError> {
    let mut bounded = BoundedOracle::new(oracle, scheme.params().eval_queries);
    scheme.evaluate(state, x, &mut bounded, rng).map_err(|e| bound_error("Eval", e))
}

/// A scheme with no oracle: generation produces a self-contained program.
pub trait PlainScheme: Send + Sync {
    type Description: Clone + Debug + Send + Sync;
    type Program: Clone + Debug + Send;

    fn params(&self) -> SchemeParams;
    fn sample_function(&self, rng: &mut SeededRng) -> Self::Description;
    fn function_value(&self, d: &Self::Description, x: &Bits) -> Bits;
    fn sample_input(&self, rng: &mut SeededRng) -> Bits;
    fn sample_challenge(&self, d: &Self::Description, rng: &mut SeededRng) -> Bits;
    fn generate(&self, d: &Self::Description, rng: &mut SeededRng) -> Result<Self::Program, SchemeError>;
    fn run(&self, program: Self::Program, x: &Bits, rng: &mut SeededRng) -> Result<(Self::Program, Bits), SchemeError>;
}

/// A program in the random oracle model together with its oracle.
#[derive(Clone, Debug)]
pub struct OracleProgram<C> {
    pub state: ProtectedState<C>,
    pub oracle: OnTheFlyOracle,
}

/// An oracle scheme bundled with a lazily sampled random oracle, viewed as a
/// self-contained scheme. The oracle is sampled at generation time.
#[derive(Clone, Debug)]
pub struct RandomOracleModel<S>(pub S);

impl<S: CopyProtectionScheme> PlainScheme for RandomOracleModel<S> {
    type Description = S::Description;
    type Program = OracleProgram<S::Classical>;

    fn params(&self) -> SchemeParams {
        self.0.params()
    }
    fn sample_function(&self, rng: &mut SeededRng) -> S::Description {
        self.0.sample_function(rng)
    }
    fn function_value(&self, d: &S::Description, x: &Bits) -> Bits {
        self.0.function_value(d, x)
    }
    fn sample_input(&self, rng: &mut SeededRng) -> Bits {
        self.0.sample_input(rng)
    }
    fn sample_challenge(&self, d: &S::Description, rng: &mut SeededRng) -> Bits {
        self.0.sample_challenge(d, rng)
    }
    fn generate(&self, d: &S::Description, rng: &mut SeededRng) -> Result<Self::Program, SchemeError> {
        let p = self.0.params();
        let mut oracle = OnTheFlyOracle::new(p.oracle_in_len, p.oracle_out_len, rng.fork());
        let state = cp(&self.0, d, &mut oracle, rng)?;
        Ok(OracleProgram { state, oracle })
    }
    fn run(&self, program: Self::Program, x: &Bits, rng: &mut SeededRng) -> Result<(Self::Program, Bits), SchemeError> {
        let OracleProgram { state, mut oracle } = program;
        let (state, y) = eval(&self.0, state, x, &mut oracle, rng)?;
        Ok((OracleProgram { state, oracle }, y))
    }
}
