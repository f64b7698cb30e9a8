//! Removal of the random oracle from a copy-protection scheme.
//!
//! Compilation simulates the oracle by lazy sampling, runs CP, then runs a
//! uniformly random number `S ∈ {0, …, T−1}` of test evaluations on inputs
//! from `D_X`, recording their queries as `D_Eval`. The plain program is the
//! residual state together with `D_Eval` and `N` pre-sampled answers.

mod capture;

pub use capture::{capture_trial, estimate_capture_failure, CaptureReport, CaptureTrial};

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::bits::Bits;
use crate::oracle::{AnswerTape, OnTheFlyOracle, OracleDatabase, QueryTranscript, RecordingOracle, ReplayOracle};
use crate::rng::SeededRng;
use crate::schemes::{cp, eval, CopyProtectionScheme, PlainScheme, ProtectedState, SchemeError, SchemeParams};

/// How many test executions `T` the compiler budgets for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Budget {
    /// `T = ⌈2M/ε⌉`.
    RandomStop,
    /// `T = ⌈2MN/ε⌉`, the earlier classical baseline.
    Ckp15FactorN,
}

/// How the number of test executions `S` is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopRule {
    /// `S` uniform in `{0, …, T−1}`.
    Uniform,
    /// Always `S = c`.
    Fixed(u64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeoraclizerConfig {
    pub epsilon: f64,
    pub lambda: u32,
    pub budget: Budget,
    pub stop: StopRule,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DeoraclizerError {
    #[error("epsilon must lie in (0, 1], got {0}")]
    Epsilon(f64),
    #[error("scheme {0} holds quantum state; the classical compiler needs a classical scheme")]
    NotClassical(String),
    #[error(transparent)]
    Scheme(#[from] SchemeError),
}

impl DeoraclizerConfig {
    pub fn new(epsilon: f64) -> Result<Self, DeoraclizerError> {
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(DeoraclizerError::Epsilon(epsilon));
        }
        Ok(Self {
            epsilon,
            lambda: 0,
            budget: Budget::RandomStop,
            stop: StopRule::Uniform,
        })
    }

    pub fn with_budget(mut self, budget: Budget) -> Self {
        self.budget = budget;
        self
    }

    pub fn with_stop(mut self, stop: StopRule) -> Self {
        self.stop = stop;
        self
    }

    /// `T` for a scheme with bounds `M`, `N`.
    pub fn test_budget(&self, cp_queries: usize, eval_queries: usize) -> u64 {
        test_budget(cp_queries, eval_queries, self.epsilon, self.budget)
    }

    pub fn test_budget_for(&self, p: &SchemeParams) -> u64 {
        self.test_budget(p.cp_queries, p.eval_queries)
    }

    /// Draw `S` for a budget of `t` test executions.
    pub fn sample_stop(&self, t: u64, rng: &mut SeededRng) -> u64 {
        match self.stop {
            StopRule::Uniform => rng.below(t),
            StopRule::Fixed(c) => c,
        }
    }
}

/// `max(1, ⌈2M/ε⌉)`, or `max(1, ⌈2MN/ε⌉)` for the baseline budget.
pub fn test_budget(cp_queries: usize, eval_queries: usize, epsilon: f64, budget: Budget) -> u64 {
    let factor = match budget {
        Budget::RandomStop => 1.0,
        Budget::Ckp15FactorN => eval_queries.max(1) as f64,
    };
    robust_ceil(2.0 * cp_queries as f64 * factor / epsilon).max(1)
}

/// Ceiling that treats values within relative 1e-9 of an integer as that
/// integer, so `2·10/0.1` is 200 and not 201.
pub fn robust_ceil(v: f64) -> u64 {
    let r = v.round();
    if (v - r).abs() <= 1e-9 * r.abs().max(1.0) {
        r as u64
    } else {
        v.ceil() as u64
    }
}

/// `(ρ_f^{S+1}, D_Eval, R)` together with the sampled `S`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "C: Serialize + serde::de::DeserializeOwned")]
pub struct DeoraclizedProgram<C> {
    pub state: ProtectedState<C>,
    pub database: OracleDatabase,
    pub tape: AnswerTape,
    pub s_used: u64,
}

impl<C: Serialize + serde::de::DeserializeOwned> DeoraclizedProgram<C> {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("program serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }
}

/// A compiled program plus the compiler's private view, for verification.
#[derive(Clone, Debug)]
pub struct CompileTrace<C> {
    pub program: DeoraclizedProgram<C>,
    /// Inputs queried by CP (`D_CP`).
    pub cp_queries: BTreeSet<Bits>,
    /// Inputs queried by each test evaluation, in order.
    pub step_queries: Vec<BTreeSet<Bits>>,
    /// Every entry of the simulated oracle so far.
    pub live: OracleDatabase,
    pub test_budget: u64,
}

/// Compile `d` into a plain-model program.
pub fn compile<S: CopyProtectionScheme + ?Sized>(
    scheme: &S,
    d: &S::Description,
    config: &DeoraclizerConfig,
    rng: &mut SeededRng,
) -> Result<DeoraclizedProgram<S::Classical>, DeoraclizerError> {
    Ok(compile_traced(scheme, d, config, rng)?.program)
}

/// [`compile`], keeping `D_CP`, the per-step queries and the simulated oracle.
pub fn compile_traced<S: CopyProtectionScheme + ?Sized>(
    scheme: &S,
    d: &S::Description,
    config: &DeoraclizerConfig,
    rng: &mut SeededRng,
) -> Result<CompileTrace<S::Classical>, DeoraclizerError> {
    let p = scheme.params();
    let mut oracle = RecordingOracle::new(OnTheFlyOracle::new(p.oracle_in_len, p.oracle_out_len, rng.fork()));
    let mut state = cp(scheme, d, &mut oracle, rng)?;
    let (oracle_inner, cp_transcript) = oracle.into_parts();
    let cp_queries = cp_transcript.inputs();

    let t = config.test_budget_for(&p);
    let s = config.sample_stop(t, rng);
    let mut oracle = oracle_inner;
    let mut step_queries = Vec::with_capacity(s as usize);
    let mut recorded = BTreeSet::new();
    for _ in 0..s {
        let x = scheme.sample_input(rng);
        let mut rec = RecordingOracle::new(&mut oracle);
        let (next, _) = eval(scheme, state, &x, &mut rec, rng)?;
        state = next;
        let inputs = rec.transcript().inputs();
        recorded.extend(inputs.iter().copied());
        step_queries.push(inputs);
    }
    let live = oracle.into_database();
    let database = live.restricted_to(&recorded);
    let tape = AnswerTape::sample(p.eval_queries, p.oracle_out_len, rng);
    Ok(CompileTrace {
        program: DeoraclizedProgram {
            state,
            database,
            tape,
            s_used: s,
        },
        cp_queries,
        step_queries,
        live,
        test_budget: t,
    })
}

/// Evaluate a compiled program: recorded answers first, then the tape.
pub fn eval_plain<S: CopyProtectionScheme + ?Sized>(
    scheme: &S,
    program: DeoraclizedProgram<S::Classical>,
    x: &Bits,
    rng: &mut SeededRng,
) -> Result<(DeoraclizedProgram<S::Classical>, Bits), DeoraclizerError> {
    let (program, y, _) = eval_plain_recorded(scheme, program, x, rng)?;
    Ok((program, y))
}

/// [`eval_plain`] that also returns the query transcript.
pub fn eval_plain_recorded<S: CopyProtectionScheme + ?Sized>(
    scheme: &S,
    program: DeoraclizedProgram<S::Classical>,
    x: &Bits,
    rng: &mut SeededRng,
) -> Result<(DeoraclizedProgram<S::Classical>, Bits, QueryTranscript), DeoraclizerError> {
    let DeoraclizedProgram {
        state,
        database,
        tape,
        s_used,
    } = program;
    let (state, y, transcript) = {
        let mut oracle = RecordingOracle::new(ReplayOracle::new(&database, &tape));
        let (state, y) = eval(scheme, state, x, &mut oracle, rng)?;
        (state, y, oracle.into_parts().1)
    };
    Ok((
        DeoraclizedProgram {
            state,
            database,
            tape,
            s_used,
        },
        y,
        transcript,
    ))
}

/// Compile a classical oracle-aided program under either test budget.
pub fn compile_classical_obf<S: CopyProtectionScheme + ?Sized>(
    scheme: &S,
    d: &S::Description,
    epsilon: f64,
    mode: Budget,
    rng: &mut SeededRng,
) -> Result<DeoraclizedProgram<S::Classical>, DeoraclizerError> {
    let p = scheme.params();
    if !p.classical {
        return Err(DeoraclizerError::NotClassical(p.name));
    }
    let config = DeoraclizerConfig::new(epsilon)?.with_budget(mode);
    compile(scheme, d, &config, rng)
}

/// A scheme compiled into the plain model.
#[derive(Clone, Debug)]
pub struct CompiledScheme<S> {
    pub scheme: S,
    pub config: DeoraclizerConfig,
}

impl<S: CopyProtectionScheme> CompiledScheme<S> {
    pub fn new(scheme: S, config: DeoraclizerConfig) -> Self {
        Self { scheme, config }
    }
}

impl<S: CopyProtectionScheme> PlainScheme for CompiledScheme<S> {
    type Description = S::Description;
    type Program = DeoraclizedProgram<S::Classical>;

    fn params(&self) -> SchemeParams {
        self.scheme.params()
    }
    fn sample_function(&self, rng: &mut SeededRng) -> S::Description {
        self.scheme.sample_function(rng)
    }
    fn function_value(&self, d: &S::Description, x: &Bits) -> Bits {
        self.scheme.function_value(d, x)
    }
    fn sample_input(&self, rng: &mut SeededRng) -> Bits {
        self.scheme.sample_input(rng)
    }
    fn sample_challenge(&self, d: &S::Description, rng: &mut SeededRng) -> Bits {
        self.scheme.sample_challenge(d, rng)
    }
    fn generate(&self, d: &S::Description, rng: &mut SeededRng) -> Result<Self::Program, SchemeError> {
        compile(&self.scheme, d, &self.config, rng).map_err(into_scheme_error)
    }
    fn run(&self, program: Self::Program, x: &Bits, rng: &mut SeededRng) -> Result<(Self::Program, Bits), SchemeError> {
        eval_plain(&self.scheme, program, x, rng).map_err(into_scheme_error)
    }
}

fn into_scheme_error(e: DeoraclizerError) -> SchemeError {
    match e {
        DeoraclizerError::Scheme(e) => e,
        other => SchemeError::Parameters(other.to_string()),
    }
}
