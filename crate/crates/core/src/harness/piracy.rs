use std::collections::BTreeSet;

use crate::bits::Bits;
use crate::deoraclizer::{CompiledScheme, DeoraclizedProgram};
use crate::oracle::{AnswerTape, BoundedOracle, ClassicalOracle, OnTheFlyOracle, OracleDatabase, RecordingOracle};
use crate::par::map_trials;
use crate::rng::SeededRng;
use crate::schemes::{cp, eval, CopyProtectionScheme, OracleProgram, PlainScheme, ProtectedState, StateOf};

use super::{ExperimentReport, HarnessError};

/// Something that may hold qubits, identified by their tags.
pub trait QubitHolder {
    fn qubit_tags(&self) -> Vec<u64>;
}

impl<C> QubitHolder for ProtectedState<C> {
    fn qubit_tags(&self) -> Vec<u64> {
        ProtectedState::qubit_tags(self)
    }
}

impl<C> QubitHolder for DeoraclizedProgram<C> {
    fn qubit_tags(&self) -> Vec<u64> {
        self.state.qubit_tags()
    }
}

impl<C> QubitHolder for OracleProgram<C> {
    fn qubit_tags(&self) -> Vec<u64> {
        self.state.qubit_tags()
    }
}

/// An empty share.
#[derive(Clone, Copy, Debug, Default)]
pub struct NoShare;

impl QubitHolder for NoShare {
    fn qubit_tags(&self) -> Vec<u64> {
        Vec::new()
    }
}

/// A pirate `(A, B, C)` against a scheme without an oracle.
pub trait PlainPirate<P: PlainScheme>: Sync {
    type ShareB: QubitHolder + Send;
    type ShareC: QubitHolder + Send;

    /// `A`: any channel from the program to two shares.
    fn split(&self, scheme: &P, program: P::Program, rng: &mut SeededRng) -> Result<(Self::ShareB, Self::ShareC), HarnessError>;
    fn answer_b(&self, scheme: &P, share: Self::ShareB, x: &Bits, rng: &mut SeededRng) -> Result<Bits, HarnessError>;
    fn answer_c(&self, scheme: &P, share: Self::ShareC, x: &Bits, rng: &mut SeededRng) -> Result<Bits, HarnessError>;
}

/// A pirate against a scheme in the random oracle model. All three parties
/// may query the oracle.
pub trait OraclePirate<S: CopyProtectionScheme>: Sync {
    type ShareB: QubitHolder + Send;
    type ShareC: QubitHolder + Send;

    fn split(
        &self,
        scheme: &S,
        state: StateOf<S>,
        oracle: &mut dyn ClassicalOracle,
        rng: &mut SeededRng,
    ) -> Result<(Self::ShareB, Self::ShareC), HarnessError>;
    fn answer_b(&self, scheme: &S, share: Self::ShareB, x: &Bits, oracle: &mut dyn ClassicalOracle, rng: &mut SeededRng) -> Result<Bits, HarnessError>;
    fn answer_c(&self, scheme: &S, share: Self::ShareC, x: &Bits, oracle: &mut dyn ClassicalOracle, rng: &mut SeededRng) -> Result<Bits, HarnessError>;
}

fn check_disjoint(b: &impl QubitHolder, c: &impl QubitHolder) -> Result<(), HarnessError> {
    let tb: BTreeSet<u64> = b.qubit_tags().into_iter().collect();
    if c.qubit_tags().iter().any(|t| tb.contains(t)) {
        return Err(HarnessError::SharedQubits);
    }
    Ok(())
}

/// The piracy game for a plain scheme.
pub fn run_piracy_experiment<P, A>(scheme: &P, pirate: &A, trials: u64, seed: u64) -> Result<ExperimentReport, HarnessError>
where
    P: PlainScheme,
    A: PlainPirate<P>,
{
    let outcomes = map_trials(seed, trials, |_, rng| {
        let d = scheme.sample_function(rng);
        let program = scheme.generate(&d, rng)?;
        let (b, c) = pirate.split(scheme, program, rng)?;
        check_disjoint(&b, &c)?;
        let (xb, xc) = (scheme.sample_challenge(&d, rng), scheme.sample_challenge(&d, rng));
        let (mut rb, mut rc) = (rng.fork(), rng.fork());
        let yb = pirate.answer_b(scheme, b, &xb, &mut rb)?;
        let yc = pirate.answer_c(scheme, c, &xc, &mut rc)?;
        Ok(yb == scheme.function_value(&d, &xb) && yc == scheme.function_value(&d, &xc))
    });
    collect("piracy", outcomes, seed)
}

/// The piracy game for an oracle scheme, with a lazily sampled oracle shared
/// by the challenger and all three parties.
pub fn run_oracle_piracy_experiment<S, A>(scheme: &S, pirate: &A, trials: u64, seed: u64) -> Result<ExperimentReport, HarnessError>
where
    S: CopyProtectionScheme,
    A: OraclePirate<S>,
{
    let p = scheme.params();
    let outcomes = map_trials(seed, trials, |_, rng| {
        let mut oracle = OnTheFlyOracle::new(p.oracle_in_len, p.oracle_out_len, rng.fork());
        let d = scheme.sample_function(rng);
        let state = cp(scheme, &d, &mut oracle, rng)?;
        let (b, c) = pirate.split(scheme, state, &mut oracle, rng)?;
        check_disjoint(&b, &c)?;
        let (xb, xc) = (scheme.sample_challenge(&d, rng), scheme.sample_challenge(&d, rng));
        let (mut rb, mut rc) = (rng.fork(), rng.fork());
        let yb = pirate.answer_b(scheme, b, &xb, &mut oracle, &mut rb)?;
        let yc = pirate.answer_c(scheme, c, &xc, &mut oracle, &mut rc)?;
        Ok(yb == scheme.function_value(&d, &xb) && yc == scheme.function_value(&d, &xc))
    });
    collect("piracy_oracle", outcomes, seed)
}

fn collect(game: &str, outcomes: Vec<Result<bool, HarnessError>>, seed: u64) -> Result<ExperimentReport, HarnessError> {
    let outcomes = outcomes.into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok(ExperimentReport::from_outcomes(game, &outcomes, seed))
}

/// The oracle-model pirate built from a pirate against the compiled scheme.
///
/// Given `ρ_f` and the live oracle, it runs the compiler's random number of
/// test evaluations itself, records their queries, samples the tape and hands
/// the packaged program to the plain pirate. `B` and `C` are unchanged.
pub struct LiftedPirate<S, A> {
    pub compiled: CompiledScheme<S>,
    pub plain: A,
}

impl<S: CopyProtectionScheme, A: PlainPirate<CompiledScheme<S>>> LiftedPirate<S, A> {
    pub fn new(compiled: CompiledScheme<S>, plain: A) -> Self {
        Self { compiled, plain }
    }
}

/// [`LiftedPirate`] construction, exposed as a function.
pub fn lift_pirate<S, A>(compiled: CompiledScheme<S>, plain: A) -> LiftedPirate<S, A>
where
    S: CopyProtectionScheme,
    A: PlainPirate<CompiledScheme<S>>,
{
    LiftedPirate::new(compiled, plain)
}

impl<S, A> OraclePirate<S> for LiftedPirate<S, A>
where
    S: CopyProtectionScheme,
    A: PlainPirate<CompiledScheme<S>>,
{
    type ShareB = A::ShareB;
    type ShareC = A::ShareC;

    fn split(
        &self,
        scheme: &S,
        mut state: StateOf<S>,
        oracle: &mut dyn ClassicalOracle,
        rng: &mut SeededRng,
    ) -> Result<(A::ShareB, A::ShareC), HarnessError> {
        let p = scheme.params();
        let t = self.compiled.config.test_budget_for(&p);
        let s = self.compiled.config.sample_stop(t, rng);
        let budget = (s as usize) * p.eval_queries;
        let mut recorder = RecordingOracle::new(BoundedOracle::new(oracle, budget));
        for _ in 0..s {
            let x = scheme.sample_input(rng);
            let (next, _) = eval(scheme, state, &x, &mut recorder, rng)?;
            state = next;
        }
        let (bounded, transcript) = recorder.into_parts();
        assert!(bounded.used() <= budget, "lifted pirate exceeded S·N queries");
        let mut database = OracleDatabase::new(p.oracle_in_len, p.oracle_out_len);
        for r in &transcript.records {
            database.insert(r.input, r.output)?;
        }
        let tape = AnswerTape::sample(p.eval_queries, p.oracle_out_len, rng);
        let program = DeoraclizedProgram {
            state,
            database,
            tape,
            s_used: s,
        };
        self.plain.split(&self.compiled, program, rng)
    }

    fn answer_b(&self, _: &S, share: A::ShareB, x: &Bits, _: &mut dyn ClassicalOracle, rng: &mut SeededRng) -> Result<Bits, HarnessError> {
        self.plain.answer_b(&self.compiled, share, x, rng)
    }

    fn answer_c(&self, _: &S, share: A::ShareC, x: &Bits, _: &mut dyn ClassicalOracle, rng: &mut SeededRng) -> Result<Bits, HarnessError> {
        self.plain.answer_c(&self.compiled, share, x, rng)
    }
}

/// Success of a plain pirate on the compiled scheme and of its lift on the
/// base scheme.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct LiftComparison {
    pub plain: ExperimentReport,
    pub lifted: ExperimentReport,
    pub difference: f64,
    pub combined_stderr: f64,
}

impl LiftComparison {
    pub fn within(&self, k: f64) -> bool {
        self.difference.abs() <= k * self.combined_stderr
    }
}

pub fn compare_lift<S, A>(compiled: &CompiledScheme<S>, pirate: A, trials: u64, seed: u64) -> Result<LiftComparison, HarnessError>
where
    S: CopyProtectionScheme + Clone,
    A: PlainPirate<CompiledScheme<S>> + Clone,
{
    let plain = run_piracy_experiment(compiled, &pirate, trials, seed)?;
    let lifted_pirate = lift_pirate(compiled.clone(), pirate);
    let lifted = run_oracle_piracy_experiment(&compiled.scheme, &lifted_pirate, trials, seed ^ 0x9e37_79b9_7f4a_7c15)?;
    Ok(LiftComparison {
        difference: plain.estimate - lifted.estimate,
        combined_stderr: plain.combined_stderr(&lifted),
        plain,
        lifted,
    })
}
