//! Concrete pirates.

use crate::bits::Bits;
use crate::deoraclizer::{CompiledScheme, DeoraclizedProgram};
use crate::qsim::state::hadamard;
use crate::qsim::Register;
use crate::rng::SeededRng;
use crate::schemes::{ConjugateClassical, ConjugateScheme, PlainScheme, QuantumRegister};

use super::piracy::{NoShare, PlainPirate, QubitHolder};
use super::HarnessError;

/// Copies the whole program to both parties, who evaluate honestly. Valid
/// only for programs without qubits.
#[derive(Clone, Copy, Debug, Default)]
pub struct ClassicalClonePirate;

impl<P> PlainPirate<P> for ClassicalClonePirate
where
    P: PlainScheme,
    P::Program: QubitHolder + Send,
{
    type ShareB = P::Program;
    type ShareC = P::Program;

    fn split(&self, _: &P, program: P::Program, _: &mut SeededRng) -> Result<(P::Program, P::Program), HarnessError> {
        Ok((program.clone(), program))
    }
    fn answer_b(&self, scheme: &P, share: P::Program, x: &Bits, rng: &mut SeededRng) -> Result<Bits, HarnessError> {
        Ok(scheme.run(share, x, rng)?.1)
    }
    fn answer_c(&self, scheme: &P, share: P::Program, x: &Bits, rng: &mut SeededRng) -> Result<Bits, HarnessError> {
        Ok(scheme.run(share, x, rng)?.1)
    }
}

/// `B` keeps the program; `C` gets nothing and answers uniformly.
#[derive(Clone, Copy, Debug, Default)]
pub struct SoloPirate;

impl<P> PlainPirate<P> for SoloPirate
where
    P: PlainScheme,
    P::Program: QubitHolder + Send,
{
    type ShareB = P::Program;
    type ShareC = NoShare;

    fn split(&self, _: &P, program: P::Program, _: &mut SeededRng) -> Result<(P::Program, NoShare), HarnessError> {
        Ok((program, NoShare))
    }
    fn answer_b(&self, scheme: &P, share: P::Program, x: &Bits, rng: &mut SeededRng) -> Result<Bits, HarnessError> {
        Ok(scheme.run(share, x, rng)?.1)
    }
    fn answer_c(&self, scheme: &P, _: NoShare, _: &Bits, rng: &mut SeededRng) -> Result<Bits, HarnessError> {
        Ok(Bits::random(scheme.params().output_len, rng))
    }
}

type ConjugateProgram = DeoraclizedProgram<ConjugateClassical>;
type CompiledConjugate = CompiledScheme<ConjugateScheme>;

fn key_register(program: &ConjugateProgram) -> Result<&QuantumRegister, HarnessError> {
    program
        .state
        .quantum
        .as_ref()
        .ok_or(HarnessError::Pirate("program has no key register"))
}

/// Measures every key qubit in the basis published in the classical part and
/// hands each party a freshly prepared copy.
#[derive(Clone, Copy, Debug, Default)]
pub struct ConjugateMeasureClonePirate;

impl PlainPirate<CompiledConjugate> for ConjugateMeasureClonePirate {
    type ShareB = ConjugateProgram;
    type ShareC = ConjugateProgram;

    fn split(&self, _: &CompiledConjugate, mut program: ConjugateProgram, rng: &mut SeededRng) -> Result<(ConjugateProgram, ConjugateProgram), HarnessError> {
        let bases = program.state.classical.bases.clone();
        let mut s = key_register(&program)?.state().clone();
        for (q, h) in bases.iter().enumerate() {
            if *h {
                s.apply_gate(q, &hadamard());
            }
        }
        let (k, _) = s.measure_register(Register::new(0, bases.len()), rng)?;
        let key = Bits::new(k as u64, bases.len() as u32)?;
        let fresh = || ConjugateScheme::encode_key(&key, &bases).map(QuantumRegister::prepare);
        let mut copy = program.clone();
        copy.state.quantum = Some(fresh()?);
        program.state.quantum = Some(fresh()?);
        Ok((program, copy))
    }
    fn answer_b(&self, scheme: &CompiledConjugate, share: ConjugateProgram, x: &Bits, rng: &mut SeededRng) -> Result<Bits, HarnessError> {
        Ok(scheme.run(share, x, rng)?.1)
    }
    fn answer_c(&self, scheme: &CompiledConjugate, share: ConjugateProgram, x: &Bits, rng: &mut SeededRng) -> Result<Bits, HarnessError> {
        Ok(scheme.run(share, x, rng)?.1)
    }
}

/// One half of the key register plus a copy of the classical data.
#[derive(Clone, Debug)]
pub struct HalfKeyShare {
    pub program: ConjugateProgram,
    pub part: QuantumRegister,
    /// Index of the first key qubit in `part`.
    pub offset: usize,
}

impl QubitHolder for HalfKeyShare {
    fn qubit_tags(&self) -> Vec<u64> {
        self.part.tags().to_vec()
    }
}

/// Splits the key qubits in half; each party guesses the bits it lacks,
/// encodes them in the published bases and evaluates honestly.
#[derive(Clone, Copy, Debug, Default)]
pub struct ConjugateHalfSplitPirate;

impl ConjugateHalfSplitPirate {
    fn answer(scheme: &CompiledConjugate, share: HalfKeyShare, x: &Bits, rng: &mut SeededRng) -> Result<Bits, HarnessError> {
        let HalfKeyShare { mut program, part, offset } = share;
        let bases = program.state.classical.bases.clone();
        let n = bases.len();
        let have = part.num_qubits();
        let missing: Vec<usize> = (0..n).filter(|q| *q < offset || *q >= offset + have).collect();
        let guess = Bits::random(missing.len() as u32, rng);
        let missing_bases: Vec<bool> = missing.iter().map(|q| bases[*q]).collect();
        let guessed = QuantumRegister::prepare(ConjugateScheme::encode_key(&guess, &missing_bases)?);
        let full = if offset == 0 { part.join(guessed)? } else { guessed.join(part)? };
        program.state.quantum = Some(full);
        Ok(scheme.run(program, x, rng)?.1)
    }
}

impl PlainPirate<CompiledConjugate> for ConjugateHalfSplitPirate {
    type ShareB = HalfKeyShare;
    type ShareC = HalfKeyShare;

    fn split(&self, _: &CompiledConjugate, mut program: ConjugateProgram, _: &mut SeededRng) -> Result<(HalfKeyShare, HalfKeyShare), HarnessError> {
        let register = program
            .state
            .quantum
            .take()
            .ok_or(HarnessError::Pirate("program has no key register"))?;
        let n = register.num_qubits();
        if n < 2 {
            return Err(HarnessError::Pirate("need at least two key qubits to split"));
        }
        let at = n / 2;
        let (left, right) = register.split(at)?;
        Ok((
            HalfKeyShare {
                program: program.clone(),
                part: left,
                offset: 0,
            },
            HalfKeyShare {
                program,
                part: right,
                offset: at,
            },
        ))
    }
    fn answer_b(&self, scheme: &CompiledConjugate, share: HalfKeyShare, x: &Bits, rng: &mut SeededRng) -> Result<Bits, HarnessError> {
        Self::answer(scheme, share, x, rng)
    }
    fn answer_c(&self, scheme: &CompiledConjugate, share: HalfKeyShare, x: &Bits, rng: &mut SeededRng) -> Result<Bits, HarnessError> {
        Self::answer(scheme, share, x, rng)
    }
}
