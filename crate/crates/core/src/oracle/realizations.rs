use std::collections::HashMap;
use std::sync::Arc;

use super::database::{AnswerTape, OracleDatabase, QueryTranscript};
use super::{check_len, ClassicalOracle, OracleError};
use crate::bits::Bits;
use crate::rng::SeededRng;

/// A random oracle simulated by lazy sampling.
#[derive(Clone, Debug)]
pub struct OnTheFlyOracle {
    db: OracleDatabase,
    rng: SeededRng,
}

impl OnTheFlyOracle {
    pub fn new(in_len: u32, out_len: u32, rng: SeededRng) -> Self {
        Self {
            db: OracleDatabase::new(in_len, out_len),
            rng,
        }
    }

    /// Continue a simulation whose answers so far are `db`.
    pub fn resume(db: OracleDatabase, rng: SeededRng) -> Self {
        Self { db, rng }
    }

    pub fn database(&self) -> &OracleDatabase {
        &self.db
    }

    pub fn into_database(self) -> OracleDatabase {
        self.db
    }
}

impl ClassicalOracle for OnTheFlyOracle {
    fn in_len(&self) -> u32 {
        self.db.in_len()
    }
    fn out_len(&self) -> u32 {
        self.db.out_len()
    }
    fn query(&mut self, x: &Bits) -> Result<Bits, OracleError> {
        let out_len = self.db.out_len();
        let rng = &mut self.rng;
        Ok(self.db.get_or_insert_with(x, || Bits::random(out_len, rng))?.0)
    }
}

/// A fixed, fully specified function.
#[derive(Clone)]
pub struct FixedFunctionOracle {
    in_len: u32,
    out_len: u32,
    f: Arc<dyn Fn(&Bits) -> Bits + Send + Sync>,
}

impl FixedFunctionOracle {
    pub fn new(in_len: u32, out_len: u32, f: impl Fn(&Bits) -> Bits + Send + Sync + 'static) -> Self {
        Self {
            in_len,
            out_len,
            f: Arc::new(f),
        }
    }

    /// The function `x ↦ table[x]`.
    pub fn from_table(in_len: u32, out_len: u32, table: Vec<Bits>) -> Self {
        assert_eq!(table.len(), 1usize << in_len, "table must cover the domain");
        Self::new(in_len, out_len, move |x| table[x.value() as usize])
    }
}

impl std::fmt::Debug for FixedFunctionOracle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "FixedFunctionOracle({} -> {} bits)", self.in_len, self.out_len)
    }
}

impl ClassicalOracle for FixedFunctionOracle {
    fn in_len(&self) -> u32 {
        self.in_len
    }
    fn out_len(&self) -> u32 {
        self.out_len
    }
    fn query(&mut self, x: &Bits) -> Result<Bits, OracleError> {
        check_len(x, self.in_len)?;
        let y = (self.f)(x);
        check_len(&y, self.out_len)?;
        Ok(y)
    }
}

/// Answers from a recorded database, falling back to the tape answer indexed
/// by the position of the query among the distinct queries of this run.
#[derive(Debug)]
pub struct ReplayOracle<'a> {
    db: &'a OracleDatabase,
    tape: &'a AnswerTape,
    cache: HashMap<Bits, Bits>,
    distinct: usize,
}

impl<'a> ReplayOracle<'a> {
    pub fn new(db: &'a OracleDatabase, tape: &'a AnswerTape) -> Self {
        Self {
            db,
            tape,
            cache: HashMap::new(),
            distinct: 0,
        }
    }

    /// Number of distinct queries answered so far.
    pub fn distinct_queries(&self) -> usize {
        self.distinct
    }
}

impl ClassicalOracle for ReplayOracle<'_> {
    fn in_len(&self) -> u32 {
        self.db.in_len()
    }
    fn out_len(&self) -> u32 {
        self.db.out_len()
    }
    fn query(&mut self, x: &Bits) -> Result<Bits, OracleError> {
        check_len(x, self.db.in_len())?;
        if let Some(y) = self.cache.get(x) {
            return Ok(*y);
        }
        let j = self.distinct + 1;
        let y = match self.db.get(x) {
            Some(y) => y,
            None if j > self.tape.len() => return Err(OracleError::TapeExhausted { len: self.tape.len() }),
            None => self.tape.get(j)?,
        };
        self.distinct = j;
        self.cache.insert(*x, y);
        Ok(y)
    }
}

/// The live oracle with its fresh randomness taken from a tape: the `j`-th
/// distinct query is answered from `live` if recorded there and otherwise by
/// `r_j`, which is then recorded. Distributed exactly as the live oracle, and
/// agrees with [`ReplayOracle`] whenever no query hits `live` outside the
/// replay database.
#[derive(Debug)]
pub struct TapeCoupledOracle<'a> {
    live: &'a mut OracleDatabase,
    tape: &'a AnswerTape,
    seen: HashMap<Bits, Bits>,
}

impl<'a> TapeCoupledOracle<'a> {
    pub fn new(live: &'a mut OracleDatabase, tape: &'a AnswerTape) -> Self {
        Self {
            live,
            tape,
            seen: HashMap::new(),
        }
    }
}

impl ClassicalOracle for TapeCoupledOracle<'_> {
    fn in_len(&self) -> u32 {
        self.live.in_len()
    }
    fn out_len(&self) -> u32 {
        self.live.out_len()
    }
    fn query(&mut self, x: &Bits) -> Result<Bits, OracleError> {
        if let Some(y) = self.seen.get(x) {
            return Ok(*y);
        }
        let j = self.seen.len() + 1;
        let y = match self.live.get(x) {
            Some(y) => y,
            None => {
                let y = if j <= self.tape.len() {
                    self.tape.get(j)?
                } else {
                    return Err(OracleError::TapeExhausted { len: self.tape.len() });
                };
                self.live.insert(*x, y)?;
                y
            }
        };
        self.seen.insert(*x, y);
        Ok(y)
    }
}

/// Enforces a query bound on the wrapped oracle.
#[derive(Debug)]
pub struct BoundedOracle<O> {
    inner: O,
    bound: usize,
    used: usize,
}

impl<O: ClassicalOracle> BoundedOracle<O> {
    pub fn new(inner: O, bound: usize) -> Self {
        Self { inner, bound, used: 0 }
    }

    pub fn used(&self) -> usize {
        self.used
    }

    pub fn into_inner(self) -> O {
        self.inner
    }
}

impl<O: ClassicalOracle> ClassicalOracle for BoundedOracle<O> {
    fn in_len(&self) -> u32 {
        self.inner.in_len()
    }
    fn out_len(&self) -> u32 {
        self.inner.out_len()
    }
    fn query(&mut self, x: &Bits) -> Result<Bits, OracleError> {
        if self.used == self.bound {
            return Err(OracleError::QueryBound { bound: self.bound });
        }
        self.used += 1;
        self.inner.query(x)
    }
}

/// Records every query into a transcript.
#[derive(Debug)]
pub struct RecordingOracle<O> {
    inner: O,
    transcript: QueryTranscript,
}

impl<O: ClassicalOracle> RecordingOracle<O> {
    pub fn new(inner: O) -> Self {
        Self {
            inner,
            transcript: QueryTranscript::default(),
        }
    }

    pub fn transcript(&self) -> &QueryTranscript {
        &self.transcript
    }

    pub fn into_parts(self) -> (O, QueryTranscript) {
        (self.inner, self.transcript)
    }
}

impl<O: ClassicalOracle> ClassicalOracle for RecordingOracle<O> {
    fn in_len(&self) -> u32 {
        self.inner.in_len()
    }
    fn out_len(&self) -> u32 {
        self.inner.out_len()
    }
    fn query(&mut self, x: &Bits) -> Result<Bits, OracleError> {
        let y = self.inner.query(x)?;
        self.transcript.push(*x, y);
        Ok(y)
    }
}

/// `x ↦ O(x ‖ suffix)`.
#[derive(Debug)]
pub struct SuffixedOracle<O> {
    inner: O,
    suffix: Bits,
}

impl<O: ClassicalOracle> SuffixedOracle<O> {
    pub fn new(inner: O, suffix: Bits) -> Self {
        assert!(suffix.len() <= inner.in_len(), "suffix longer than the oracle input");
        Self { inner, suffix }
    }
}

impl<O: ClassicalOracle> ClassicalOracle for SuffixedOracle<O> {
    fn in_len(&self) -> u32 {
        self.inner.in_len() - self.suffix.len()
    }
    fn out_len(&self) -> u32 {
        self.inner.out_len()
    }
    fn query(&mut self, x: &Bits) -> Result<Bits, OracleError> {
        check_len(x, self.in_len())?;
        self.inner.query(&x.concat(&self.suffix)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(v: u64, len: u32) -> Bits {
        Bits::new(v, len).unwrap()
    }

    #[test]
    fn replay_counts_distinct_queries() {
        let mut db = OracleDatabase::new(4, 4);
        db.insert(b(1, 4), b(7, 4)).unwrap();
        let tape = AnswerTape::from_answers(4, vec![b(10, 4), b(11, 4), b(12, 4)]).unwrap();
        let mut o = ReplayOracle::new(&db, &tape);
        assert_eq!(o.query(&b(2, 4)).unwrap(), b(10, 4));
        assert_eq!(o.query(&b(2, 4)).unwrap(), b(10, 4));
        assert_eq!(o.query(&b(1, 4)).unwrap(), b(7, 4));
        assert_eq!(o.query(&b(3, 4)).unwrap(), b(12, 4));
        assert_eq!(o.distinct_queries(), 3);
        assert!(matches!(o.query(&b(4, 4)), Err(OracleError::TapeExhausted { len: 3 })));
    }

    #[test]
    fn replay_is_deterministic() {
        let mut rng = SeededRng::new(3);
        let mut live = OnTheFlyOracle::new(6, 5, rng.fork());
        for i in 0..10 {
            live.query(&b(i, 6)).unwrap();
        }
        let db = live.into_database();
        let tape = AnswerTape::sample(4, 5, &mut rng);
        let run = || {
            let mut o = RecordingOracle::new(ReplayOracle::new(&db, &tape));
            for x in [3, 40, 3, 9, 41] {
                o.query(&b(x, 6)).unwrap();
            }
            o.into_parts().1
        };
        let (t1, t2) = (run(), run());
        assert_eq!(t1, t2);
        assert!(t1.is_consistent());
    }

    #[test]
    fn bounded_oracle_enforces_limit() {
        let mut o = BoundedOracle::new(OnTheFlyOracle::new(3, 3, SeededRng::new(0)), 2);
        o.query(&b(0, 3)).unwrap();
        o.query(&b(0, 3)).unwrap();
        assert!(matches!(o.query(&b(1, 3)), Err(OracleError::QueryBound { bound: 2 })));
    }

    #[test]
    fn suffix_and_fixed_function() {
        let f = FixedFunctionOracle::new(5, 5, |x| Bits::truncated(x.value() ^ 0b10101, 5));
        let mut s = SuffixedOracle::new(f, b(0b01, 2));
        assert_eq!(s.in_len(), 3);
        assert_eq!(s.query(&b(0b110, 3)).unwrap(), b(0b11001 ^ 0b10101, 5));
        assert!(s.query(&b(0, 4)).is_err());
    }

    #[test]
    fn tape_coupled_uses_live_entries_first() {
        let mut live = OracleDatabase::new(4, 4);
        live.insert(b(1, 4), b(7, 4)).unwrap();
        let tape = AnswerTape::from_answers(4, vec![b(10, 4), b(11, 4)]).unwrap();
        let mut o = TapeCoupledOracle::new(&mut live, &tape);
        assert_eq!(o.query(&b(1, 4)).unwrap(), b(7, 4));
        assert_eq!(o.query(&b(2, 4)).unwrap(), b(11, 4));
        assert_eq!(live.get(&b(2, 4)), Some(b(11, 4)));
    }
}
