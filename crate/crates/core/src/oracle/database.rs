use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{check_len, OracleError};
use crate::bits::Bits;
use crate::rng::SeededRng;

/// A partial function from `in_len`-bit inputs to `out_len`-bit outputs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleDatabase {
    in_len: u32,
    out_len: u32,
    entries: BTreeMap<Bits, Bits>,
}

impl OracleDatabase {
    pub fn new(in_len: u32, out_len: u32) -> Self {
        Self {
            in_len,
            out_len,
            entries: BTreeMap::new(),
        }
    }

    pub fn in_len(&self) -> u32 {
        self.in_len
    }

    pub fn out_len(&self) -> u32 {
        self.out_len
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, x: &Bits) -> Option<Bits> {
        self.entries.get(x).copied()
    }

    pub fn contains(&self, x: &Bits) -> bool {
        self.entries.contains_key(x)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Bits, &Bits)> {
        self.entries.iter()
    }

    pub fn inputs(&self) -> BTreeSet<Bits> {
        self.entries.keys().copied().collect()
    }

    /// Insert `(x, y)`. Re-inserting an identical pair is a no-op; a
    /// conflicting output is an error.
    pub fn insert(&mut self, x: Bits, y: Bits) -> Result<(), OracleError> {
        check_len(&x, self.in_len)?;
        check_len(&y, self.out_len)?;
        match self.entries.get(&x) {
            Some(old) if *old != y => Err(OracleError::Inconsistent { input: x }),
            _ => {
                self.entries.insert(x, y);
                Ok(())
            }
        }
    }

    /// The stored answer for `x`, or `sample()` recorded as the answer.
    /// Returns the answer and whether it was freshly sampled.
    pub fn get_or_insert_with(
        &mut self,
        x: &Bits,
        sample: impl FnOnce() -> Bits,
    ) -> Result<(Bits, bool), OracleError> {
        check_len(x, self.in_len)?;
        if let Some(y) = self.entries.get(x) {
            return Ok((*y, false));
        }
        let y = sample();
        check_len(&y, self.out_len)?;
        self.entries.insert(*x, y);
        Ok((y, true))
    }

    /// Restriction to the given inputs.
    pub fn restricted_to<'a>(&self, inputs: impl IntoIterator<Item = &'a Bits>) -> Self {
        let mut out = Self::new(self.in_len, self.out_len);
        for x in inputs {
            if let Some(y) = self.entries.get(x) {
                out.entries.insert(*x, *y);
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("database serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, OracleError> {
        serde_json::from_str(s).map_err(|e| OracleError::Format(e.to_string()))
    }
}

#[derive(Serialize, Deserialize)]
struct DatabaseRepr {
    in_len: u32,
    out_len: u32,
    entries: BTreeMap<String, String>,
}

impl Serialize for OracleDatabase {
    /// Hex inputs mapped to hex outputs, keys in sorted order.
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        DatabaseRepr {
            in_len: self.in_len,
            out_len: self.out_len,
            entries: self.entries.iter().map(|(x, y)| (x.to_hex(), y.to_hex())).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for OracleDatabase {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let r = DatabaseRepr::deserialize(d)?;
        let mut db = OracleDatabase::new(r.in_len, r.out_len);
        for (x, y) in &r.entries {
            let x = Bits::from_hex(x, r.in_len).map_err(D::Error::custom)?;
            let y = Bits::from_hex(y, r.out_len).map_err(D::Error::custom)?;
            db.insert(x, y).map_err(D::Error::custom)?;
        }
        Ok(db)
    }
}

/// Pre-sampled answers `r_1..r_N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnswerTape {
    out_len: u32,
    answers: Vec<Bits>,
}

impl AnswerTape {
    pub fn sample(len: usize, out_len: u32, rng: &mut SeededRng) -> Self {
        Self {
            out_len,
            answers: (0..len).map(|_| Bits::random(out_len, rng)).collect(),
        }
    }

    pub fn from_answers(out_len: u32, answers: Vec<Bits>) -> Result<Self, OracleError> {
        for a in &answers {
            check_len(a, out_len)?;
        }
        Ok(Self { out_len, answers })
    }

    pub fn len(&self) -> usize {
        self.answers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.answers.is_empty()
    }

    pub fn out_len(&self) -> u32 {
        self.out_len
    }

    /// `r_j`, 1-based.
    pub fn get(&self, j: usize) -> Result<Bits, OracleError> {
        if j == 0 || j > self.answers.len() {
            return Err(OracleError::TapeIndex {
                index: j,
                len: self.answers.len(),
            });
        }
        Ok(self.answers[j - 1])
    }

    pub fn answers(&self) -> &[Bits] {
        &self.answers
    }
}

#[derive(Serialize, Deserialize)]
struct TapeRepr {
    out_len: u32,
    answers: Vec<String>,
}

impl Serialize for AnswerTape {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        TapeRepr {
            out_len: self.out_len,
            answers: self.answers.iter().map(Bits::to_hex).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for AnswerTape {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let r = TapeRepr::deserialize(d)?;
        let answers = r
            .answers
            .iter()
            .map(|h| Bits::from_hex(h, r.out_len))
            .collect::<Result<Vec<_>, _>>()
            .map_err(D::Error::custom)?;
        Ok(AnswerTape {
            out_len: r.out_len,
            answers,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryRecord {
    pub input: Bits,
    pub output: Bits,
    /// First occurrence of `input` in the transcript.
    pub fresh: bool,
}

/// Ordered queries made during one execution.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryTranscript {
    pub records: Vec<QueryRecord>,
}

impl QueryTranscript {
    pub fn push(&mut self, input: Bits, output: Bits) {
        let fresh = !self.records.iter().any(|r| r.input == input);
        self.records.push(QueryRecord { input, output, fresh });
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn inputs(&self) -> BTreeSet<Bits> {
        self.records.iter().map(|r| r.input).collect()
    }

    /// Whether repeated inputs always received the same output.
    pub fn is_consistent(&self) -> bool {
        let mut seen = BTreeMap::new();
        self.records
            .iter()
            .all(|r| *seen.entry(r.input).or_insert(r.output) == r.output)
    }
}

/// Lazily sampled random-oracle answer. Returns the answer and the database
/// extended with it; `db` itself is left untouched.
pub fn on_the_fly_answer(
    db: &OracleDatabase,
    x: &Bits,
    rng: &mut SeededRng,
) -> Result<(Bits, OracleDatabase), OracleError> {
    check_len(x, db.in_len)?;
    if let Some(y) = db.get(x) {
        return Ok((y, db.clone()));
    }
    let mut next = db.clone();
    let (y, _) = next.get_or_insert_with(x, || Bits::random(db.out_len, rng))?;
    Ok((y, next))
}

/// `db[x]` when recorded, otherwise the tape answer `r_j`.
pub fn replay_answer(db: &OracleDatabase, tape: &AnswerTape, j: usize, x: &Bits) -> Result<Bits, OracleError> {
    check_len(x, db.in_len)?;
    if j == 0 || j > tape.len() {
        return Err(OracleError::TapeIndex { index: j, len: tape.len() });
    }
    match db.get(x) {
        Some(y) => Ok(y),
        None => tape.get(j),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::distribution::{ChiSquared, ContinuousCDF};

    fn b(v: u64, len: u32) -> Bits {
        Bits::new(v, len).unwrap()
    }

    #[test]
    fn repeated_query_is_consistent() {
        let mut rng = SeededRng::new(1);
        let db = OracleDatabase::new(8, 8);
        let (y1, db1) = on_the_fly_answer(&db, &b(3, 8), &mut rng).unwrap();
        let (y2, db2) = on_the_fly_answer(&db1, &b(3, 8), &mut rng).unwrap();
        assert_eq!(y1, y2);
        assert_eq!(db.len(), 0);
        assert_eq!(db1.len(), 1);
        assert_eq!(db2, db1);
    }

    #[test]
    fn golden_first_answer() {
        let mut rng = SeededRng::new(42);
        let (y, _) = on_the_fly_answer(&OracleDatabase::new(8, 8), &Bits::zeros(8), &mut rng).unwrap();
        assert_eq!(y, b(GOLDEN_SEED_42, 8));
    }

    const GOLDEN_SEED_42: u64 = 0xa1;

    #[test]
    fn fresh_answers_are_uniform() {
        let mut rng = SeededRng::new(2024);
        let mut db = OracleDatabase::new(17, 4);
        let mut counts = [0u64; 16];
        for i in 0..100_000u64 {
            let (y, _) = db.get_or_insert_with(&b(i, 17), || Bits::random(4, &mut rng)).unwrap();
            counts[y.value() as usize] += 1;
        }
        let expected = 100_000.0 / 16.0;
        let stat: f64 = counts.iter().map(|c| (*c as f64 - expected).powi(2) / expected).sum();
        let p = 1.0 - ChiSquared::new(15.0).unwrap().cdf(stat);
        assert!(p > 0.001, "chi-square {stat}, p = {p}");
    }

    #[test]
    fn length_mismatch_is_rejected() {
        let mut rng = SeededRng::new(0);
        assert!(matches!(
            on_the_fly_answer(&OracleDatabase::new(8, 8), &b(1, 7), &mut rng),
            Err(OracleError::LengthMismatch { expected: 8, found: 7 })
        ));
        let mut db = OracleDatabase::new(2, 2);
        db.insert(b(1, 2), b(2, 2)).unwrap();
        db.insert(b(1, 2), b(2, 2)).unwrap();
        assert!(matches!(db.insert(b(1, 2), b(3, 2)), Err(OracleError::Inconsistent { .. })));
    }

    #[test]
    fn replay_prefers_database_then_tape() {
        let mut db = OracleDatabase::new(4, 4);
        db.insert(b(5, 4), b(9, 4)).unwrap();
        let tape = AnswerTape::from_answers(4, vec![b(1, 4), b(2, 4), b(3, 4)]).unwrap();
        for j in 1..=3 {
            assert_eq!(replay_answer(&db, &tape, j, &b(5, 4)).unwrap(), b(9, 4));
        }
        assert_eq!(replay_answer(&db, &tape, 3, &b(6, 4)).unwrap(), b(3, 4));
        assert!(matches!(
            replay_answer(&db, &tape, 4, &b(6, 4)),
            Err(OracleError::TapeIndex { index: 4, len: 3 })
        ));
        assert!(replay_answer(&db, &tape, 0, &b(6, 4)).is_err());
    }

    #[test]
    fn canonical_json_round_trip() {
        let mut db = OracleDatabase::new(6, 8);
        db.insert(b(0x2a, 6), b(0xff, 8)).unwrap();
        db.insert(b(0x03, 6), b(0x10, 8)).unwrap();
        let json = db.to_json();
        assert_eq!(json, r#"{"in_len":6,"out_len":8,"entries":{"03":"10","2a":"ff"}}"#);
        assert_eq!(OracleDatabase::from_json(&json).unwrap(), db);

        let tape = AnswerTape::from_answers(4, vec![b(0xa, 4), b(0x1, 4)]).unwrap();
        let json = serde_json::to_string(&tape).unwrap();
        assert_eq!(json, r#"{"out_len":4,"answers":["a","1"]}"#);
        assert_eq!(serde_json::from_str::<AnswerTape>(&json).unwrap(), tape);
        assert!(OracleDatabase::from_json(r#"{"in_len":2,"out_len":2,"entries":{"7":"0"}}"#).is_err());
    }

    #[test]
    fn transcript_consistency() {
        let mut t = QueryTranscript::default();
        t.push(b(1, 2), b(3, 2));
        t.push(b(2, 2), b(0, 2));
        t.push(b(1, 2), b(3, 2));
        assert!(t.is_consistent());
        assert_eq!(t.records.iter().filter(|r| r.fresh).count(), 2);
        t.push(b(1, 2), b(2, 2));
        assert!(!t.is_consistent());
    }

    /// Joint answer counts over every assignment of the lazy sampler's draws.
    fn lazy_distribution(seq: &[Bits], out_len: u32) -> BTreeMap<Vec<Bits>, u64> {
        let distinct = seq.iter().collect::<BTreeSet<_>>().len() as u32;
        let outs = 1u64 << out_len;
        let mut dist = BTreeMap::new();
        for draws in 0..outs.pow(distinct) {
            let mut db = OracleDatabase::new(seq[0].len(), out_len);
            let mut k = 0;
            let answers: Vec<Bits> = seq
                .iter()
                .map(|x| {
                    db.get_or_insert_with(x, || {
                        let v = (draws / outs.pow(k)) % outs;
                        k += 1;
                        Bits::truncated(v, out_len)
                    })
                    .unwrap()
                    .0
                })
                .collect();
            *dist.entry(answers).or_insert(0) += 1;
        }
        dist
    }

    fn function_distribution(seq: &[Bits], in_len: u32, out_len: u32) -> BTreeMap<Vec<Bits>, u64> {
        let inputs = 1u64 << in_len;
        let outs = 1u64 << out_len;
        let mut dist = BTreeMap::new();
        for f in 0..outs.pow(inputs as u32) {
            let answers = seq
                .iter()
                .map(|x| Bits::truncated((f / outs.pow(x.value() as u32)) % outs, out_len))
                .collect();
            *dist.entry(answers).or_insert(0) += 1;
        }
        dist
    }

    #[test]
    fn lazy_sampling_matches_random_function_exactly() {
        let in_len = 2;
        for out_len in 1..=2u32 {
            for len in 1..=4u32 {
                for code in 0..4u64.pow(len) {
                    let seq: Vec<Bits> = (0..len).map(|i| b((code >> (2 * i)) & 3, in_len)).collect();
                    let mut lazy = lazy_distribution(&seq, out_len);
                    // rescale both to the same total mass
                    let lazy_total: u64 = lazy.values().sum();
                    let func = function_distribution(&seq, in_len, out_len);
                    let func_total: u64 = func.values().sum();
                    for v in lazy.values_mut() {
                        *v *= func_total;
                    }
                    let func: BTreeMap<_, _> = func.into_iter().map(|(k, v)| (k, v * lazy_total)).collect();
                    assert_eq!(lazy, func, "sequence {seq:?}");
                }
            }
        }
    }
}
