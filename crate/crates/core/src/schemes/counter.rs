use serde::{Deserialize, Serialize};

use super::{CopyProtectionScheme, ProtectedState, SchemeError, SchemeParams, TruthTable};
use crate::bits::Bits;
use crate::oracle::ClassicalOracle;
use crate::rng::SeededRng;

/// Width of the index appended to the key in query points.
const INDEX_BITS: u32 = 8;
const INPUT_BITS: u32 = 3;
const OUTPUT_BITS: u32 = 8;

/// Classical scheme whose queries drift with an internal counter.
///
/// CP queries `p_j = k ‖ j` for `j < M`, and stores the packed truth table
/// masked by a 64-bit `u` together with `z_j = u ⊕ O(p_j)`. The `c`-th
/// evaluation queries `p_{(cN + i) mod M}` for `i < N`, unmasks with the
/// first answer and increments `c`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CounterScheme {
    pub key_len: u32,
    pub points: usize,
    pub queries_per_eval: usize,
}

impl Default for CounterScheme {
    fn default() -> Self {
        Self {
            key_len: 8,
            points: 10,
            queries_per_eval: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CounterClassical {
    pub key: Bits,
    pub masked_table: Bits,
    pub masks: Vec<Bits>,
    pub counter: u64,
}

impl CounterScheme {
    pub fn new(key_len: u32, points: usize, queries_per_eval: usize) -> Result<Self, SchemeError> {
        if points == 0 || points > 1 << INDEX_BITS {
            return Err(SchemeError::Parameters(format!("M = {points} must be in 1..=256")));
        }
        if queries_per_eval == 0 || queries_per_eval > points {
            return Err(SchemeError::Parameters(format!("N = {queries_per_eval} must be in 1..=M")));
        }
        if key_len + INDEX_BITS > 64 {
            return Err(SchemeError::Parameters("key too long".into()));
        }
        Ok(Self {
            key_len,
            points,
            queries_per_eval,
        })
    }

    pub fn point(&self, key: &Bits, j: usize) -> Bits {
        key.concat(&Bits::truncated(j as u64, INDEX_BITS)).expect("fits in 64 bits")
    }

    /// Indices queried by the evaluation with counter value `counter`.
    pub fn indices(&self, counter: u64) -> impl Iterator<Item = usize> + '_ {
        let n = self.queries_per_eval as u64;
        (0..n).map(move |i| ((counter * n + i) % self.points as u64) as usize)
    }
}

fn pack(table: &TruthTable) -> Bits {
    table
        .values
        .iter()
        .fold(Bits::empty(), |acc, v| acc.concat(v).expect("64-bit table"))
}

impl CopyProtectionScheme for CounterScheme {
    type Description = TruthTable;
    type Classical = CounterClassical;

    fn params(&self) -> SchemeParams {
        SchemeParams {
            name: "counter".into(),
            lambda: self.key_len,
            cp_queries: self.points,
            eval_queries: self.queries_per_eval,
            oracle_in_len: self.key_len + INDEX_BITS,
            oracle_out_len: OUTPUT_BITS << INPUT_BITS,
            input_len: INPUT_BITS,
            output_len: OUTPUT_BITS,
            classical: true,
        }
    }

    fn sample_function(&self, rng: &mut SeededRng) -> TruthTable {
        TruthTable::random(INPUT_BITS, OUTPUT_BITS, rng)
    }

    fn function_value(&self, d: &TruthTable, x: &Bits) -> Bits {
        d.eval(x)
    }

    fn protect(
        &self,
        d: &TruthTable,
        oracle: &mut dyn ClassicalOracle,
        rng: &mut SeededRng,
    ) -> Result<ProtectedState<CounterClassical>, SchemeError> {
        let key = Bits::random(self.key_len, rng);
        let u = Bits::random(OUTPUT_BITS << INPUT_BITS, rng);
        let masks = (0..self.points)
            .map(|j| Ok(u.xor(&oracle.query(&self.point(&key, j))?)))
            .collect::<Result<Vec<_>, SchemeError>>()?;
        Ok(ProtectedState::classical_only(CounterClassical {
            key,
            masked_table: pack(d).xor(&u),
            masks,
            counter: 0,
        }))
    }

    fn evaluate(
        &self,
        mut state: ProtectedState<CounterClassical>,
        x: &Bits,
        oracle: &mut dyn ClassicalOracle,
        _rng: &mut SeededRng,
    ) -> Result<(ProtectedState<CounterClassical>, Bits), SchemeError> {
        let c = &mut state.classical;
        if c.masks.len() != self.points {
            return Err(SchemeError::Malformed("mask count differs from M"));
        }
        let mut u = None;
        for j in self.indices(c.counter) {
            let answer = oracle.query(&self.point(&c.key, j))?;
            u.get_or_insert(c.masks[j].xor(&answer));
        }
        let table = c.masked_table.xor(&u.expect("N ≥ 1"));
        c.counter += 1;
        let y = table.slice(x.value() as u32 * OUTPUT_BITS, OUTPUT_BITS);
        Ok((state, y))
    }
}
