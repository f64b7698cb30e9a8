//! The unlearnability game: a learner with black-box access to `f` must
//! output a program that is correct with probability at least `ν` on every
//! input.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::bits::Bits;
use crate::par::map_trials;
use crate::rng::SeededRng;

use super::{ExperimentReport, HarnessError};

/// Largest domain the game will enumerate.
pub const MAX_DOMAIN_BITS: u32 = 16;

/// A distribution `D_F` over functions on a small domain.
pub trait FunctionFamily: Sync {
    type Function: Send;
    fn input_len(&self) -> u32;
    fn output_len(&self) -> u32;
    fn sample(&self, rng: &mut SeededRng) -> Self::Function;
    fn eval(&self, f: &Self::Function, x: &Bits) -> Bits;
}

/// Point functions `f_a(x) = [x = a]` with `a` uniform.
#[derive(Clone, Copy, Debug)]
pub struct PointFunctions {
    pub input_len: u32,
}

impl FunctionFamily for PointFunctions {
    type Function = Bits;
    fn input_len(&self) -> u32 {
        self.input_len
    }
    fn output_len(&self) -> u32 {
        1
    }
    fn sample(&self, rng: &mut SeededRng) -> Bits {
        Bits::random(self.input_len, rng)
    }
    fn eval(&self, a: &Bits, x: &Bits) -> Bits {
        Bits::truncated((a == x) as u64, 1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LearnerConfig {
    /// Required per-input success probability.
    pub nu: f64,
    pub query_budget: usize,
}

/// The learner's output program, described by its output distribution on
/// each input.
pub trait Hypothesis {
    /// `Pr[U*(ρ*, x) = y]`.
    fn probability(&self, x: &Bits, y: &Bits) -> f64;
}

/// A deterministic hypothesis given as a table.
#[derive(Clone, Debug)]
pub struct TableHypothesis(pub Vec<Bits>);

impl Hypothesis for TableHypothesis {
    fn probability(&self, x: &Bits, y: &Bits) -> f64 {
        (self.0[x.value() as usize] == *y) as u64 as f64
    }
}

/// Black-box access to `f` with a hard query budget.
pub struct QueryAccess<'a> {
    f: &'a dyn Fn(&Bits) -> Bits,
    budget: usize,
    used: usize,
}

impl QueryAccess<'_> {
    pub fn query(&mut self, x: &Bits) -> Result<Bits, HarnessError> {
        if self.used == self.budget {
            return Err(HarnessError::QueryBudget(self.budget));
        }
        self.used += 1;
        Ok((self.f)(x))
    }

    pub fn remaining(&self) -> usize {
        self.budget - self.used
    }
}

pub trait Learner<F: FunctionFamily>: Sync {
    type Output: Hypothesis;
    fn learn(&self, family: &F, access: &mut QueryAccess<'_>, rng: &mut SeededRng) -> Result<Self::Output, HarnessError>;
}

/// Queries every input.
#[derive(Clone, Copy, Debug, Default)]
pub struct ExhaustiveLearner;

impl<F: FunctionFamily> Learner<F> for ExhaustiveLearner {
    type Output = TableHypothesis;
    fn learn(&self, family: &F, access: &mut QueryAccess<'_>, _: &mut SeededRng) -> Result<TableHypothesis, HarnessError> {
        let len = family.input_len();
        (0..1u64 << len)
            .map(|v| access.query(&Bits::truncated(v, len)))
            .collect::<Result<Vec<_>, _>>()
            .map(TableHypothesis)
    }
}

/// Queries `b` distinct random points of a point function; if the marked
/// point is not found, guesses it uniformly among the rest.
#[derive(Clone, Copy, Debug)]
pub struct BudgetLearner {
    pub queries: usize,
}

/// [`BudgetLearner`] with no queries.
pub const ZERO_QUERY_LEARNER: BudgetLearner = BudgetLearner { queries: 0 };

impl Learner<PointFunctions> for BudgetLearner {
    type Output = TableHypothesis;
    fn learn(&self, family: &PointFunctions, access: &mut QueryAccess<'_>, rng: &mut SeededRng) -> Result<TableHypothesis, HarnessError> {
        let len = family.input_len;
        let size = 1u64 << len;
        let mut tried = BTreeSet::new();
        let mut found = None;
        while tried.len() < self.queries.min(size as usize) && found.is_none() {
            let x = Bits::random(len, rng);
            if !tried.insert(x) {
                continue;
            }
            if access.query(&x)?.value() == 1 {
                found = Some(x);
            }
        }
        let marked = match found {
            Some(x) => x.value(),
            None if tried.len() as u64 == size => 0,
            None => loop {
                let g = Bits::random(len, rng);
                if !tried.contains(&g) {
                    break g.value();
                }
            },
        };
        Ok(TableHypothesis(
            (0..size).map(|v| Bits::truncated((v == marked) as u64, 1)).collect(),
        ))
    }
}

/// Per trial: sample `f`, let the learner query it, then require
/// `Pr[U*(x) = f(x)] ≥ ν` on every `x`.
pub fn run_learnability_experiment<F, L>(
    family: &F,
    learner: &L,
    config: LearnerConfig,
    trials: u64,
    seed: u64,
) -> Result<ExperimentReport, HarnessError>
where
    F: FunctionFamily,
    L: Learner<F>,
{
    let len = family.input_len();
    if len > MAX_DOMAIN_BITS {
        return Err(HarnessError::DomainTooLarge(len));
    }
    let outcomes = map_trials(seed, trials, |_, rng| {
        let f = family.sample(rng);
        let oracle = |x: &Bits| family.eval(&f, x);
        let mut access = QueryAccess {
            f: &oracle,
            budget: config.query_budget,
            used: 0,
        };
        let h = learner.learn(family, &mut access, rng)?;
        Ok((0..1u64 << len).all(|v| {
            let x = Bits::truncated(v, len);
            h.probability(&x, &family.eval(&f, &x)) >= config.nu
        }))
    });
    let outcomes = outcomes.into_iter().collect::<Result<Vec<_>, HarnessError>>()?;
    Ok(ExperimentReport::from_outcomes("learnability", &outcomes, seed))
}
