//! Budgeted, machine-relative estimators for `K`, `K(y|x)`, `Km` and `M`.
//!
//! All values are exact for the reference machine within the search budget:
//! a complexity is the length of the shortest witness found, or
//! [`Complexity::Infinite`] when there is none. Masses are exact rationals.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::enumeration::{WitnessCache, WitnessSet, HARD_CAP_LEN};
use crate::error::{LabError, Result};
use crate::machine::{Budget, MachineKind, MachineState, Opcode, Program, RunStatus};
use crate::rational::{pow2, Rational};
use crate::strings;

/// A program length, or the sentinel for "no witness within budget".
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Complexity {
    Finite(usize),
    Infinite,
}

impl Complexity {
    pub fn finite(self) -> Option<usize> {
        match self {
            Complexity::Finite(n) => Some(n),
            Complexity::Infinite => None,
        }
    }

    pub fn is_finite(self) -> bool {
        self != Complexity::Infinite
    }

    /// `2^-value`, zero for the infinite sentinel.
    pub fn weight(self) -> Rational {
        match self {
            Complexity::Finite(n) => pow2(-(n as i64)),
            Complexity::Infinite => Rational::default(),
        }
    }

    pub fn plus(self, other: Complexity) -> Complexity {
        match (self, other) {
            (Complexity::Finite(a), Complexity::Finite(b)) => Complexity::Finite(a + b),
            _ => Complexity::Infinite,
        }
    }
}

impl std::fmt::Display for Complexity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Complexity::Finite(n) => write!(f, "{n}"),
            Complexity::Infinite => f.write_str("inf"),
        }
    }
}

/// Program-length and step budgets shared by all estimators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SearchBudget {
    pub max_len: usize,
    pub max_steps: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_len: 18,
            max_steps: 10_000,
        }
    }
}

impl SearchBudget {
    pub fn new(max_len: usize, max_steps: u64) -> Result<Self> {
        if max_len > HARD_CAP_LEN {
            return Err(LabError::BudgetCap {
                what: "program length",
                value: max_len as u64,
                cap: HARD_CAP_LEN as u64,
            });
        }
        if max_steps == 0 {
            return Err(LabError::InvalidArgument("step budget must be positive".into()));
        }
        Ok(SearchBudget { max_len, max_steps })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexityEstimate {
    pub value: Complexity,
    pub max_len: usize,
    pub max_steps: u64,
    pub witness: Option<Program>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MassEstimate {
    pub value: Rational,
    pub max_len: usize,
    pub max_steps: u64,
}

type CoverSet = Arc<Vec<Vec<u8>>>;

/// Holds the budget and the witness caches. Cheap to share by reference;
/// all methods take `&self` and are safe to call from several threads.
#[derive(Debug)]
pub struct Estimator {
    budget: SearchBudget,
    cache: Arc<WitnessCache>,
    covers: Mutex<HashMap<Vec<u8>, CoverSet>>,
}

impl Estimator {
    pub fn new(budget: SearchBudget) -> Self {
        Self::with_cache(budget, Arc::new(WitnessCache::new()))
    }

    pub fn with_cache(budget: SearchBudget, cache: Arc<WitnessCache>) -> Self {
        Estimator {
            budget,
            cache,
            covers: Mutex::default(),
        }
    }

    /// Same cache, different budget.
    pub fn rebudget(&self, budget: SearchBudget) -> Self {
        Self::with_cache(budget, Arc::clone(&self.cache))
    }

    pub fn budget(&self) -> SearchBudget {
        self.budget
    }

    pub fn witnesses(&self, kind: MachineKind, condition: Option<&[u8]>) -> Result<Arc<WitnessSet>> {
        self.cache
            .get(kind, condition, self.budget.max_len, self.budget.max_steps)
    }

    fn estimate(&self, set: &WitnessSet, y: &[u8]) -> ComplexityEstimate {
        let w = set.shortest_for(y);
        ComplexityEstimate {
            value: w.map_or(Complexity::Infinite, |w| Complexity::Finite(w.program.len())),
            max_len: self.budget.max_len,
            max_steps: self.budget.max_steps,
            witness: w.map(|w| w.program.clone()),
        }
    }

    /// `K(y)` on the prefix machine, or `K(y|x)` on the length-aware
    /// conditional machine when a condition is given.
    pub fn k_upper(&self, y: &[u8], condition: Option<&[u8]>) -> Result<ComplexityEstimate> {
        let set = match condition {
            None => self.witnesses(MachineKind::Prefix, None)?,
            Some(x) => self.witnesses(MachineKind::CondLengthAware, Some(x))?,
        };
        Ok(self.estimate(&set, y))
    }

    /// `K(n)` of an integer via its zig-zag code.
    pub fn k_int(&self, n: i64, condition: Option<&[u8]>) -> Result<ComplexityEstimate> {
        self.k_upper(&strings::int_code(n), condition)
    }

    /// The prefix-free set of minimal monotone-machine tape prefixes whose
    /// output starts with `x`.
    pub fn cover_prefixes(&self, x: &[u8]) -> Arc<Vec<Vec<u8>>> {
        if let Some(c) = self.covers.lock().unwrap().get(x) {
            return Arc::clone(c);
        }
        let mut found = Vec::new();
        if x.is_empty() {
            found.push(Vec::new());
        } else {
            let budget = Budget::steps(self.budget.max_steps);
            let root = MachineState::new(MachineKind::Monotone, None, budget);
            cover_search(root, &mut Vec::new(), x, self.budget.max_len, &mut found);
        }
        found.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
        let found = Arc::new(found);
        self.covers
            .lock()
            .unwrap()
            .insert(x.to_vec(), Arc::clone(&found));
        found
    }

    /// `Km(x)`: shortest consumed tape prefix whose monotone output starts with `x`.
    pub fn km_upper(&self, x: &[u8]) -> ComplexityEstimate {
        let covers = self.cover_prefixes(x);
        let best = covers.first();
        ComplexityEstimate {
            value: best.map_or(Complexity::Infinite, |p| Complexity::Finite(p.len())),
            max_len: self.budget.max_len,
            max_steps: self.budget.max_steps,
            witness: best.map(|p| Program::new(p.clone())),
        }
    }

    /// `M(x) = Σ 2^-ℓ(q)` over the minimal covering prefixes `q`.
    pub fn big_m(&self, x: &[u8]) -> MassEstimate {
        MassEstimate {
            value: self.cover_prefixes(x).iter().map(|q| pow2(-(q.len() as i64))).sum(),
            max_len: self.budget.max_len,
            max_steps: self.budget.max_steps,
        }
    }

    /// `KM(x) = -log2 M(x)`.
    pub fn km_solomonoff(&self, x: &[u8]) -> f64 {
        -crate::rational::log2(&self.big_m(x).value)
    }
}

fn cover_search(
    state: MachineState<'_>,
    prefix: &mut Vec<u8>,
    target: &[u8],
    max_len: usize,
    found: &mut Vec<Vec<u8>>,
) {
    if prefix.len() + 3 > max_len {
        return;
    }
    for op in Opcode::ALL {
        let mut next = state.clone();
        let status = next.exec(op);
        if status.is_some_and(|s| s != RunStatus::Halted) {
            continue;
        }
        let out = next.output();
        let common = out.len().min(target.len());
        if out[..common] != target[..common] {
            continue;
        }
        prefix.extend(op.bits());
        if out.len() >= target.len() {
            found.push(prefix.clone());
        } else if status.is_none() {
            cover_search(next, prefix, target, max_len, found);
        }
        prefix.truncate(prefix.len() - 3);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::minimal_consumed_prefix;
    use crate::rational::{int, ratio};
    use num_traits::Zero;

    fn est(l: usize, s: u64) -> Estimator {
        Estimator::new(SearchBudget::new(l, s).unwrap())
    }

    /// Oracle: run the monotone machine on every tape of length exactly `l`.
    fn big_m_oracle(x: &[u8], l: usize, s: u64) -> Rational {
        let mut prefixes: Vec<Vec<u8>> = strings::all_strings(2, l)
            .into_iter()
            .filter_map(|tape| {
                minimal_consumed_prefix(&tape, x, Budget::steps(s)).map(|q| tape[..q].to_vec())
            })
            .collect();
        prefixes.sort();
        prefixes.dedup();
        prefixes.iter().map(|q| pow2(-(q.len() as i64))).sum()
    }

    #[test]
    fn k_upper_examples() {
        let e6 = est(6, 100);
        assert_eq!(e6.k_upper(&[], None).unwrap().value, Complexity::Finite(3));
        let zero = e6.k_upper(&[0], None).unwrap();
        assert_eq!(zero.value, Complexity::Finite(6));
        assert_eq!(zero.witness.unwrap().to_string(), "001000");
        assert_eq!(est(3, 100).k_upper(&[0], None).unwrap().value, Complexity::Infinite);
    }

    #[test]
    fn km_examples() {
        assert_eq!(est(6, 100).km_upper(&[]).value, Complexity::Finite(0));
        assert_eq!(est(6, 100).km_upper(&[0]).value, Complexity::Finite(3));
        let e9 = est(9, 100).km_upper(&[0, 0, 0, 0]);
        assert_eq!(e9.value, Complexity::Finite(9));
        // EMIT0 DUP DUP and EMIT0 EMIT0 DUP tie at length 9.
        let w = e9.witness.unwrap();
        assert_eq!(w.len(), 9);
        let out = crate::machine::run(MachineKind::Monotone, &w, None, Budget::steps(100));
        assert!(crate::strings::is_prefix(&[0, 0, 0, 0], &out.output));
        assert_eq!(
            crate::machine::run(MachineKind::Monotone, &"001100100".parse().unwrap(), None, Budget::steps(100)).output,
            vec![0, 0, 0, 0]
        );
    }

    #[test]
    fn big_m_examples() {
        let e = est(6, 100);
        assert_eq!(e.big_m(&[]).value, int(1));
        assert_eq!(e.big_m(&[0]).value, ratio(9, 64));
        assert_eq!(big_m_oracle(&[0], 6, 100), ratio(9, 64));
        let m = |x: &[u8]| e.big_m(x).value;
        assert_eq!(m(&[0, 1]), big_m_oracle(&[0, 1], 6, 100));
        assert!(m(&[0, 0]) + m(&[0, 1]) <= m(&[0]));
    }

    #[test]
    fn big_m_matches_tape_oracle() {
        let e = est(12, 60);
        for x in strings::all_strings_upto(2, 4) {
            assert_eq!(e.big_m(&x).value, big_m_oracle(&x, 12, 60), "x = {}", strings::show(&x));
        }
    }

    #[test]
    fn big_m_is_a_semimeasure() {
        let e = est(15, 1000);
        for x in strings::all_strings_upto(2, 8) {
            let parent = e.big_m(&x).value;
            let mut children = e.big_m(&[x.clone(), vec![0]].concat()).value;
            children += e.big_m(&[x.clone(), vec![1]].concat()).value;
            assert!(children <= parent, "x = {}", strings::show(&x));
            assert!(strings::is_prefix_free(&e.cover_prefixes(&x)));
        }
        assert!(e.big_m(&[]).value <= int(1));
    }

    #[test]
    fn machine_relative_ordering() {
        let e = est(12, 1000);
        for x in strings::all_strings_upto(2, 5) {
            let k = e.k_upper(&x, None).unwrap().value;
            let km = e.km_upper(&x).value;
            assert!(km <= k);
            if let Complexity::Finite(n) = km {
                assert!(e.big_m(&x).value >= pow2(-(n as i64)));
            }
        }
    }

    #[test]
    fn budget_monotonicity() {
        let small = est(9, 20);
        let big = est(12, 200);
        for x in strings::all_strings_upto(2, 4) {
            assert!(small.big_m(&x).value <= big.big_m(&x).value);
            assert!(big.km_upper(&x).value <= small.km_upper(&x).value);
            assert!(big.k_upper(&x, None).unwrap().value <= small.k_upper(&x, None).unwrap().value);
        }
    }

    #[test]
    fn kraft_over_outputs() {
        let e = est(15, 1000);
        let total: Rational = strings::all_strings_upto(2, 6)
            .iter()
            .map(|y| e.k_upper(y, None).unwrap().value.weight())
            .sum();
        assert!(total <= int(1));
        assert!(!total.is_zero());
    }

    #[test]
    fn integer_codes_are_estimable() {
        let e = est(12, 100);
        // 0 -> ε costs only HALT.
        assert_eq!(e.k_int(0, None).unwrap().value, Complexity::Finite(3));
        assert_eq!(e.k_int(-1, None).unwrap().value, Complexity::Finite(6));
    }
}
