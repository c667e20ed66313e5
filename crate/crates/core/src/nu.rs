//! The deficiency-indexed semimeasure construction on a depth-bounded
//! binary tree.
//!
//! For an integer `d` and registry entry `T`, `S_{d,T}` holds the strings
//! whose deficiency under `μ^T` exceeds `d`. The coefficient `λ(z, T)` is
//! `2^-ℓ(p)` for the shortest twice-prefix program `p` that emits the code
//! of `T` from some prefix of `z` lying in `S_{d,T}`, and
//!
//! ```text
//! ν̃_d(z) = Σ_T λ(z, T)·2^d·μ^T(z)
//! ν_d(z)  = max(ν̃_d(z), ν_d(z0) + ν_d(z1))     (bottom-up on the table)
//! ν(z)    = Σ_d 2^-K(d)·ν_d(z)
//! ```

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::complexity::Complexity;
use crate::error::{LabError, Result};
use crate::kstar::kstar_upper;
use crate::measures::{MeasureRegistry, Predictor, Semimeasure};
use crate::rational::{self, pow2, Rational};
use crate::report::{BoundReport, Value};
use crate::strings;

/// Deepest table [`NuContext`] will build.
pub const MAX_TABLE_DEPTH: usize = 6;
/// Deepest tree whose maximal cuts are enumerated exhaustively.
pub const MAX_CUT_DEPTH: usize = 5;

/// Number of maximal cuts of the complete binary tree of the given depth.
pub fn maximal_cut_count(depth: usize) -> u128 {
    (0..depth).fold(1u128, |c, _| 1 + c * c)
}

/// Every maximal cut of the subtree below `z` with `remaining` more levels.
pub fn maximal_cuts(z: &[u8], remaining: usize) -> Vec<Vec<Vec<u8>>> {
    let mut cuts = vec![vec![z.to_vec()]];
    if remaining > 0 {
        let left = maximal_cuts(&[z, &[0]].concat(), remaining - 1);
        let right = maximal_cuts(&[z, &[1]].concat(), remaining - 1);
        for l in &left {
            for r in &right {
                cuts.push([l.as_slice(), r.as_slice()].concat());
            }
        }
    }
    cuts
}

/// Both forms of the membership test for `S_{d,T}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Membership {
    /// `Σ_{v ≠ z, ℓ(v) = ℓ(z)} μ(v) + 2^-d·ξ(z) > 1`.
    pub sum_form: bool,
    /// `μ(z) < 2^-d·ξ(z)`.
    pub deficiency_form: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NuTable {
    pub d: i64,
    pub depth: usize,
    pub values: BTreeMap<Vec<u8>, Rational>,
}

#[derive(Serialize)]
pub struct NuRow {
    pub d: i64,
    pub z: String,
    pub value: String,
}

impl NuTable {
    pub fn get(&self, z: &[u8]) -> Rational {
        self.values.get(z).cloned().unwrap_or_default()
    }

    /// Nodes where `ν(z) < ν(z0) + ν(z1)`, plus one if `ν(ε) > 1`.
    pub fn semimeasure_violations(&self) -> usize {
        let inner = self
            .values
            .iter()
            .filter(|(z, v)| z.len() < self.depth && **v < self.get(&[z.as_slice(), &[0]].concat()) + self.get(&[z.as_slice(), &[1]].concat()))
            .count();
        inner + usize::from(self.get(&[]) > Rational::one())
    }

    pub fn rows(&self) -> Vec<NuRow> {
        self.values
            .iter()
            .map(|(z, v)| NuRow {
                d: self.d,
                z: strings::show(z),
                value: rational::format(v),
            })
            .collect()
    }
}

/// Outcome of a check of `Σ_{z ∈ A} ν̃_d(z) <= 1` over cuts `A`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CutCheck {
    pub d: i64,
    pub depth: usize,
    pub cuts: u128,
    pub violations: u128,
    pub max_sum: Rational,
    /// Tabulated nodes with `ν̃_d < 0`; the reduction to maximal cuts needs none.
    pub negative_nodes: usize,
}

impl CutCheck {
    pub fn report(&self, name: &str) -> Vec<BoundReport> {
        let tag = format!("d={} depth={} cuts={}", self.d, self.depth, self.cuts);
        vec![
            BoundReport::asserted(name, Value::Exact(self.max_sum.clone()), Value::int(1))
                .term("violations", Value::Exact(Rational::from_integer(BigInt::from(self.violations))))
                .note(tag.clone()),
            BoundReport::violations(format!("{name}.nonnegative"), self.negative_nodes)
                .note("every antichain is dominated by a maximal cut when all terms are nonnegative")
                .note(tag),
        ]
    }
}

/// Precomputed probabilities on the tree of strings of length `<= depth`.
pub struct NuContext<'a> {
    registry: &'a MeasureRegistry,
    predictor: &'a Predictor<'a>,
    depth: usize,
    xi: HashMap<Vec<u8>, Rational>,
    mu: Vec<HashMap<Vec<u8>, Rational>>,
    /// `Σ_{ℓ(v) = n} μ^T(v)` per entry and level.
    level_mass: Vec<Vec<Rational>>,
    codes: Vec<Vec<u8>>,
}

impl<'a> NuContext<'a> {
    pub fn new(registry: &'a MeasureRegistry, predictor: &'a Predictor<'a>, depth: usize) -> Result<Self> {
        if registry.alphabet() != 2 {
            return Err(LabError::AlphabetMismatch { expected: 2, found: registry.alphabet() });
        }
        if depth > MAX_TABLE_DEPTH {
            return Err(LabError::BudgetCap {
                what: "table depth",
                value: depth as u64,
                cap: MAX_TABLE_DEPTH as u64,
            });
        }
        let nodes = strings::all_strings_upto(2, depth);
        let xi = nodes.iter().map(|z| (z.clone(), predictor.prob(z))).collect();
        let mu: Vec<HashMap<Vec<u8>, Rational>> = registry
            .entries()
            .iter()
            .map(|m| nodes.iter().map(|z| (z.clone(), m.prob(z))).collect())
            .collect();
        let level_mass = mu
            .iter()
            .map(|table| {
                let mut mass = vec![Rational::zero(); depth + 1];
                for (z, p) in table {
                    mass[z.len()] += p;
                }
                mass
            })
            .collect();
        let codes = (0..registry.len()).map(MeasureRegistry::code_for).collect();
        Ok(NuContext { registry, predictor, depth, xi, mu, level_mass, codes })
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    fn check_node(&self, z: &[u8], t: usize) -> Result<()> {
        self.registry.get(t)?;
        if z.len() > self.depth {
            return Err(LabError::BudgetCap {
                what: "string length",
                value: z.len() as u64,
                cap: self.depth as u64,
            });
        }
        Ok(())
    }

    pub fn membership(&self, z: &[u8], d: i64, t: usize) -> Result<Membership> {
        self.check_node(z, t)?;
        let mu_z = &self.mu[t][z];
        let scaled_xi = pow2(-d) * &self.xi[z];
        let others = &self.level_mass[t][z.len()] - mu_z;
        Ok(Membership {
            sum_form: others + &scaled_xi > Rational::one(),
            deficiency_form: *mu_z < scaled_xi,
        })
    }

    /// Whether `z ∈ S_{d,T}` (sum form).
    pub fn s_member(&self, z: &[u8], d: i64, t: usize) -> Result<bool> {
        Ok(self.membership(z, d, t)?.sum_form)
    }

    fn condition_weight(&self, t: usize, condition: &[u8]) -> Result<Complexity> {
        Ok(kstar_upper(self.predictor.estimator(), &self.codes[t], condition)?.value)
    }

    /// `λ(z, T)` at level `d`.
    pub fn lambda_coeff(&self, z: &[u8], t: usize, d: i64) -> Result<Rational> {
        self.check_node(z, t)?;
        let mut best = Complexity::Infinite;
        for k in 0..=z.len() {
            if self.s_member(&z[..k], d, t)? {
                best = best.min(self.condition_weight(t, &z[..k])?);
            }
        }
        Ok(best.weight())
    }

    /// `ν̃_d(z)`.
    pub fn nu_tilde(&self, z: &[u8], d: i64) -> Result<Rational> {
        let mut total = Rational::zero();
        for t in 0..self.registry.len() {
            let mu_z = &self.mu[t][z];
            if mu_z.is_zero() {
                continue;
            }
            total += self.lambda_coeff(z, t, d)? * mu_z;
        }
        Ok(total * pow2(d))
    }

    pub fn nu_tilde_table(&self, d: i64) -> Result<BTreeMap<Vec<u8>, Rational>> {
        strings::all_strings_upto(2, self.depth)
            .into_iter()
            .map(|z| self.nu_tilde(&z, d).map(|v| (z, v)))
            .collect()
    }

    /// The least semimeasure on the table dominating `ν̃_d`.
    pub fn nu_fixup(&self, d: i64) -> Result<NuTable> {
        Ok(fixup(d, self.depth, self.nu_tilde_table(d)?))
    }

    /// Every maximal cut of the full tree, each sum evaluated exactly.
    pub fn claim10_verify(&self, d: i64) -> Result<CutCheck> {
        if self.depth > MAX_CUT_DEPTH {
            return Err(LabError::BudgetCap {
                what: "cut depth",
                value: self.depth as u64,
                cap: MAX_CUT_DEPTH as u64,
            });
        }
        let tilde = self.nu_tilde_table(d)?;
        // Common denominator so each cut sum is a plain integer sum.
        let denom = tilde.values().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
        let scaled: HashMap<Vec<u8>, BigInt> = tilde
            .iter()
            .map(|(z, v)| (z.clone(), v.numer() * (&denom / v.denom())))
            .collect();
        let sums = cut_sums(&[], self.depth, &scaled);
        let violations = sums.iter().filter(|s| **s > denom).count() as u128;
        let max = sums.iter().max().cloned().unwrap_or_default();
        Ok(CutCheck {
            d,
            depth: self.depth,
            cuts: sums.len() as u128,
            violations,
            max_sum: Rational::new(max, denom),
            negative_nodes: tilde.values().filter(|v| v.is_negative()).count(),
        })
    }

    /// `samples` seeded random maximal cuts: each internal node splits with
    /// probability one half.
    pub fn claim10_sample(&self, d: i64, samples: usize, seed: u64) -> Result<CutCheck> {
        let tilde = self.nu_tilde_table(d)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut violations = 0;
        let mut max_sum = Rational::zero();
        for _ in 0..samples {
            let mut stack = vec![Vec::new()];
            let mut sum = Rational::zero();
            while let Some(z) = stack.pop() {
                if z.len() < self.depth && rng.gen_bool(0.5) {
                    stack.push([z.as_slice(), &[1]].concat());
                    stack.push([z.as_slice(), &[0]].concat());
                } else {
                    sum += &tilde[&z];
                }
            }
            if sum > Rational::one() {
                violations += 1;
            }
            if sum > max_sum {
                max_sum = sum;
            }
        }
        Ok(CutCheck {
            d,
            depth: self.depth,
            cuts: samples as u128,
            violations,
            max_sum,
            negative_nodes: tilde.values().filter(|v| v.is_negative()).count(),
        })
    }

    /// `ν` over the integer window `d_min..=d_max`.
    pub fn nu_total(&self, d_min: i64, d_max: i64) -> Result<NuTotal> {
        if d_min > d_max {
            return Err(LabError::InvalidArgument(format!("empty window {d_min}..={d_max}")));
        }
        let est = self.predictor.estimator();
        let mut levels = Vec::new();
        for d in d_min..=d_max {
            let k = est.k_int(d, None)?.value;
            levels.push(NuLevel { d, k_d: k, table: self.nu_fixup(d)? });
        }
        Ok(NuTotal { depth: self.depth, levels })
    }

    /// `max_z ν(z)/ξ(z)` over the table.
    pub fn domination_ratio(&self, total: &NuTotal) -> Rational {
        self.xi
            .iter()
            .filter(|(_, x)| x.is_positive())
            .map(|(z, x)| total.prob(z) / x)
            .max()
            .unwrap_or_default()
    }

    /// The chain `2^-K(d)·2^-ℓ(p)·2^d·μ(xy) <= ν(xy)` with
    /// `d = ⌈d_μ(x)⌉ - 1` and `p` the shortest program emitting the code of
    /// `μ` from a prefix of `x`.
    pub fn chain_instance(&self, total: &NuTotal, t: usize, x: &[u8], y: &[u8]) -> Result<BoundReport> {
        let xy = [x, y].concat();
        self.check_node(&xy, t)?;
        let mu_x = &self.mu[t][x];
        if mu_x.is_zero() || self.mu[t][&xy].is_zero() {
            return Err(LabError::NullCondition(strings::show(&xy)));
        }
        let d = rational::ceil_log2(&(&self.xi[x] / mu_x)) - 1;
        let level = total
            .levels
            .iter()
            .find(|l| l.d == d)
            .ok_or_else(|| LabError::InvalidArgument(format!("level {d} outside the window")))?;
        let p = self.condition_weight(t, x)?;
        let lhs = level.k_d.weight() * p.weight() * pow2(d) * &self.mu[t][&xy];
        let b = self.predictor.estimator().budget();
        Ok(BoundReport::asserted("nu.chain", Value::Exact(lhs), Value::Exact(total.prob(&xy)))
            .term("level", Value::int(d))
            .term("k_level", level.k_d)
            .term("kstar_code_given_x", p)
            .term("xi", Value::Exact(self.xi[&xy].clone()))
            .budgets(b.max_len, b.max_steps)
            .note(format!("measure={t} x={} y={}", strings::show(x), strings::show(y))))
    }
}

fn fixup(d: i64, depth: usize, tilde: BTreeMap<Vec<u8>, Rational>) -> NuTable {
    let mut values = BTreeMap::new();
    for n in (0..=depth).rev() {
        for z in strings::all_strings(2, n) {
            let own = tilde.get(&z).cloned().unwrap_or_default();
            let v = if n == depth {
                own
            } else {
                let kids: Rational = [0u8, 1]
                    .iter()
                    .map(|&a| values.get(&[z.as_slice(), &[a]].concat()).cloned().unwrap_or_default())
                    .sum();
                own.max(kids)
            };
            values.insert(z, v);
        }
    }
    NuTable { d, depth, values }
}

/// Public entry for fixing up an arbitrary table (used for inspection).
pub fn nu_fixup_table(d: i64, depth: usize, tilde: BTreeMap<Vec<u8>, Rational>) -> NuTable {
    fixup(d, depth, tilde)
}

fn cut_sums(z: &[u8], remaining: usize, values: &HashMap<Vec<u8>, BigInt>) -> Vec<BigInt> {
    let own = values[z].clone();
    if remaining == 0 {
        return vec![own];
    }
    let left = cut_sums(&[z, &[0]].concat(), remaining - 1, values);
    let right = cut_sums(&[z, &[1]].concat(), remaining - 1, values);
    let mut sums = Vec::with_capacity(1 + left.len() * right.len());
    sums.push(own);
    for l in &left {
        for r in &right {
            sums.push(l + r);
        }
    }
    sums
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NuLevel {
    pub d: i64,
    /// `K(d)`; an unwitnessed level has weight zero.
    pub k_d: Complexity,
    pub table: NuTable,
}

/// `ν = Σ_d 2^-K(d)·ν_d` on the table; zero below the table depth.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NuTotal {
    pub depth: usize,
    pub levels: Vec<NuLevel>,
}

impl NuTotal {
    pub fn unwitnessed_levels(&self) -> Vec<i64> {
        self.levels.iter().filter(|l| !l.k_d.is_finite()).map(|l| l.d).collect()
    }

    pub fn weight_sum(&self) -> Rational {
        self.levels.iter().map(|l| l.k_d.weight()).sum()
    }
}

impl Semimeasure for NuTotal {
    fn alphabet_size(&self) -> usize {
        2
    }

    fn prob(&self, z: &[u8]) -> Rational {
        self.levels.iter().map(|l| l.k_d.weight() * l.table.get(z)).sum()
    }
}
