//! Prediction distances, the divergence `D_{l:n}`, randomness deficiency and
//! the verifiers built on them.
//!
//! Probabilities stay exact until a logarithm or square root is needed; those
//! are evaluated in `f64` and compared with [`REAL_TOLERANCE`].

mod constructions;
mod theorems;

pub use constructions::{lemma3_sequence, lemma5_instance, psi_semimeasure, Lemma3Trace, Lemma5Instance, LEMMA3_THRESHOLD};
pub use theorems::{fully_witnessed, theorem_report, Theorem};

use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::measures::{sample_sequence, MeasureRegistry, MeasureSpec, Predictor, Semimeasure};
use crate::rational::{self, Rational};
use crate::report::{BoundReport, Value, REAL_TOLERANCE};
use crate::strings;

/// Largest number of outcomes a brute-force expectation may enumerate.
pub const MAX_OUTCOMES: usize = 4096;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceKind {
    SquaredDiff,
    SquaredAbs,
    Hellinger,
    Kl,
    /// `loss[a][y]` is the loss of predicting `y` when `a` occurs; entries in `[0, 1]`.
    BayesRegretSq { loss: Vec<Vec<f64>> },
}

impl DistanceKind {
    pub fn zero_one_loss(alphabet: usize) -> Self {
        let loss = (0..alphabet)
            .map(|a| (0..alphabet).map(|y| if a == y { 0.0 } else { 1.0 }).collect())
            .collect();
        DistanceKind::BayesRegretSq { loss }
    }

    /// All five kinds, the regret with 0-1 loss.
    pub fn all(alphabet: usize) -> Vec<Self> {
        vec![
            DistanceKind::SquaredDiff,
            DistanceKind::SquaredAbs,
            DistanceKind::Hellinger,
            DistanceKind::Kl,
            Self::zero_one_loss(alphabet),
        ]
    }

    pub fn name(&self) -> &'static str {
        match self {
            DistanceKind::SquaredDiff => "squared_diff",
            DistanceKind::SquaredAbs => "squared_abs",
            DistanceKind::Hellinger => "hellinger",
            DistanceKind::Kl => "kl",
            DistanceKind::BayesRegretSq { .. } => "bayes_regret_sq",
        }
    }
}

/// Minimal expected loss `min_y Σ_a loss(a, y)·r(a)`.
fn bayes_loss(loss: &[Vec<f64>], r: &[f64]) -> f64 {
    let choices = loss.first().map_or(0, Vec::len);
    (0..choices)
        .map(|y| r.iter().zip(loss).map(|(ra, row)| ra * row[y]).sum::<f64>())
        .fold(f64::INFINITY, f64::min)
}

/// `s(p, q)` for the true distribution `p` and the prediction `q`.
pub fn step_distance(kind: &DistanceKind, p: &[f64], q: &[f64]) -> f64 {
    let pairs = p.iter().zip(q);
    match kind {
        DistanceKind::SquaredDiff => pairs.map(|(p, q)| (q - p).powi(2)).sum(),
        DistanceKind::SquaredAbs => 0.5 * pairs.map(|(p, q)| (q - p).abs()).sum::<f64>().powi(2),
        DistanceKind::Hellinger => pairs.map(|(p, q)| (q.sqrt() - p.sqrt()).powi(2)).sum(),
        DistanceKind::Kl => pairs
            .filter(|(p, _)| **p > 0.0)
            .map(|(p, q)| if *q > 0.0 { p * (p / q).ln() } else { f64::INFINITY })
            .sum(),
        DistanceKind::BayesRegretSq { loss } => 0.5 * (bayes_loss(loss, q) - bayes_loss(loss, p)).powi(2),
    }
}

fn outcome_count(alphabet: usize, horizon: usize) -> Result<usize> {
    alphabet
        .checked_pow(horizon as u32)
        .filter(|&c| c <= MAX_OUTCOMES)
        .ok_or(LabError::BudgetCap {
            what: "outcome horizon",
            value: horizon as u64,
            cap: (MAX_OUTCOMES as f64).log(alphabet as f64).floor() as u64,
        })
}

fn check_alphabets(mu: &dyn Semimeasure, rho: &dyn Semimeasure) -> Result<()> {
    if mu.alphabet_size() != rho.alphabet_size() {
        return Err(LabError::AlphabetMismatch {
            expected: mu.alphabet_size(),
            found: rho.alphabet_size(),
        });
    }
    Ok(())
}

fn conditional_or_zero(r: &dyn Semimeasure, ext: &[u8], base: &Rational) -> Rational {
    if base.is_zero() {
        Rational::zero()
    } else {
        r.prob(ext) / base
    }
}

/// `ln(a/b)` for exact non-negative `a > 0`; `+inf` when `b = 0`.
fn ln_ratio(a: &Rational, b: &Rational) -> f64 {
    if b.is_zero() {
        f64::INFINITY
    } else {
        rational::ln(&(a / b))
    }
}

/// `D_{l:n}(past)` with `l = ℓ(past) + 1`, by enumerating every continuation
/// of length `n - ℓ(past)` in lexicographic order.
pub fn divergence(mu: &dyn Semimeasure, rho: &dyn Semimeasure, past: &[u8], n: usize) -> Result<f64> {
    check_alphabets(mu, rho)?;
    let horizon = n.checked_sub(past.len()).ok_or_else(|| {
        LabError::InvalidArgument(format!("horizon end {n} precedes the past of length {}", past.len()))
    })?;
    outcome_count(mu.alphabet_size(), horizon)?;
    let mu_past = mu.prob(past);
    if mu_past.is_zero() {
        return Err(LabError::NullCondition(strings::show(past)));
    }
    let rho_past = rho.prob(past);
    let mut total = 0.0;
    for w in strings::all_strings(mu.alphabet_size(), horizon) {
        let full = [past, &w].concat();
        let m = mu.prob(&full) / &mu_past;
        if m.is_zero() {
            continue;
        }
        let r = conditional_or_zero(rho, &full, &rho_past);
        total += rational::to_f64(&m) * ln_ratio(&m, &r);
    }
    Ok(total)
}

fn accumulate_steps(
    mu: &dyn Semimeasure,
    rho: &dyn Semimeasure,
    kind: &DistanceKind,
    history: &mut Vec<u8>,
    weight: f64,
    remaining: usize,
    total: &mut f64,
) {
    if remaining == 0 {
        return;
    }
    let alphabet = mu.alphabet_size();
    let mu_h = mu.prob(history);
    let rho_h = rho.prob(history);
    let mut p = Vec::with_capacity(alphabet);
    let mut q = Vec::with_capacity(alphabet);
    for a in 0..alphabet as u8 {
        history.push(a);
        p.push(mu.prob(history) / &mu_h);
        q.push(conditional_or_zero(rho, history, &rho_h));
        history.pop();
    }
    let pf: Vec<f64> = p.iter().map(rational::to_f64).collect();
    let qf: Vec<f64> = q.iter().map(rational::to_f64).collect();
    *total += weight * step_distance(kind, &pf, &qf);
    for (a, pa) in p.iter().enumerate() {
        if pa.is_positive() {
            history.push(a as u8);
            accumulate_steps(mu, rho, kind, history, weight * pf[a], remaining - 1, total);
            history.pop();
        }
    }
}

/// `E[Σ_{t=l}^{n} s_t | past]` by walking the outcome tree under `mu`.
pub fn expected_distance_sum(
    mu: &dyn Semimeasure,
    rho: &dyn Semimeasure,
    past: &[u8],
    n: usize,
    kind: &DistanceKind,
) -> Result<f64> {
    check_alphabets(mu, rho)?;
    let horizon = n.checked_sub(past.len()).ok_or_else(|| {
        LabError::InvalidArgument(format!("horizon end {n} precedes the past of length {}", past.len()))
    })?;
    outcome_count(mu.alphabet_size(), horizon)?;
    if mu.prob(past).is_zero() {
        return Err(LabError::NullCondition(strings::show(past)));
    }
    let mut total = 0.0;
    accumulate_steps(mu, rho, kind, &mut past.to_vec(), 1.0, horizon, &mut total);
    Ok(total)
}

/// Asserts `E[Σ s_t | past] <= D_{l:n}(past)`.
pub fn verify_eq1(
    mu: &dyn Semimeasure,
    rho: &dyn Semimeasure,
    past: &[u8],
    n: usize,
    kind: &DistanceKind,
) -> Result<BoundReport> {
    let lhs = expected_distance_sum(mu, rho, past, n, kind)?;
    let rhs = divergence(mu, rho, past, n)?;
    Ok(BoundReport::asserted(format!("eq1.{}", kind.name()), Value::real(lhs), Value::real(rhs))
        .term("divergence", Value::real(rhs))
        .note(format!("past={} l={} n={n} alphabet={}", strings::show(past), past.len() + 1, mu.alphabet_size())))
}

fn random_distribution(rng: &mut ChaCha8Rng, alphabet: usize, allow_zero: bool) -> Vec<Rational> {
    let low = u32::from(!allow_zero);
    let raw: Vec<u32> = (0..alphabet).map(|_| rng.gen_range(low..=9)).collect();
    let total: u32 = raw.iter().sum();
    if total == 0 {
        let mut v = vec![Rational::zero(); alphabet];
        v[rng.gen_range(0..alphabet)] = Rational::one();
        return v;
    }
    raw.into_iter().map(|r| rational::ratio(r.into(), total.into())).collect()
}

/// A random IID or first-order Markov measure with small-denominator
/// rational probabilities. Zero entries are allowed only when `allow_zero`.
pub fn random_measure(rng: &mut ChaCha8Rng, alphabet: usize, allow_zero: bool) -> MeasureSpec {
    if rng.gen_bool(0.5) {
        MeasureSpec::iid(random_distribution(rng, alphabet, allow_zero))
    } else {
        MeasureSpec::Markov {
            order: 1,
            table: (0..alphabet).map(|_| random_distribution(rng, alphabet, allow_zero)).collect(),
        }
    }
}

/// One sampled instance of the cumulative-distance check.
#[derive(Clone, Debug)]
pub struct Eq1Case {
    pub mu: MeasureSpec,
    pub rho: MeasureSpec,
    pub past: Vec<u8>,
    pub n: usize,
}

/// `count` seeded cases: alphabet 2 or 3, horizon 1 to 4, past of length 0
/// to 2 drawn from `mu`, `rho` strictly positive.
pub fn eq1_cases(count: usize, seed: u64) -> Vec<Eq1Case> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let alphabet = *[2, 3].choose(&mut rng).unwrap();
            let mu = random_measure(&mut rng, alphabet, true);
            let rho = random_measure(&mut rng, alphabet, false);
            let past_len = rng.gen_range(0..=2);
            let past = sample_sequence(&mu, past_len, rng.gen());
            let n = past_len + rng.gen_range(1..=4);
            Eq1Case { mu, rho, past, n }
        })
        .collect()
}

/// Every distance kind on every case.
pub fn eq1_suite(count: usize, seed: u64) -> Result<Vec<BoundReport>> {
    let mut reports = Vec::new();
    for (i, c) in eq1_cases(count, seed).iter().enumerate() {
        for kind in DistanceKind::all(c.mu.alphabet()) {
            reports.push(verify_eq1(&c.mu, &c.rho, &c.past, c.n, &kind)?.note(format!("case {i}")));
        }
    }
    Ok(reports)
}

/// Per-step predictor conditionals along a sequence.
#[derive(Clone, Debug, PartialEq)]
pub struct Eq4Chain {
    pub conditionals: Vec<Rational>,
    /// `Σ (1 - a_t)`.
    pub error_sum: Rational,
    /// `-Σ ln a_t`.
    pub log_loss: f64,
    /// `-ln ρ(α_{1:n})`.
    pub total_log_loss: f64,
    /// Steps where `1 - a > -ln a` (beyond tolerance).
    pub step_violations: usize,
}

pub fn eq4_chain(alpha: &[u8], predictor: &dyn Semimeasure, n: usize) -> Eq4Chain {
    let n = n.min(alpha.len());
    let mut conditionals = Vec::with_capacity(n);
    let mut step_violations = 0;
    let mut log_loss = 0.0;
    let mut error_sum = Rational::zero();
    let mut previous = predictor.prob(&[]);
    for t in 0..n {
        let current = predictor.prob(&alpha[..=t]);
        let a = if previous.is_zero() { Rational::zero() } else { &current / &previous };
        let minus_ln = -rational::ln(&a);
        if rational::to_f64(&(Rational::one() - &a)) > minus_ln + REAL_TOLERANCE {
            step_violations += 1;
        }
        log_loss += minus_ln;
        error_sum += Rational::one() - &a;
        conditionals.push(a);
        previous = current;
    }
    Eq4Chain {
        conditionals,
        error_sum,
        log_loss,
        total_log_loss: -rational::ln(&previous),
        step_violations,
    }
}

/// The asserted part of the error chain for the sequence `alpha`, plus the
/// measured comparison with `K(μ)·ln 2` when a complexity is supplied.
pub fn verify_eq4_chain(alpha: &[u8], predictor: &dyn Semimeasure, n: usize, k_mu: Option<Value>) -> Vec<BoundReport> {
    let chain = eq4_chain(alpha, predictor, n);
    let tag = format!("alpha={} n={}", strings::show(alpha), chain.conditionals.len());
    let mut reports = vec![
        BoundReport::violations("eq4.per_step", chain.step_violations).note(tag.clone()),
        BoundReport::asserted(
            "eq4.errors_vs_log_loss",
            Value::Exact(chain.error_sum.clone()),
            Value::real(chain.log_loss),
        )
        .note(tag.clone()),
        BoundReport::asserted("eq4.log_loss_vs_total", Value::real(chain.log_loss), Value::real(chain.total_log_loss))
            .note(tag.clone()),
    ];
    if let Some(k) = k_mu {
        let rhs = Value::real(k.to_f64() * std::f64::consts::LN_2);
        reports.push(
            BoundReport::measured("eq4.total_vs_complexity", Value::real(chain.total_log_loss), rhs)
                .term("k_mu", k)
                .note(tag),
        );
    }
    reports
}

/// `count` sequences of length `n` sampled from registry entries in turn,
/// each checked against `predictor`.
pub fn eq4_suite(registry: &MeasureRegistry, predictor: &Predictor, count: usize, n: usize, seed: u64) -> Result<Vec<BoundReport>> {
    if registry.is_empty() {
        return Err(LabError::InvalidArgument("sequence suite needs a nonempty registry".into()));
    }
    let mut reports = Vec::new();
    for i in 0..count {
        let index = i % registry.len();
        let alpha = sample_sequence(registry.get(index)?, n, seed.wrapping_add(i as u64));
        let k = predictor.zoo().code_complexities()[index];
        reports.extend(verify_eq4_chain(&alpha, predictor, n, Some(k.into())));
    }
    Ok(reports)
}

/// `log2(ξ(x)/μ(x))` with its exact ceiling.
#[derive(Clone, Debug, PartialEq)]
pub struct DeficiencyRecord {
    pub x: Vec<u8>,
    pub ratio: Rational,
    pub value: f64,
    pub ceil_value: i64,
}

pub fn deficiency(mu: &dyn Semimeasure, predictor: &dyn Semimeasure, x: &[u8]) -> Result<DeficiencyRecord> {
    let m = mu.prob(x);
    if m.is_zero() {
        return Err(LabError::NullCondition(strings::show(x)));
    }
    let xi = predictor.prob(x);
    if xi.is_zero() {
        return Err(LabError::InvalidArgument(format!(
            "predictor assigns zero to {}",
            strings::show(x)
        )));
    }
    let ratio = xi / m;
    Ok(DeficiencyRecord {
        x: x.to_vec(),
        value: rational::log2(&ratio),
        ceil_value: rational::ceil_log2(&ratio),
        ratio,
    })
}

/// Exact dominance `ξ(x) >= ½·2^-K(code μ)·μ(x)` for every registry entry
/// and every `x` up to `max_len` symbols, together with the deficiency lower
/// bound `d(x) >= -K(code μ) - 1`. Returns the number of violations of each.
pub fn dominance_violations(registry: &MeasureRegistry, predictor: &Predictor, max_len: usize) -> (usize, usize) {
    let mut dominance = 0;
    let mut deficiency_floor = 0;
    for (i, mu) in registry.entries().iter().enumerate() {
        let w = predictor.dominance_weight(i);
        for x in strings::all_strings_upto(registry.alphabet(), max_len) {
            let m = mu.prob(&x);
            let xi = predictor.prob(&x);
            if xi < &w * &m {
                dominance += 1;
            }
            if m.is_positive() && (xi.is_zero() || xi / &m < w) {
                deficiency_floor += 1;
            }
        }
    }
    (dominance, deficiency_floor)
}

#[cfg(test)]
mod tests;
