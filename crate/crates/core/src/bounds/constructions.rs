//! The adversarial sequence, the zeros-then-ones instance and the
//! length-indexed mixture `ψ_l`.

use num_traits::Zero;

use crate::complexity::Estimator;
use crate::error::{LabError, Result};
use crate::measures::{MeasureRegistry, MeasureSpec, Predictor, Semimeasure};
use crate::rational::{self, Rational};
use crate::report::{BoundReport, Value};
use crate::strings;

use super::deficiency;

/// `1 / (3 ln 2)`.
pub const LEMMA3_THRESHOLD: f64 = 0.480_898_346_962_987_8;

#[derive(Clone, Debug, PartialEq)]
pub struct Lemma3Trace {
    pub alpha: Vec<u8>,
    /// `μ(ᾱ_l | α_{<l})` at each step; each exceeds the threshold.
    pub flipped_probs: Vec<Rational>,
    /// `α_{<l}·ᾱ_l` for each `l`.
    pub diagnostic: Vec<Vec<u8>>,
}

impl Lemma3Trace {
    pub fn all_steps_exceed_threshold(&self) -> bool {
        self.flipped_probs.iter().all(|p| rational::to_f64(p) > LEMMA3_THRESHOLD)
    }

    pub fn diagnostic_is_prefix_free(&self) -> bool {
        strings::is_prefix_free(&self.diagnostic)
    }
}

/// Builds `α` symbol by symbol, always taking the complement of the first
/// symbol `b` with `μ(b|α_{<l}) > 1/(3 ln 2)`.
pub fn lemma3_sequence(mu: &MeasureSpec, n: usize) -> Result<Lemma3Trace> {
    if mu.alphabet() != 2 {
        return Err(LabError::AlphabetMismatch { expected: 2, found: mu.alphabet() });
    }
    let mut alpha = Vec::with_capacity(n);
    let mut flipped_probs = Vec::with_capacity(n);
    let mut diagnostic = Vec::with_capacity(n);
    for _ in 0..n {
        let dist = mu
            .next_distribution(&alpha)
            .ok_or_else(|| LabError::NullCondition(strings::show(&alpha)))?;
        let b = dist
            .iter()
            .position(|p| rational::to_f64(p) > LEMMA3_THRESHOLD)
            .expect("a binary distribution has a symbol above one half") as u8;
        let mut d = alpha.clone();
        d.push(b);
        diagnostic.push(d);
        flipped_probs.push(dist[b as usize].clone());
        alpha.push(1 - b);
    }
    Ok(Lemma3Trace { alpha, flipped_probs, diagnostic })
}

#[derive(Clone, Debug)]
pub struct Lemma5Instance {
    pub measure: MeasureSpec,
    pub x: Vec<u8>,
    pub reports: Vec<BoundReport>,
}

/// `μ_l` (mass one on `0^l 1^∞`) at `x = 0^l`, evaluated against the
/// predictor built from `registry` with `μ_l` added.
pub fn lemma5_instance(l: usize, registry: &MeasureRegistry, est: &Estimator) -> Result<Lemma5Instance> {
    let measure = MeasureSpec::zeros_then_ones(l);
    let mut registry = registry.clone();
    let code = registry.register(measure.clone())?;
    let predictor = Predictor::new(&registry, est)?;
    let x = vec![0u8; l];
    let k_cond = est.k_upper(&code, Some(&x))?.value;
    let d = deficiency(&measure, &predictor, &x)?;
    let one_step = predictor
        .conditional(&[1], &x)
        .ok_or_else(|| LabError::NullCondition(strings::show(&x)))?;
    let divergence = -rational::ln(&one_step);
    let b = est.budget();
    let tag = format!("l={l}");
    let k_l = est.k_int(l as i64, None)?.value;
    let reports = vec![
        BoundReport::measured(
            "lemma5.divergence_vs_k_len",
            Value::real(divergence),
            Value::real(k_l.finite().map_or(f64::INFINITY, |k| k as f64 * std::f64::consts::LN_2)),
        )
        .term("k_len", k_l)
        .term("k_code_given_x", k_cond)
        .term("deficiency", Value::real(d.value))
        .term("predictor_one_given_x", Value::Exact(one_step))
        .budgets(b.max_len, b.max_steps)
        .note(tag),
    ];
    Ok(Lemma5Instance { measure, x, reports })
}

/// `ψ_l(z)`: for `ℓ(z) >= l`,
/// `Σ_ν 2^-K(code ν | z_{1:l}) · ξ(z_{1:l}) · ν(z_{l+1:})`; shorter `z` sum
/// over their length-`l` extensions.
pub fn psi_semimeasure(l: usize, z: &[u8], registry: &MeasureRegistry, predictor: &Predictor) -> Result<Rational> {
    let alphabet = registry.alphabet();
    if z.len() < l {
        let mut total = Rational::zero();
        for u in strings::all_strings(alphabet, l - z.len()) {
            total += psi_semimeasure(l, &[z, &u].concat(), registry, predictor)?;
        }
        return Ok(total);
    }
    let head = &z[..l];
    let xi = predictor.prob(head);
    if xi.is_zero() || registry.is_empty() {
        return Ok(Rational::zero());
    }
    let condition = if alphabet == 2 { head.to_vec() } else { strings::encode_blocks(head, alphabet) };
    let est = predictor.estimator();
    let mut total = Rational::zero();
    for (i, nu) in registry.entries().iter().enumerate() {
        let w = est.k_upper(&MeasureRegistry::code_for(i), Some(&condition))?.value.weight();
        if !w.is_zero() {
            total += w * nu.prob(&z[l..]);
        }
    }
    Ok(total * xi)
}
