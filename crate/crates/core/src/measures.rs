//! The computable-measure zoo, the measure registry and the mixture predictors.
//!
//! A [`MeasureRegistry`] assigns each registered measure a binary index code
//! (the bijective code of the zig-zag of its ordinal). The Bayes mixture over
//! the registry weighs each measure by `2^-K(code)`; the [`Predictor`] mixes
//! that with the machine's own semimeasure `M`:
//!
//! ```text
//! ξ_L(x) = ½·M(x) + ½·Σ_ν 2^-K(code ν)·ν(x)
//! ```
//!
//! which dominates every registered `μ` with the exact constant
//! `½·2^-K(code μ)`.

use std::collections::HashMap;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::complexity::{Complexity, Estimator};
use crate::error::{LabError, Result};
use crate::machine::{run, Budget, MachineKind, Opcode, Program, RunStatus};
use crate::rational::{self, pow2, serde_rational, serde_rational_table, serde_rational_vec, Rational};
use crate::strings;

pub const MAX_ALPHABET: usize = 16;

/// Step budget for running a deterministic measure's generator program.
const GENERATOR_STEPS: u64 = 100_000;

/// Anything that assigns exact (semi)probabilities to finite strings.
pub trait Semimeasure {
    fn alphabet_size(&self) -> usize;

    fn prob(&self, x: &[u8]) -> Rational;

    /// `ρ(y|x) = ρ(xy)/ρ(x)`, `None` when `ρ(x) = 0`.
    fn conditional(&self, y: &[u8], given: &[u8]) -> Option<Rational> {
        let g = self.prob(given);
        if g.is_zero() {
            return None;
        }
        Some(self.prob(&[given, y].concat()) / g)
    }

    /// `ρ(a|x)` for every symbol `a`, `None` when `ρ(x) = 0`.
    fn next_distribution(&self, given: &[u8]) -> Option<Vec<Rational>> {
        let g = self.prob(given);
        if g.is_zero() {
            return None;
        }
        let mut x = given.to_vec();
        x.push(0);
        Some(
            (0..self.alphabet_size() as u8)
                .map(|a| {
                    *x.last_mut().unwrap() = a;
                    self.prob(&x) / &g
                })
                .collect(),
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MixtureComponent {
    #[serde(with = "serde_rational")]
    pub weight: Rational,
    pub measure: MeasureSpec,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MeasureSpec {
    /// Probability one on `s^∞`, where `s` is the block-decoded output of
    /// `program` on the monotone machine.
    Deterministic { program: Program, alphabet: usize },
    Iid {
        #[serde(with = "serde_rational_vec")]
        probs: Vec<Rational>,
    },
    /// Row `c` of `table` is the next-symbol distribution after context `c`
    /// (the last `order` symbols, read as a base-`|X|` number, left-padded
    /// with symbol 0).
    Markov {
        order: usize,
        #[serde(with = "serde_rational_table")]
        table: Vec<Vec<Rational>>,
    },
    /// Probability one on `0^zeros 1^∞`.
    ZerosThenOnes { zeros: usize },
    Uniform { alphabet: usize },
    Mixture { components: Vec<MixtureComponent> },
}

impl MeasureSpec {
    pub fn uniform(alphabet: usize) -> Self {
        MeasureSpec::Uniform { alphabet }
    }

    pub fn iid(probs: Vec<Rational>) -> Self {
        MeasureSpec::Iid { probs }
    }

    pub fn zeros_then_ones(zeros: usize) -> Self {
        MeasureSpec::ZerosThenOnes { zeros }
    }

    /// Deterministic measure on `period^∞`; the generator program emits the
    /// block encoding of `period` and halts.
    pub fn periodic(period: &[u8], alphabet: usize) -> Self {
        let mut ops: Vec<Opcode> = strings::encode_blocks(period, alphabet)
            .into_iter()
            .map(|b| if b == 0 { Opcode::Emit0 } else { Opcode::Emit1 })
            .collect();
        ops.push(Opcode::Halt);
        MeasureSpec::Deterministic {
            program: Program::from_opcodes(&ops),
            alphabet,
        }
    }

    /// The environment `c c c ...`.
    pub fn repeat(symbol: u8, alphabet: usize) -> Self {
        Self::periodic(&[symbol], alphabet)
    }

    pub fn alphabet(&self) -> usize {
        match self {
            MeasureSpec::Deterministic { alphabet, .. } | MeasureSpec::Uniform { alphabet } => *alphabet,
            MeasureSpec::Iid { probs } => probs.len(),
            MeasureSpec::Markov { table, .. } => table.first().map_or(0, Vec::len),
            MeasureSpec::ZerosThenOnes { .. } => 2,
            MeasureSpec::Mixture { components } => {
                components.first().map_or(0, |c| c.measure.alphabet())
            }
        }
    }

    /// Symbols of the period of a deterministic measure.
    pub fn period(&self) -> Result<Vec<u8>> {
        let MeasureSpec::Deterministic { program, alphabet } = self else {
            return Err(LabError::InvalidSpec("not a deterministic measure".into()));
        };
        let out = run(MachineKind::Monotone, program, None, Budget::steps(GENERATOR_STEPS));
        if !matches!(out.status, RunStatus::Halted | RunStatus::ProgramExhausted) {
            return Err(LabError::InvalidSpec(format!(
                "generator program ended with {:?}",
                out.status
            )));
        }
        let (symbols, rest) = strings::decode_blocks(&out.output, *alphabet);
        if symbols.is_empty() || !rest.is_empty() || symbols.iter().any(|&s| s as usize >= *alphabet) {
            return Err(LabError::InvalidSpec(
                "generator output is not a nonempty sequence of whole symbols".into(),
            ));
        }
        Ok(symbols)
    }

    pub fn validate(&self) -> Result<()> {
        let alphabet = self.alphabet();
        if !(2..=MAX_ALPHABET).contains(&alphabet) {
            return Err(LabError::InvalidSpec(format!("alphabet size {alphabet} out of 2..=16")));
        }
        let distribution = |row: &[Rational]| -> Result<()> {
            if row.len() != alphabet {
                return Err(LabError::InvalidSpec("row length differs from alphabet".into()));
            }
            if row.iter().any(Signed::is_negative) {
                return Err(LabError::InvalidSpec("negative probability".into()));
            }
            if row.iter().sum::<Rational>() != Rational::one() {
                return Err(LabError::InvalidSpec("probabilities do not sum to 1".into()));
            }
            Ok(())
        };
        match self {
            MeasureSpec::Deterministic { .. } => self.period().map(|_| ()),
            MeasureSpec::Iid { probs } => distribution(probs),
            MeasureSpec::Markov { order, table } => {
                let rows = alphabet.checked_pow(*order as u32).filter(|&r| r <= 4096);
                if rows != Some(table.len()) {
                    return Err(LabError::InvalidSpec(format!(
                        "markov table needs |X|^order rows, got {}",
                        table.len()
                    )));
                }
                table.iter().try_for_each(|row| distribution(row))
            }
            MeasureSpec::ZerosThenOnes { .. } | MeasureSpec::Uniform { .. } => Ok(()),
            MeasureSpec::Mixture { components } => {
                if components.is_empty() {
                    return Err(LabError::InvalidSpec("empty mixture".into()));
                }
                for c in components {
                    c.measure.validate()?;
                    if c.measure.alphabet() != alphabet {
                        return Err(LabError::InvalidSpec("mixture components disagree on alphabet".into()));
                    }
                    if !c.weight.is_positive() {
                        return Err(LabError::InvalidSpec("mixture weights must be positive".into()));
                    }
                }
                if components.iter().map(|c| &c.weight).sum::<Rational>() != Rational::one() {
                    return Err(LabError::InvalidSpec("mixture weights do not sum to 1".into()));
                }
                Ok(())
            }
        }
    }

    fn markov_row<'a>(order: usize, table: &'a [Vec<Rational>], alphabet: usize, history: &[u8]) -> &'a [Rational] {
        let ctx = (0..order).fold(0usize, |acc, i| {
            let sym = (history.len() + i)
                .checked_sub(order)
                .map_or(0, |j| history[j] as usize);
            acc * alphabet + sym
        });
        &table[ctx]
    }

    /// `μ(·|history)` assuming `μ(history) > 0`.
    pub fn next_distribution_unchecked(&self, history: &[u8]) -> Vec<Rational> {
        let alphabet = self.alphabet();
        let point = |sym: usize| {
            let mut v = vec![Rational::zero(); alphabet];
            v[sym] = Rational::one();
            v
        };
        match self {
            MeasureSpec::Iid { probs } => probs.clone(),
            MeasureSpec::Uniform { alphabet } => vec![rational::ratio(1, *alphabet as i64); *alphabet],
            MeasureSpec::Markov { order, table } => {
                Self::markov_row(*order, table, alphabet, history).to_vec()
            }
            MeasureSpec::ZerosThenOnes { zeros } => point(usize::from(history.len() >= *zeros)),
            MeasureSpec::Deterministic { .. } => {
                let period = self.period().expect("validated deterministic measure");
                point(period[history.len() % period.len()] as usize)
            }
            MeasureSpec::Mixture { components } => {
                let joint: Vec<Rational> = components.iter().map(|c| &c.weight * c.measure.prob(history)).collect();
                let total: Rational = joint.iter().sum();
                let mut dist = vec![Rational::zero(); alphabet];
                for (c, j) in components.iter().zip(&joint) {
                    if j.is_zero() {
                        continue;
                    }
                    for (d, p) in dist.iter_mut().zip(c.measure.next_distribution_unchecked(history)) {
                        *d += j * p;
                    }
                }
                dist.into_iter().map(|d| d / &total).collect()
            }
        }
    }
}

impl Semimeasure for MeasureSpec {
    fn alphabet_size(&self) -> usize {
        self.alphabet()
    }

    fn prob(&self, x: &[u8]) -> Rational {
        let alphabet = self.alphabet();
        if x.iter().any(|&s| s as usize >= alphabet) {
            return Rational::zero();
        }
        match self {
            MeasureSpec::Iid { probs } => x.iter().map(|&s| probs[s as usize].clone()).product(),
            MeasureSpec::Uniform { .. } => {
                Rational::new(BigInt::one(), BigInt::from(alphabet).pow(x.len() as u32))
            }
            MeasureSpec::Markov { order, table } => (0..x.len())
                .map(|t| Self::markov_row(*order, table, alphabet, &x[..t])[x[t] as usize].clone())
                .product(),
            MeasureSpec::ZerosThenOnes { zeros } => {
                let on_path = x.iter().enumerate().all(|(t, &s)| s == u8::from(t >= *zeros));
                if on_path { Rational::one() } else { Rational::zero() }
            }
            MeasureSpec::Deterministic { .. } => {
                let period = self.period().expect("validated deterministic measure");
                let on_path = x.iter().enumerate().all(|(t, &s)| s == period[t % period.len()]);
                if on_path { Rational::one() } else { Rational::zero() }
            }
            MeasureSpec::Mixture { components } => {
                components.iter().map(|c| &c.weight * c.measure.prob(x)).sum()
            }
        }
    }

    fn next_distribution(&self, given: &[u8]) -> Option<Vec<Rational>> {
        if self.prob(given).is_zero() {
            return None;
        }
        Some(self.next_distribution_unchecked(given))
    }
}

/// `μ(x)`, or `μ(x|given)` when `given` is supplied.
pub fn measure_eval(spec: &impl Semimeasure, x: &[u8], given: Option<&[u8]>) -> Result<Rational> {
    match given {
        None => Ok(spec.prob(x)),
        Some(g) => spec
            .conditional(x, g)
            .ok_or_else(|| LabError::NullCondition(strings::show(g))),
    }
}

/// A `|X|`-ary semimeasure viewed on the bit strings of its block encoding.
/// A partial trailing block receives the mass of all its completions.
pub struct BlockEncoded<'a, M: Semimeasure + ?Sized>(pub &'a M);

impl<M: Semimeasure + ?Sized> Semimeasure for BlockEncoded<'_, M> {
    fn alphabet_size(&self) -> usize {
        2
    }

    fn prob(&self, bits: &[u8]) -> Rational {
        let alphabet = self.0.alphabet_size();
        if alphabet == 2 {
            return self.0.prob(bits);
        }
        let w = strings::bits_per_symbol(alphabet);
        let (mut symbols, rest) = strings::decode_blocks(bits, alphabet);
        if rest.is_empty() {
            return if symbols.iter().any(|&s| s as usize >= alphabet) {
                Rational::zero()
            } else {
                self.0.prob(&symbols)
            };
        }
        let head = rest.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize) << (w - rest.len());
        let span = 1usize << (w - rest.len());
        symbols.push(0);
        (head..head + span)
            .filter(|&s| s < alphabet)
            .map(|s| {
                *symbols.last_mut().unwrap() = s as u8;
                self.0.prob(&symbols)
            })
            .sum()
    }
}

// ---------------------------------------------------------------------------
// Registry

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasureRegistry {
    entries: Vec<MeasureSpec>,
}

impl MeasureRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Index code of the measure at `ordinal`.
    pub fn code_for(ordinal: usize) -> Vec<u8> {
        strings::int_code(ordinal as i64)
    }

    /// Appends `spec` and returns its code; re-registering an identical spec
    /// returns the existing code.
    pub fn register(&mut self, spec: MeasureSpec) -> Result<Vec<u8>> {
        if let Some(i) = self.entries.iter().position(|e| *e == spec) {
            return Ok(Self::code_for(i));
        }
        spec.validate()?;
        if let Some(first) = self.entries.first() {
            if first.alphabet() != spec.alphabet() {
                return Err(LabError::AlphabetMismatch {
                    expected: first.alphabet(),
                    found: spec.alphabet(),
                });
            }
        }
        self.entries.push(spec);
        Ok(Self::code_for(self.entries.len() - 1))
    }

    pub fn from_specs(specs: impl IntoIterator<Item = MeasureSpec>) -> Result<Self> {
        let mut r = Self::new();
        for s in specs {
            r.register(s)?;
        }
        Ok(r)
    }

    pub fn entries(&self) -> &[MeasureSpec] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, index: usize) -> Result<&MeasureSpec> {
        self.entries.get(index).ok_or(LabError::Unregistered(index))
    }

    pub fn code(&self, index: usize) -> Result<Vec<u8>> {
        self.get(index).map(|_| Self::code_for(index))
    }

    pub fn index_of(&self, spec: &MeasureSpec) -> Option<usize> {
        self.entries.iter().position(|e| e == spec)
    }

    pub fn alphabet(&self) -> usize {
        self.entries.first().map_or(2, MeasureSpec::alphabet)
    }
}

/// `Σ_ν w_ν·ν(x)` with `w_ν = 2^-K(code ν)`.
#[derive(Clone, Debug)]
pub struct BayesMixture {
    alphabet: usize,
    terms: Vec<(Rational, MeasureSpec)>,
    complexities: Vec<Complexity>,
}

impl BayesMixture {
    pub fn from_registry(registry: &MeasureRegistry, est: &Estimator) -> Result<Self> {
        let mut terms = Vec::with_capacity(registry.len());
        let mut complexities = Vec::with_capacity(registry.len());
        for (i, spec) in registry.entries().iter().enumerate() {
            let k = est.k_upper(&MeasureRegistry::code_for(i), None)?.value;
            complexities.push(k);
            terms.push((k.weight(), spec.clone()));
        }
        Ok(BayesMixture {
            alphabet: registry.alphabet(),
            terms,
            complexities,
        })
    }

    pub fn weights(&self) -> impl Iterator<Item = &Rational> {
        self.terms.iter().map(|(w, _)| w)
    }

    /// `K(code ν)` per registry entry.
    pub fn code_complexities(&self) -> &[Complexity] {
        &self.complexities
    }

    pub fn weight_sum(&self) -> Rational {
        self.weights().sum()
    }

    /// The mixture evaluated on a bit string (block-encoded view of each component).
    pub fn prob_bits(&self, bits: &[u8]) -> Rational {
        self.terms
            .iter()
            .filter(|(w, _)| !w.is_zero())
            .map(|(w, m)| w * BlockEncoded(m).prob(bits))
            .sum()
    }
}

impl Semimeasure for BayesMixture {
    fn alphabet_size(&self) -> usize {
        self.alphabet
    }

    fn prob(&self, x: &[u8]) -> Rational {
        self.terms
            .iter()
            .filter(|(w, _)| !w.is_zero())
            .map(|(w, m)| w * m.prob(x))
            .sum()
    }
}

/// The dominant predictor `ξ_L = ½·M + ½·ξ_zoo`.
///
/// Operates on bit strings internally; as a [`Semimeasure`] it accepts
/// strings over the registry alphabet and evaluates their block encoding.
#[derive(Debug)]
pub struct Predictor<'e> {
    est: &'e Estimator,
    zoo: BayesMixture,
    cache: Mutex<HashMap<Vec<u8>, Rational>>,
}

impl<'e> Predictor<'e> {
    pub fn new(registry: &MeasureRegistry, est: &'e Estimator) -> Result<Self> {
        Ok(Predictor {
            est,
            zoo: BayesMixture::from_registry(registry, est)?,
            cache: Mutex::default(),
        })
    }

    pub fn estimator(&self) -> &'e Estimator {
        self.est
    }

    pub fn zoo(&self) -> &BayesMixture {
        &self.zoo
    }

    /// `ξ_L` on a bit string.
    pub fn prob_bits(&self, bits: &[u8]) -> Rational {
        if let Some(v) = self.cache.lock().unwrap().get(bits) {
            return v.clone();
        }
        let half = rational::ratio(1, 2);
        let v = &half * self.est.big_m(bits).value + &half * self.zoo.prob_bits(bits);
        self.cache.lock().unwrap().insert(bits.to_vec(), v.clone());
        v
    }

    /// `½·2^-K(code μ)`, the dominance constant for registry entry `index`.
    pub fn dominance_weight(&self, index: usize) -> Rational {
        self.zoo.complexities[index].weight() * rational::ratio(1, 2)
    }
}

impl Semimeasure for Predictor<'_> {
    fn alphabet_size(&self) -> usize {
        self.zoo.alphabet
    }

    fn prob(&self, x: &[u8]) -> Rational {
        if self.zoo.alphabet == 2 {
            self.prob_bits(x)
        } else {
            self.prob_bits(&strings::encode_blocks(x, self.zoo.alphabet))
        }
    }
}

/// `ξ_L(x)` for `x` over the registry alphabet.
pub fn predictor_eval(registry: &MeasureRegistry, est: &Estimator, x: &[u8]) -> Result<Rational> {
    Ok(Predictor::new(registry, est)?.prob(x))
}

/// Draws `n` symbols from `spec` by inverse transform on exact conditionals.
/// Each step consumes one 64-bit word `u` from a ChaCha8 stream seeded with
/// `seed` and picks the first symbol whose cumulative probability exceeds
/// `u / 2^64`.
pub fn sample_sequence(spec: &MeasureSpec, n: usize, seed: u64) -> Vec<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = pow2(-64);
    let mut x = Vec::with_capacity(n);
    for _ in 0..n {
        let u = Rational::from_integer(BigInt::from(rng.next_u64())) * &scale;
        let dist = spec.next_distribution_unchecked(&x);
        let mut cumulative = Rational::zero();
        let mut chosen = dist.len() - 1;
        for (a, p) in dist.iter().enumerate() {
            cumulative += p;
            if u < cumulative {
                chosen = a;
                break;
            }
        }
        x.push(chosen as u8);
    }
    x
}
