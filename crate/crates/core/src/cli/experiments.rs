//! One runner per experiment selector.

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bounds::{
    self, dominance_violations, eq1_suite, eq4_suite, lemma3_sequence, lemma5_instance, psi_semimeasure,
    theorem_report, Theorem, LEMMA3_THRESHOLD,
};
use crate::complexity::Estimator;
use crate::error::{LabError, Result};
use crate::kstar::{kcorrect_check, profile_report, sandwich_reports};
use crate::measures::{sample_sequence, BayesMixture, MeasureRegistry, MeasureSpec, Predictor, Semimeasure};
use crate::nu::NuContext;
use crate::rational::{self, ratio, Rational};
use crate::report::{BoundReport, Value};
use crate::strings;

use super::config::{ExperimentConfig, Selector};

/// Largest number of strings a dominance or semimeasure sweep may visit.
const MAX_SWEEP: usize = 1 << 16;

pub struct RunContext<'a> {
    pub config: &'a ExperimentConfig,
    pub registry: &'a MeasureRegistry,
    pub predictor: &'a Predictor<'a>,
}

impl RunContext<'_> {
    fn est(&self) -> &Estimator {
        self.predictor.estimator()
    }

    fn seed(&self) -> u64 {
        self.config.seed
    }
}

pub fn run_selector(sel: Selector, ctx: &RunContext) -> Result<Vec<BoundReport>> {
    match sel {
        Selector::Eq1 => eq1_suite(ctx.config.params.eq1_pairs, ctx.seed()),
        Selector::Eq4 => eq4_suite(
            ctx.registry,
            ctx.predictor,
            ctx.config.params.eq4_sequences,
            ctx.config.params.eq4_length,
            ctx.seed(),
        ),
        Selector::Lemma3 => lemma3(ctx),
        Selector::Lemma5 => {
            let mut out = Vec::new();
            for &l in &ctx.config.params.lemma5_lengths {
                out.extend(lemma5_instance(l, ctx.registry, ctx.est())?.reports);
            }
            Ok(out)
        }
        Selector::Psi => psi(ctx),
        Selector::T1 => theorem_cases(ctx, Theorem::T1),
        Selector::T4 => t4(ctx),
        Selector::T7 => theorem_cases(ctx, Theorem::T7),
        Selector::C2 => theorem_cases(ctx, Theorem::C2),
        Selector::C9 => theorem_cases(ctx, Theorem::C9),
        Selector::Claim10 => claim10(ctx),
        Selector::Lemma8 => lemma8(ctx),
        Selector::Kcorrect => {
            let conditions = strings::all_strings_upto(2, ctx.config.params.kcorrect_condition_len);
            kcorrect_check(ctx.est(), &conditions)
        }
        Selector::Dominance => dominance(ctx),
        Selector::Semimeasure => semimeasure(ctx),
        Selector::Posterior => posterior(ctx.est(), ctx.config.params.posterior_horizon, ctx.seed()),
    }
}

/// A first-order Markov measure with seeded, strictly positive rows.
pub fn sample_markov(seed: u64) -> MeasureSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut row = || {
        let a: i64 = rng.gen_range(1..=9);
        let b: i64 = rng.gen_range(1..=9);
        vec![ratio(a, a + b), ratio(b, a + b)]
    };
    MeasureSpec::Markov { order: 1, table: vec![row(), row()] }
}

fn lemma3(ctx: &RunContext) -> Result<Vec<BoundReport>> {
    let n = ctx.config.params.lemma3_length;
    let measures = [
        ("uniform", MeasureSpec::uniform(2)),
        ("iid_2/5", MeasureSpec::iid(vec![ratio(2, 5), ratio(3, 5)])),
        ("markov", sample_markov(ctx.seed())),
    ];
    let mut out = Vec::new();
    for (name, mu) in measures {
        let trace = lemma3_sequence(&mu, n)?;
        let below = trace
            .flipped_probs
            .iter()
            .filter(|p| rational::to_f64(p) <= LEMMA3_THRESHOLD)
            .count();
        let min = trace.flipped_probs.iter().min().cloned().unwrap_or_else(Rational::one);
        let tag = format!("measure={name} alpha={}", strings::show(&trace.alpha));
        out.push(
            BoundReport::asserted("lemma3.threshold", Value::real(LEMMA3_THRESHOLD), Value::Exact(min))
                .term("steps_at_or_below", Value::int(below as i64))
                .note(tag.clone()),
        );
        out.push(BoundReport::violations("lemma3.prefix_free", usize::from(!trace.diagnostic_is_prefix_free())).note(tag));
    }
    Ok(out)
}

fn psi(ctx: &RunContext) -> Result<Vec<BoundReport>> {
    let l = ctx.config.params.psi_level;
    let depth = ctx.config.params.psi_depth;
    let alphabet = ctx.registry.alphabet();
    sweep_size(alphabet, depth + 1)?;
    let mut violations = 0;
    let mut checked = 0;
    for z in strings::all_strings_upto(alphabet, depth) {
        let parent = psi_semimeasure(l, &z, ctx.registry, ctx.predictor)?;
        let mut kids = Rational::zero();
        for a in 0..alphabet as u8 {
            kids += psi_semimeasure(l, &[z.as_slice(), &[a]].concat(), ctx.registry, ctx.predictor)?;
        }
        checked += 1;
        if kids > parent {
            violations += 1;
        }
    }
    let root = psi_semimeasure(l, &[], ctx.registry, ctx.predictor)?;
    let b = ctx.est().budget();
    let tag = format!("level={l} depth={depth} nodes={checked}");
    Ok(vec![
        BoundReport::violations("psi.semimeasure", violations).budgets(b.max_len, b.max_steps).note(tag.clone()),
        BoundReport::asserted("psi.root", Value::Exact(root), Value::int(1)).budgets(b.max_len, b.max_steps).note(tag),
    ])
}

fn theorem_cases(ctx: &RunContext, which: Theorem) -> Result<Vec<BoundReport>> {
    let mut out = Vec::new();
    for case in &ctx.config.params.theorem_cases {
        let x = strings::parse(&case.x)?;
        let y = strings::parse(&case.y)?;
        out.extend(theorem_report(which, ctx.registry, ctx.predictor, case.measure, &x, &y)?);
    }
    Ok(out)
}

/// Seeded triples `(μ, x, y)` with `xy` drawn from `μ`.
pub fn seeded_triples(registry: &MeasureRegistry, count: usize, seed: u64) -> Vec<(usize, Vec<u8>, Vec<u8>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let index = rng.gen_range(0..registry.len());
            let lx = rng.gen_range(0..=4);
            let ly = rng.gen_range(1..=3);
            let w = sample_sequence(&registry.entries()[index], lx + ly, rng.gen());
            (index, w[..lx].to_vec(), w[lx..].to_vec())
        })
        .collect()
}

fn t4(ctx: &RunContext) -> Result<Vec<BoundReport>> {
    let mut out = theorem_cases(ctx, Theorem::T4)?;
    for (index, x, y) in seeded_triples(ctx.registry, ctx.config.params.t4_triples, ctx.seed()) {
        out.extend(theorem_report(Theorem::T4, ctx.registry, ctx.predictor, index, &x, &y)?);
    }
    Ok(out)
}

fn claim10(ctx: &RunContext) -> Result<Vec<BoundReport>> {
    let b = &ctx.config.budgets;
    let p = &ctx.config.params;
    let budget = ctx.est().budget();
    let mut out = Vec::new();
    let full = NuContext::new(ctx.registry, ctx.predictor, b.depth)?;
    for d in b.d_min..=b.d_max {
        out.extend(full.claim10_verify(d)?.report("claim10"));
    }
    if p.claim10_samples > 0 {
        let sampled = NuContext::new(ctx.registry, ctx.predictor, p.claim10_sample_depth)?;
        for d in b.d_min..=b.d_max {
            let seed = ctx.seed().wrapping_add(d as u64);
            out.extend(sampled.claim10_sample(d, p.claim10_samples, seed)?.report("claim10.sample"));
        }
    }
    Ok(out.into_iter().map(|r| r.budgets(budget.max_len, budget.max_steps)).collect())
}

/// Seeded `(output, condition)` pairs for the condition-monotone checks.
pub fn seeded_pairs(count: usize, seed: u64) -> Vec<(Vec<u8>, Vec<u8>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let ly = rng.gen_range(0..=3);
            let lx = rng.gen_range(0..=4);
            let y = (0..ly).map(|_| rng.gen_range(0..2u8)).collect();
            let x = (0..lx).map(|_| rng.gen_range(0..2u8)).collect();
            (y, x)
        })
        .collect()
}

fn lemma8(ctx: &RunContext) -> Result<Vec<BoundReport>> {
    let mut out = Vec::new();
    for (y, x) in seeded_pairs(ctx.config.params.lemma8_pairs, ctx.seed()) {
        out.push(profile_report(ctx.est(), &y, &x)?);
        out.extend(sandwich_reports(ctx.est(), &y, &x)?);
    }
    Ok(out)
}

fn sweep_size(alphabet: usize, len: usize) -> Result<()> {
    match alphabet.checked_pow(len as u32) {
        Some(n) if n <= MAX_SWEEP => Ok(()),
        _ => Err(LabError::BudgetCap {
            what: "sweep length",
            value: len as u64,
            cap: (MAX_SWEEP as f64).log(alphabet as f64).floor() as u64,
        }),
    }
}

fn dominance(ctx: &RunContext) -> Result<Vec<BoundReport>> {
    let len = ctx.config.params.dominance_len;
    sweep_size(ctx.registry.alphabet(), len)?;
    let (dom, floor) = dominance_violations(ctx.registry, ctx.predictor, len);
    let b = ctx.est().budget();
    let tag = format!("strings up to length {len}, {} measures", ctx.registry.len());
    let mut out = vec![
        BoundReport::violations("dominance", dom).budgets(b.max_len, b.max_steps).note(tag.clone()),
        BoundReport::violations("deficiency.floor", floor).budgets(b.max_len, b.max_steps).note(tag),
    ];
    out.push(
        BoundReport::asserted("mixture.weights", Value::Exact(ctx.predictor.zoo().weight_sum()), Value::int(1))
            .budgets(b.max_len, b.max_steps),
    );
    Ok(out)
}

fn semimeasure_violations(rho: &dyn Semimeasure, max_len: usize) -> usize {
    let alphabet = rho.alphabet_size();
    let mut bad = usize::from(rho.prob(&[]) > Rational::one());
    for z in strings::all_strings_upto(alphabet, max_len.saturating_sub(1)) {
        let mut x = z.clone();
        x.push(0);
        let mut kids = Rational::zero();
        for a in 0..alphabet as u8 {
            *x.last_mut().unwrap() = a;
            kids += rho.prob(&x);
        }
        if kids > rho.prob(&z) {
            bad += 1;
        }
    }
    bad
}

struct BigM<'e>(&'e Estimator);

impl Semimeasure for BigM<'_> {
    fn alphabet_size(&self) -> usize {
        2
    }

    fn prob(&self, x: &[u8]) -> Rational {
        self.0.big_m(x).value
    }
}

fn semimeasure(ctx: &RunContext) -> Result<Vec<BoundReport>> {
    let b = ctx.est().budget();
    let cfg = &ctx.config.budgets;
    let len = ctx.config.params.dominance_len;
    sweep_size(ctx.registry.alphabet(), len)?;
    let mut out = vec![
        BoundReport::violations("semimeasure.big_m", semimeasure_violations(&BigM(ctx.est()), len)),
        BoundReport::violations("semimeasure.predictor", semimeasure_violations(ctx.predictor, len)),
    ];
    let nu = NuContext::new(ctx.registry, ctx.predictor, cfg.depth)?;
    let mut table_violations = 0;
    let mut dominated = 0;
    for d in cfg.d_min..=cfg.d_max {
        let table = nu.nu_fixup(d)?;
        table_violations += table.semimeasure_violations();
        let tilde = nu.nu_tilde_table(d)?;
        dominated += tilde.iter().filter(|(z, v)| table.get(z) < **v).count();
    }
    out.push(BoundReport::violations("semimeasure.nu_d", table_violations));
    out.push(BoundReport::violations("nu_d.dominates_tilde", dominated));
    let total = nu.nu_total(cfg.d_min, cfg.d_max)?;
    out.push(BoundReport::violations("semimeasure.nu", semimeasure_violations(&total, cfg.depth)));
    let mut chain_bad = 0;
    let mut chain_checked = 0;
    for t in 0..ctx.registry.len() {
        for x in strings::all_strings_upto(2, cfg.depth / 2) {
            for y in strings::all_strings_upto(2, cfg.depth - x.len()) {
                match nu.chain_instance(&total, t, &x, &y) {
                    Ok(r) => {
                        chain_checked += 1;
                        chain_bad += usize::from(r.failed());
                    }
                    Err(LabError::NullCondition(_) | LabError::InvalidArgument(_)) => {}
                    Err(e) => return Err(e),
                }
            }
        }
    }
    out.push(BoundReport::violations("nu.chain", chain_bad).note(format!("{chain_checked} instances")));
    let ratio = nu.domination_ratio(&total);
    let mut measured = BoundReport::measured("nu.domination_ratio", Value::Exact(ratio), Value::Infinite)
        .note(format!("levels {}..={} depth {}", cfg.d_min, cfg.d_max, cfg.depth));
    let missing = total.unwitnessed_levels();
    if !missing.is_empty() {
        measured = measured.note(format!("levels without a witness for K(d): {missing:?}"));
    }
    out.push(measured);
    Ok(out.into_iter().map(|r| r.budgets(b.max_len, b.max_steps)).collect())
}

/// The seventeen-component environment class over sixteen symbols: one
/// constant sequence per symbol, then the uniform measure.
pub fn repeat_registry() -> MeasureRegistry {
    let specs = (0..16u8).map(|c| MeasureSpec::repeat(c, 16)).chain([MeasureSpec::uniform(16)]);
    MeasureRegistry::from_specs(specs).expect("valid repeat family")
}

/// Divergences after and before the first symbol, with closed forms, for the constant sequence
/// `c c c ...` predicted by the weighted mixture over [`repeat_registry`].
pub struct PosteriorGap {
    pub symbol: u8,
    pub future: f64,
    pub total: f64,
    pub oracle_future: f64,
    pub oracle_total: f64,
}

pub fn posterior_gap(est: &Estimator, symbol: u8, n: usize) -> Result<PosteriorGap> {
    let registry = repeat_registry();
    let mixture = BayesMixture::from_registry(&registry, est)?;
    let mu = registry.get(symbol as usize)?;
    let future = bounds::divergence(mu, &mixture, &[symbol], n)?;
    let total = bounds::divergence(mu, &mixture, &[], n)?;
    // Only the true component and the uniform one give c^n positive mass.
    let weights: Vec<&Rational> = mixture.weights().collect();
    let w_c = weights[symbol as usize];
    let w_u = weights[16];
    let sixteen = Rational::from_integer(16.into());
    let at_one = w_c + w_u / &sixteen;
    let at_n = w_c + w_u / num_traits::pow(sixteen, n);
    if at_n.is_zero() {
        return Err(LabError::InvalidArgument(format!(
            "repeat family gets no mixture weight at program length {}",
            est.budget().max_len
        )));
    }
    Ok(PosteriorGap {
        symbol,
        future,
        total,
        oracle_future: rational::ln(&(&at_one / &at_n)),
        oracle_total: rational::ln(&(mixture.weight_sum() / &at_n)),
    })
}

fn posterior(est: &Estimator, n: usize, seed: u64) -> Result<Vec<BoundReport>> {
    let symbol = (seed % 16) as u8;
    let g = posterior_gap(est, symbol, n)?;
    let b = est.budget();
    let tag = format!("symbol={symbol} n={n}");
    Ok(vec![
        BoundReport::asserted("posterior.future_vs_oracle", Value::real((g.future - g.oracle_future).abs()), Value::int(0))
            .term("future", Value::real(g.future))
            .term("oracle", Value::real(g.oracle_future))
            .budgets(b.max_len, b.max_steps)
            .note(tag.clone()),
        BoundReport::asserted("posterior.total_vs_oracle", Value::real((g.total - g.oracle_total).abs()), Value::int(0))
            .term("total", Value::real(g.total))
            .term("oracle", Value::real(g.oracle_total))
            .budgets(b.max_len, b.max_steps)
            .note(tag.clone()),
        BoundReport::asserted("posterior.future_vs_total", Value::real(g.future), Value::real(g.total))
            .budgets(b.max_len, b.max_steps)
            .note(tag),
    ])
}
