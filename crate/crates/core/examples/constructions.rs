//! The explicit constructions: a sequence on which a measure keeps
//! predicting wrongly, a family where posterior divergence grows with
//! `K(l)`, and a semimeasure built from the predictor's conditional.

use kstar_lab::bounds::{lemma3_sequence, lemma5_instance, psi_semimeasure, LEMMA3_THRESHOLD};
use kstar_lab::rational::{self, ratio};
use kstar_lab::{Estimator, MeasureRegistry, MeasureSpec, Predictor, Result, SearchBudget};
use kstar_lab::strings;

fn main() -> Result<()> {
    let mu = MeasureSpec::iid(vec![ratio(1, 3), ratio(2, 3)]);
    let trace = lemma3_sequence(&mu, 12)?;
    println!("alpha = {}", strings::show(&trace.alpha));
    let min = trace.flipped_probs.iter().map(rational::to_f64).fold(f64::INFINITY, f64::min);
    println!("  smallest flipped probability {min:.4} vs threshold {LEMMA3_THRESHOLD:.4}");
    println!("  diagnostic set prefix-free: {}", trace.diagnostic_is_prefix_free());

    let registry = MeasureRegistry::from_specs([MeasureSpec::uniform(2), mu])?;
    let est = Estimator::new(SearchBudget::new(18, 10_000)?);
    for l in [2, 4, 6] {
        let inst = lemma5_instance(l, &registry, &est)?;
        println!("l={l} x={}", strings::show(&inst.x));
        for r in &inst.reports {
            println!("  {:<30} lhs={} rhs={}", r.name, r.lhs, r.rhs);
        }
    }

    let predictor = Predictor::new(&registry, &est)?;
    let l = 3;
    let mut total = ratio(0, 1);
    for z in strings::all_strings(2, 4) {
        total += psi_semimeasure(l, &z, &registry, &predictor)?;
    }
    println!("psi_{l} mass on strings of length 4: {}", rational::format(&total));
    Ok(())
}
