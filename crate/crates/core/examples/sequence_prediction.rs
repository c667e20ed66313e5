//! Predicting a single sequence: per-step error `1 - a_t` against log loss
//! `-ln a_t`, and the running totals against the sequence's complexity.

use kstar_lab::bounds::{eq4_chain, verify_eq4_chain};
use kstar_lab::measures::sample_sequence;
use kstar_lab::rational::{self, ratio};
use kstar_lab::{Estimator, MeasureRegistry, MeasureSpec, Predictor, Result, SearchBudget, Value};
use kstar_lab::strings;

fn main() -> Result<()> {
    let registry = MeasureRegistry::from_specs([
        MeasureSpec::uniform(2),
        MeasureSpec::iid(vec![ratio(1, 4), ratio(3, 4)]),
        MeasureSpec::zeros_then_ones(3),
    ])?;
    let est = Estimator::new(SearchBudget::new(18, 10_000)?);
    let predictor = Predictor::new(&registry, &est)?;

    for (i, alpha) in [
        strings::parse_bits("000111111111")?,
        sample_sequence(registry.get(1)?, 12, 5),
    ]
    .iter()
    .enumerate()
    {
        let chain = eq4_chain(alpha, &predictor, alpha.len());
        println!("alpha = {}", strings::show(alpha));
        for (t, a) in chain.conditionals.iter().enumerate() {
            let a = rational::to_f64(a);
            println!("  t={:<2} a={a:.4} 1-a={:.4} -ln a={:.4}", t + 1, 1.0 - a, -a.ln());
        }
        println!(
            "  error sum {:.4} <= log loss {:.4}, total log loss {:.4}",
            rational::to_f64(&chain.error_sum),
            chain.log_loss,
            chain.total_log_loss
        );
        let k = est.k_upper(&registry.code(if i == 0 { 2 } else { 1 })?, None)?;
        for r in verify_eq4_chain(alpha, &predictor, alpha.len(), Some(Value::from(k.value))) {
            println!("  {:<28} lhs={} rhs={} {:?}", r.name, r.lhs, r.rhs, r.verdict);
        }
    }
    Ok(())
}
