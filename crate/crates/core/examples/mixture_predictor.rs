//! A registry of computable measures, its weighted mixture, and the
//! dominant predictor built from it. Samples a sequence from one member and
//! watches the predictor's conditional probabilities converge.

use kstar_lab::measures::{sample_sequence, BayesMixture};
use kstar_lab::rational::{self, ratio};
use kstar_lab::{Estimator, MeasureRegistry, MeasureSpec, Predictor, Result, SearchBudget, Semimeasure};
use kstar_lab::strings;

fn main() -> Result<()> {
    let registry = MeasureRegistry::from_specs([
        MeasureSpec::uniform(2),
        MeasureSpec::iid(vec![ratio(1, 4), ratio(3, 4)]),
        MeasureSpec::zeros_then_ones(3),
        MeasureSpec::periodic(&[0, 1, 1], 2),
    ])?;
    let est = Estimator::new(SearchBudget::new(18, 10_000)?);
    let mixture = BayesMixture::from_registry(&registry, &est)?;
    let predictor = Predictor::new(&registry, &est)?;

    for (i, w) in mixture.weights().enumerate() {
        println!("entry {i}: code={:<3} weight={}", strings::show(&registry.code(i)?), rational::format(w));
    }
    println!("total weight {}", rational::format(&mixture.weight_sum()));

    let truth = registry.get(1)?;
    let x = sample_sequence(truth, 24, 11);
    println!("sampled {}", strings::show(&x));
    for t in [0, 4, 8, 16, 23] {
        let past = &x[..t];
        let show = |p: Option<kstar_lab::Rational>| p.as_ref().map_or(f64::NAN, rational::to_f64);
        println!(
            "  t={t:<2} P(1|past): truth={:.4} mixture={:.4} predictor={:.4}",
            show(truth.conditional(&[1], past)),
            show(mixture.conditional(&[1], past)),
            show(predictor.conditional(&[1], past)),
        );
    }

    for i in 0..registry.len() {
        println!("dominance weight of entry {i}: {}", rational::format(&predictor.dominance_weight(i)));
    }
    Ok(())
}
