//! Posterior bounds for a single measure and a past/future split, with the
//! universal-constant terms reported rather than asserted.

use kstar_lab::bounds::{theorem_report, Theorem};
use kstar_lab::rational::ratio;
use kstar_lab::report::render_tabular;
use kstar_lab::{Estimator, MeasureRegistry, MeasureSpec, Predictor, Result, SearchBudget};
use kstar_lab::strings;

fn main() -> Result<()> {
    let registry = MeasureRegistry::from_specs([
        MeasureSpec::uniform(2),
        MeasureSpec::iid(vec![ratio(1, 4), ratio(3, 4)]),
        MeasureSpec::zeros_then_ones(3),
    ])?;
    let est = Estimator::new(SearchBudget::new(18, 10_000)?);
    let predictor = Predictor::new(&registry, &est)?;

    let x = strings::parse_bits("1")?;
    let y = strings::parse_bits("1111")?;
    let mut reports = Vec::new();
    for which in Theorem::ALL {
        reports.extend(theorem_report(which, &registry, &predictor, 1, &x, &y)?);
    }
    print!("{}", render_tabular(&reports));
    Ok(())
}
