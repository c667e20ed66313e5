//! Budgeted complexity estimates. Each value is an upper bound that can
//! only decrease as the budget grows; "inf" means no witness fits.

use kstar_lab::{Estimator, Result, SearchBudget, Value};
use kstar_lab::{rational, strings};

fn main() -> Result<()> {
    for len in [9, 12, 15, 18] {
        let est = Estimator::new(SearchBudget::new(len, 10_000)?);
        println!("L = {len}");
        for s in ["", "0", "11", "0101", "111111"] {
            let x = strings::parse_bits(s)?;
            let k = est.k_upper(&x, None)?;
            let km = est.km_upper(&x);
            let m = est.big_m(&x);
            println!(
                "  x={:<7} K={:<4} Km={:<4} M={} (KM={:.3})",
                strings::show(&x),
                Value::from(k.value).to_string(),
                Value::from(km.value).to_string(),
                rational::format(&m.value),
                est.km_solomonoff(&x),
            );
        }
        let given = est.k_upper(&[1, 1], Some(&[1, 1]))?;
        println!("  K(11|11) = {}", Value::from(given.value));
        let k_int: Vec<String> = (-2..=2)
            .map(|n| est.k_int(n, None).map(|e| Value::from(e.value).to_string()))
            .collect::<Result<_>>()?;
        println!("  K(n) for n = -2..2: {}", k_int.join(" "));
    }
    Ok(())
}
