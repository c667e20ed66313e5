//! The condition-monotone complexity `K_*(y|x*)`: non-increasing along
//! prefixes of the condition, sandwiched between `K(y|x)` and `K(y)`.

use kstar_lab::kstar::{kcorrect_check, kstar_profile, kstar_upper, sandwich_values};
use kstar_lab::{Estimator, Result, SearchBudget, Value};
use kstar_lab::strings;

fn main() -> Result<()> {
    let est = Estimator::new(SearchBudget::new(18, 10_000)?);
    let y = strings::parse_bits("1010")?;
    let x = strings::parse_bits("10100")?;

    let profile = kstar_profile(&est, &y, &x)?;
    println!("K_*({}|x_1:l*) for l = 0..{}:", strings::show(&y), x.len());
    for (l, c) in profile.iter().enumerate() {
        println!("  l={l} {}", Value::from(*c));
    }

    if let Some((p, k)) = kstar_upper(&est, &y, &x)?.witness {
        println!("witness {p} reads {k} condition bits");
    }

    let s = sandwich_values(&est, &y, &x)?;
    println!(
        "K(y|x)={}  K_*(y|x*)={}  min_l K(y|x_1:l)+K(l)={}  K(y)={}",
        Value::from(s.conditional),
        Value::from(s.kstar),
        Value::from(s.prefix_min),
        Value::from(s.unconditional),
    );

    let est = Estimator::new(SearchBudget::new(12, 1000)?);
    let conditions = strings::all_strings_upto(2, 3);
    for r in kcorrect_check(&est, &conditions)? {
        println!("{}: {} violations", r.name, r.lhs);
    }
    Ok(())
}
