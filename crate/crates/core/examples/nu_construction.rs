//! Build the level semimeasures `ν_d` on a finite tree, check that every
//! maximal antichain carries mass at most one, and combine the levels.

use kstar_lab::nu::{maximal_cut_count, NuContext};
use kstar_lab::rational::{self, ratio};
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
    let depth = 4;
    let nu = NuContext::new(&registry, &predictor, depth)?;

    println!("maximal cuts of the depth-{depth} tree: {}", maximal_cut_count(depth));
    for d in -3..=1 {
        let check = nu.claim10_verify(d)?;
        let table = nu.nu_fixup(d)?;
        println!(
            "d={d}: nu_d(e)={} max cut sum={} violations={} semimeasure violations={}",
            rational::format(&table.get(&[])),
            rational::format(&check.max_sum),
            check.violations,
            table.semimeasure_violations(),
        );
    }

    let d = -1;
    for z in strings::all_strings_upto(2, 2) {
        println!("  z={:<2} member(T=1)={} nu~_{d}(z)={}", strings::show(&z), nu.s_member(&z, d, 1)?, rational::format(&nu.nu_tilde(&z, d)?));
    }

    let total = nu.nu_total(-4, 4)?;
    println!("level weights sum to {}", rational::format(&total.weight_sum()));
    println!("unwitnessed levels: {:?}", total.unwitnessed_levels());
    println!("domination ratio {}", rational::format(&nu.domination_ratio(&total)));
    let sample = nu.claim10_sample(0, 200, 7)?;
    println!("200 sampled cuts at d=0: {} violations", sample.violations);
    Ok(())
}
