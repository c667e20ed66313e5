//! Enumerate every halting program up to a length budget, check the Kraft
//! sum, and round-trip the witness set through an on-disk snapshot.

use std::sync::Arc;

use kstar_lab::enumeration::WitnessCache;
use kstar_lab::{Estimator, MachineKind, Result, SearchBudget};
use kstar_lab::{rational, strings};

fn main() -> Result<()> {
    let dir = std::env::temp_dir().join("kstar-lab-example-cache");
    let cache = Arc::new(WitnessCache::with_dir(&dir));
    let est = Estimator::with_cache(SearchBudget::new(15, 1000)?, cache);

    for (kind, cond) in [
        (MachineKind::Prefix, None),
        (MachineKind::TwicePrefix, Some(&[1, 0][..])),
        (MachineKind::CondLengthAware, Some(&[1, 0][..])),
    ] {
        let set = est.witnesses(kind, cond)?;
        let kraft = set.kraft_sum();
        println!(
            "{:<16} cond={:<3} witnesses={:<5} kraft={} (~{:.4}) prefix_free={}",
            kind.name(),
            cond.map_or("-".into(), strings::show),
            set.witnesses.len(),
            rational::format(&kraft),
            rational::to_f64(&kraft),
            set.is_prefix_free(),
        );
        for w in set.witnesses.iter().take(3) {
            println!("    {} -> {} (k={}, steps={})", w.program, strings::show(&w.output), w.k, w.steps);
        }
    }

    // A second estimator over the same directory reloads instead of re-running.
    let again = Estimator::with_cache(SearchBudget::new(15, 1000)?, Arc::new(WitnessCache::with_dir(&dir)));
    let reloaded = again.witnesses(MachineKind::Prefix, None)?;
    println!("reloaded {} prefix witnesses from {}", reloaded.witnesses.len(), dir.display());
    Ok(())
}
