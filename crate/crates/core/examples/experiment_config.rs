//! Drive a run from a TOML config, as the command line does, and print the
//! asserted failures (none expected) and a few measured-only terms.

use kstar_lab::cli::{run_experiments, ExperimentConfig};
use kstar_lab::{Estimator, Result, Verdict};

const CONFIG: &str = r#"
seed = 11
experiments = ["eq1", "lemma3", "t4", "dominance"]

[budgets]
program_len = 15
steps = 2000

[params]
eq1_pairs = 8
t4_triples = 10
dominance_len = 6
"#;

fn main() -> Result<()> {
    let path = std::env::args().nth(1);
    let config = match &path {
        Some(p) => ExperimentConfig::load(p.as_ref())?,
        None => ExperimentConfig::from_toml(CONFIG)?,
    };
    let est = Estimator::new(config.search_budget()?);
    let reports = run_experiments(&config, &est)?;

    let asserted = reports.iter().filter(|r| r.verdict == Verdict::AssertedExact).count();
    let failed: Vec<_> = reports.iter().filter(|r| r.failed()).collect();
    println!("{} reports, {asserted} asserted, {} failed", reports.len(), failed.len());
    for r in failed {
        println!("FAILED {} lhs={} rhs={}", r.name, r.lhs, r.rhs);
    }
    for r in reports.iter().filter(|r| r.verdict == Verdict::MeasuredOnly).take(5) {
        println!("measured {} lhs={} rhs={} slack={}", r.name, r.lhs, r.rhs, r.slack);
    }
    Ok(())
}
