//! Expected prediction distances against the divergence, for seeded random
//! pairs of measures and for one hand-built pair.

use kstar_lab::bounds::{divergence, eq1_suite, expected_distance_sum, DistanceKind};
use kstar_lab::rational::ratio;
use kstar_lab::report::render_tabular;
use kstar_lab::{MeasureSpec, Result};

fn main() -> Result<()> {
    let mu = MeasureSpec::iid(vec![ratio(1, 4), ratio(3, 4)]);
    let rho = MeasureSpec::Markov {
        order: 1,
        table: vec![vec![ratio(1, 2), ratio(1, 2)], vec![ratio(1, 3), ratio(2, 3)]],
    };
    let d = divergence(&mu, &rho, &[], 4)?;
    println!("D_1:4 = {d:.6}");
    for kind in DistanceKind::all(2) {
        let lhs = expected_distance_sum(&mu, &rho, &[], 4, &kind)?;
        println!("  {:<16} {lhs:.6}", kind.name());
    }

    let reports = eq1_suite(20, 2024)?;
    let failed = reports.iter().filter(|r| r.failed()).count();
    println!("\n{} checks over 20 seeded pairs, {failed} failed", reports.len());
    print!("{}", render_tabular(&reports[..5]));
    Ok(())
}
