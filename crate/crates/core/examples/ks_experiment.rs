//! Mean Kolmogorov distance to the base measure over a small grid.
//!
//! Pass `--full` to run the bundled nine-row grid at 500 replications.

use nbp_measures::experiments::{GridRow, KsGrid};
use nbp_measures::measure::BaseMeasure;

fn main() -> nbp_measures::Result<()> {
    let mut grid = KsGrid::bundled();
    if !std::env::args().any(|a| a == "--full") {
        grid.replications = 100;
        grid.rows = [(1.0, 2.0), (10.0, 20.0), (100.0, 200.0)]
            .iter()
            .map(|&(theta, r)| GridRow {
                alpha: 0.5,
                theta,
                r,
                reference: None,
            })
            .collect();
    }
    let jobs = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1);
    for res in grid.run(2024, jobs, &BaseMeasure::standard_uniform())? {
        println!(
            "alpha={} theta={} r={}: mean d = {:.4} ± {:.4}",
            res.row.alpha, res.row.theta, res.row.r, res.result.mean_distance, res.result.std_error
        );
    }
    Ok(())
}
