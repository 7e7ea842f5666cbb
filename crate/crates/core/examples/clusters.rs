//! Number of distinct values among n draws: log growth for the Dirichlet
//! process, power growth for Poisson–Dirichlet.

use nbp_measures::experiments::{
    clustering_growth, dirichlet_expected_clusters, ProcessKind, ProcessParams,
};
use nbp_measures::measure::{distinct_count, draw_from_measure, sample_dp, BaseMeasure};
use nbp_measures::points::TruncationPolicy;

fn main() -> nbp_measures::Result<()> {
    let m = sample_dp(
        3.0,
        &BaseMeasure::standard_uniform(),
        &TruncationPolicy::epsilon(1e-12),
        5,
    )?;
    let draws = draw_from_measure(&m, 1000, 5)?;
    println!(
        "one DP(3) realization: {} clusters in 1000 draws",
        distinct_count(&draws)?
    );

    let dp = ProcessParams {
        theta: Some(3.0),
        ..Default::default()
    };
    let g = clustering_growth(
        ProcessKind::Dirichlet,
        &dp,
        &TruncationPolicy::epsilon(1e-12),
        &[10, 100, 1000],
        200,
        5,
        1,
    )?;
    for i in 0..g.n_grid.len() {
        println!(
            "DP   n={:<6} mean K_n {:>7.3}  exact {:>7.3}",
            g.n_grid[i],
            g.kn_means[i],
            dirichlet_expected_clusters(3.0, g.n_grid[i])
        );
    }

    let pd = ProcessParams {
        alpha: Some(0.5),
        theta: Some(1.0),
        ..Default::default()
    };
    let g = clustering_growth(
        ProcessKind::PdpSeries,
        &pd,
        &TruncationPolicy::fixed(5000),
        &[100, 1000],
        100,
        5,
        1,
    )?;
    for i in 0..g.n_grid.len() {
        println!(
            "PD   n={:<6} mean K_n {:>7.3}  K_n/sqrt(n) {:.3}",
            g.n_grid[i], g.kn_means[i], g.ratios[i]
        );
    }
    Ok(())
}
