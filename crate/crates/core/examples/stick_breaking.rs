//! Stick-breaking weights for PD(α, θ) next to the series representation.

use nbp_measures::measure::{
    sample_pdp_series, sample_pdp_stick_breaking, stick_weights, BaseMeasure, PdpParams,
};
use nbp_measures::points::TruncationPolicy;

fn main() -> nbp_measures::Result<()> {
    let (alpha, theta) = (0.5, 2.0);
    let w = stick_weights(alpha, theta, 8, 3)?;
    println!("first sticks: {:.4?}", &w[..8]);
    println!("leftover mass: {:.4}", w[8]);

    let base = BaseMeasure::standard_uniform();
    let sticks = sample_pdp_stick_breaking(alpha, theta, &base, 2000, true, 3)?;
    let series = sample_pdp_series(
        &PdpParams::new(alpha, theta)?,
        &base,
        &TruncationPolicy::fixed(2000),
        3,
    )?;
    println!(
        "largest weight, stick-breaking: {:.4}",
        sticks.largest_weight()
    );
    println!(
        "largest weight, series:         {:.4}",
        series.largest_weight()
    );
    Ok(())
}
