//! Draw several random probability measures and show their top weights.

use nbp_measures::measure::{
    sample_dp, sample_extended_dp_finite, sample_pdp_series, sample_pkp, sample_stable_normalized,
    BaseMeasure, DiscreteMeasure, ExtendedDpParams, PdpParams,
};
use nbp_measures::points::TruncationPolicy;
use nbp_measures::tail::LevyTail;

fn show(name: &str, m: &DiscreteMeasure) {
    let top: Vec<String> = m
        .ranked_weights()
        .iter()
        .take(4)
        .map(|w| format!("{w:.4}"))
        .collect();
    println!(
        "{name:<22} atoms={:<5} top weights {}",
        m.len(),
        top.join(" ")
    );
}

fn main() -> nbp_measures::Result<()> {
    let base = BaseMeasure::standard_uniform();
    let trunc = TruncationPolicy::fixed(500);
    let seed = 11;

    show("dirichlet θ=3", &sample_dp(3.0, &base, &trunc, seed)?);
    show(
        "pkp gamma r=5",
        &sample_pkp(5.0, &LevyTail::gamma(3.0)?, &base, &trunc, seed)?,
    );
    show(
        "stable α=0.5",
        &sample_stable_normalized(0.5, &base, &trunc, seed)?,
    );
    show(
        "pdp α=0.5 θ=2",
        &sample_pdp_series(&PdpParams::new(0.5, 2.0)?, &base, &trunc, seed)?,
    );
    let ext = ExtendedDpParams::new(3.0, 0, 500)?;
    show(
        "extended dp r=0",
        &sample_extended_dp_finite(&ext, &base, seed)?,
    );

    // Any base with a sampler works; the CDF is only needed for distances.
    let expo = BaseMeasure::exponential(2.0)?;
    let m = sample_dp(1.0, &expo, &trunc, seed)?;
    println!(
        "P(X ≤ 0.5) under DP(1, Exp(2)): {:.4}",
        m.mass_at_or_below(0.5)
    );
    let json = m.to_json()?;
    println!("{}...", &json[..json.len().min(200)]);
    Ok(())
}
