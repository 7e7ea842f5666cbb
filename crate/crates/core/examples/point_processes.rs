//! Poisson arrivals, PRM points and negative binomial process points.

use nbp_measures::points::{
    gamma_arrivals, sample_nbp_points, sample_prm_points, NbpConfig, TruncationPolicy,
};
use nbp_measures::tail::LevyTail;

fn main() -> nbp_measures::Result<()> {
    let stream = gamma_arrivals(7, 5)?;
    println!("arrivals: {:.4?}", stream.arrivals());

    let tail = LevyTail::gamma(3.0)?;
    let prm = sample_prm_points(&tail, &stream)?;
    println!("PRM points: {prm:.4?}");

    for r in [0.0, 2.0, 2.5] {
        let cfg = NbpConfig {
            r,
            tail,
            truncation: TruncationPolicy::epsilon(1e-6),
        };
        let seq = sample_nbp_points(&cfg, 7)?;
        let pts = seq.points();
        println!(
            "NBP r={r}: {} points ({:?}), largest {:.4}, smallest {:.3e}",
            seq.len(),
            seq.status,
            pts[0],
            pts[pts.len() - 1]
        );
    }
    Ok(())
}
