//! Mean ranked weights of PKP^(r) with the gamma tail as r grows.

use nbp_measures::experiments::weight_profile;
use nbp_measures::points::TruncationPolicy;
use nbp_measures::tail::LevyTail;

fn main() -> nbp_measures::Result<()> {
    let tail = LevyTail::gamma(3.0)?;
    let p = weight_profile(
        &tail,
        &[0.0, 3.0, 5.0, 10.0],
        5,
        500,
        &TruncationPolicy::fixed(400),
        9,
        1,
    )?;
    for (r, means) in p.r_grid.iter().zip(&p.means) {
        println!("r={r:<4} {:.4?}", means);
    }
    Ok(())
}
