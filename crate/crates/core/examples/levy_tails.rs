//! Evaluate and invert the three Lévy tails.

use nbp_measures::tail::LevyTail;

fn main() -> nbp_measures::Result<()> {
    let tails = [
        LevyTail::stable(0.5)?,
        LevyTail::gamma(3.0)?,
        LevyTail::generalized_gamma(0.5)?,
    ];
    for t in &tails {
        match t.support_bound() {
            Ok(b) => println!("{} (support bound {b:.6})", t.label()),
            Err(_) => println!("{}", t.label()),
        }
        for &x in &[1e-4, 0.1, 1.0, 5.0] {
            let y = t.value(x)?;
            println!("  L({x}) = {y:.10e}   L⁻¹(L(x)) = {:.10e}", t.inverse(y)?);
        }
    }
    // Very large levels map to points far below f64 range; use the log inverse.
    let g = LevyTail::gamma(0.1)?;
    println!("ln L⁻¹(1e4) for gamma θ=0.1: {:.3}", g.ln_inverse(1e4)?);
    Ok(())
}
