//! Incomplete gamma values, E1, and the upper gamma quantile.

use nbp_measures::special::{
    exp_integral_e1, gamma_quantile_upper, gamma_survival, log_gamma, upper_incomplete_gamma,
    Precision,
};

fn main() -> nbp_measures::Result<()> {
    let prec = Precision::default();
    println!("{:>6} {:>8} {:>22}", "a", "x", "Γ(a, x)");
    for &a in &[-0.5, 0.5, 2.0] {
        for &x in &[0.01, 1.0, 10.0] {
            println!(
                "{a:>6} {x:>8} {:>22.15e}",
                upper_incomplete_gamma(a, x, prec)?
            );
        }
    }
    println!("E1(1) = {:.16}", exp_integral_e1(1.0)?);
    println!("ln Γ(0.5) = {:.16}", log_gamma(0.5)?);

    // The quantile is returned on the log scale so tiny shapes stay representable.
    for &shape in &[0.01, 1.0, 5.0] {
        let ln_x = gamma_quantile_upper(shape, 0.5, prec)?;
        println!(
            "shape {shape}: median = exp({ln_x:.6}), check Q = {:.12}",
            gamma_survival(shape, ln_x.exp())?
        );
    }
    Ok(())
}
