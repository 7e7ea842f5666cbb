//! Goodness-of-fit helpers: Kolmogorov–Smirnov tests, chi-square tail
//! probabilities and the Beta distribution function.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{gamma_survival, log_gamma};

/// Statistic and asymptotic p-value of a test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub statistic: f64,
    pub p_value: f64,
}

/// `P(K > λ)` for the Kolmogorov distribution `K = sup|B(t)|`.
pub fn kolmogorov_survival(lambda: f64) -> f64 {
    if !(lambda > 0.0) {
        return 1.0;
    }
    if lambda < 1.18 {
        // Jacobi theta form converges fast for small λ.
        let c = -std::f64::consts::PI.powi(2) / (8.0 * lambda * lambda);
        let mut s = 0.0;
        for k in 1..=20 {
            let j = (2 * k - 1) as f64;
            s += (c * j * j).exp();
        }
        let cdf = (2.0 * std::f64::consts::PI).sqrt() / lambda * s;
        (1.0 - cdf).clamp(0.0, 1.0)
    } else {
        let mut s = 0.0;
        for k in 1..=100 {
            let kf = k as f64;
            let term = (-2.0 * kf * kf * lambda * lambda).exp();
            s += if k % 2 == 1 { term } else { -term };
            if term < 1e-18 {
                break;
            }
        }
        (2.0 * s).clamp(0.0, 1.0)
    }
}

/// Asymptotic p-value of a KS distance `d` with effective size `n`, using
/// Stephens' small-sample correction `λ = (√n + 0.12 + 0.11/√n)·d`.
pub fn ks_p_value(d: f64, n: f64) -> f64 {
    let sn = n.sqrt();
    kolmogorov_survival((sn + 0.12 + 0.11 / sn) * d)
}

/// One-sample KS test of `sample` against a continuous CDF.
pub fn ks_one_sample<F: Fn(f64) -> f64>(sample: &[f64], cdf: F) -> Result<TestReport> {
    if sample.is_empty() {
        return Err(Error::domain("empty sample"));
    }
    let mut xs = sample.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n);
    }
    Ok(TestReport {
        statistic: d,
        p_value: ks_p_value(d, n),
    })
}

/// Two-sample KS test.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<TestReport> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::domain("empty sample"));
    }
    let mut xa = a.to_vec();
    let mut xb = b.to_vec();
    xa.sort_by(f64::total_cmp);
    xb.sort_by(f64::total_cmp);
    let (na, nb) = (xa.len() as f64, xb.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < xa.len() && j < xb.len() {
        let x = xa[i].min(xb[j]);
        while i < xa.len() && xa[i] <= x {
            i += 1;
        }
        while j < xb.len() && xb[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(TestReport {
        statistic: d,
        p_value: ks_p_value(d, na * nb / (na + nb)),
    })
}

/// Pearson chi-square test of observed counts against expected counts.
pub fn chi_square_test(
    observed: &[f64],
    expected: &[f64],
    constraints: usize,
) -> Result<TestReport> {
    if observed.len() != expected.len() || observed.len() <= constraints {
        return Err(Error::domain(
            "chi-square needs more cells than constraints",
        ));
    }
    if expected.iter().any(|e| !(*e > 0.0)) {
        return Err(Error::domain("expected counts must be positive"));
    }
    let stat: f64 = observed
        .iter()
        .zip(expected)
        .map(|(o, e)| (o - e) * (o - e) / e)
        .sum();
    let df = (observed.len() - constraints) as f64;
    Ok(TestReport {
        statistic: stat,
        p_value: gamma_survival(df / 2.0, stat / 2.0)?,
    })
}

/// Regularized incomplete beta `I_x(a, b)`.
pub fn regularized_beta(a: f64, b: f64, x: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::domain(format!(
            "beta parameters must be positive, got ({a}, {b})"
        )));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::domain(format!("x must lie in [0,1], got {x}")));
    }
    if x == 0.0 || x == 1.0 {
        return Ok(x);
    }
    let ln_front =
        log_gamma(a + b)? - log_gamma(a)? - log_gamma(b)? + a * x.ln() + b * (-x).ln_1p();
    if x < (a + 1.0) / (a + b + 2.0) {
        Ok(ln_front.exp() * beta_cf(a, b, x)? / a)
    } else {
        Ok(1.0 - ln_front.exp() * beta_cf(b, a, 1.0 - x)? / b)
    }
}

/// Lentz evaluation of the incomplete beta continued fraction.
fn beta_cf(a: f64, b: f64, x: f64) -> Result<f64> {
    const TINY: f64 = 1e-300;
    let (qab, qap, qam) = (a + b, a + 1.0, a - 1.0);
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=10_000 {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < 1e-15 {
            return Ok(h);
        }
    }
    Err(Error::numeric(
        "incomplete beta continued fraction did not converge",
        h,
    ))
}

/// Sample mean and its standard error `s/√n` (zero for a single value).
pub fn mean_and_std_error(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kolmogorov_known_points() {
        // P(K > 1.3581) ≈ 0.05 and P(K > 1.6276) ≈ 0.01.
        assert!((kolmogorov_survival(1.358_099_9) - 0.05).abs() < 1e-6);
        assert!((kolmogorov_survival(1.627_624_3) - 0.01).abs() < 1e-6);
        // Both series agree at the switch point.
        let lo = kolmogorov_survival(1.18 - 1e-12);
        let hi = kolmogorov_survival(1.18);
        assert!((lo - hi).abs() < 1e-12);
        assert_eq!(kolmogorov_survival(0.0), 1.0);
    }

    #[test]
    fn beta_cdf_values() {
        let v = regularized_beta(0.9, 2.1, 0.3).unwrap();
        assert!((v - 0.568_415_950_950_953_9).abs() < 1e-13);
        let u = regularized_beta(1.0, 1.0, 0.37).unwrap();
        assert!((u - 0.37).abs() < 1e-14);
        let s = regularized_beta(2.0, 3.0, 0.9).unwrap() + regularized_beta(3.0, 2.0, 0.1).unwrap();
        assert!((s - 1.0).abs() < 1e-14);
        assert!(regularized_beta(0.0, 1.0, 0.5).is_err());
    }

    #[test]
    fn ks_uniform_grid() {
        let xs: Vec<f64> = (0..100).map(|i| (i as f64 + 0.5) / 100.0).collect();
        let r = ks_one_sample(&xs, |x| x).unwrap();
        assert!((r.statistic - 0.005).abs() < 1e-12);
        assert!(r.p_value > 0.99);
        let t = ks_two_sample(&xs, &xs).unwrap();
        assert_eq!(t.statistic, 0.0);
        let shifted: Vec<f64> = xs.iter().map(|x| x + 0.5).collect();
        assert!(ks_two_sample(&xs, &shifted).unwrap().p_value < 1e-6);
    }

    #[test]
    fn chi_square_and_mean() {
        let r = chi_square_test(&[10.0, 10.0], &[10.0, 10.0], 1).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert!((r.p_value - 1.0).abs() < 1e-15);
        let (m, se) = mean_and_std_error(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((se - (5.0f64 / 12.0).sqrt() / 1.0).abs() < 1e-15);
    }
}
