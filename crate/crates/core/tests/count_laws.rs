mod common;

use common::counts::{moments, nbp_threshold_counts, poisson_arrival_pvalue};
use nbp_measures::points::{sample_nbp_points, NbpConfig, TruncationPolicy};
use nbp_measures::tail::LevyTail;

#[test]
fn arrivals_are_poisson() {
    let p = poisson_arrival_pvalue(5000, 5.0, 2024);
    assert!(p > 0.001, "p = {p}");
}

#[test]
fn nbp_counts_are_mixed_poisson() {
    for &(r, t) in &[(1.0, 2.0), (4.0, 2.0), (10.0, 1.5), (2.5, 2.0)] {
        let counts = nbp_threshold_counts(r, t, 20_000, 77);
        let ((mean, mean_se), (var, var_se)) = moments(&counts);
        let want_mean = r * (t - 1.0);
        let want_var = r * (t - 1.0) * t;
        assert!(
            (mean - want_mean).abs() <= 4.0 * mean_se,
            "r={r} t={t} mean {mean} vs {want_mean}"
        );
        assert!(
            (var - want_var).abs() <= 4.0 * var_se,
            "r={r} t={t} var {var} vs {want_var}"
        );
    }
}

#[test]
fn nbp_points_lie_below_support_bound() {
    for tail in [
        LevyTail::gamma(3.0).unwrap(),
        LevyTail::generalized_gamma(0.9).unwrap(),
        LevyTail::stable(0.5).unwrap(),
    ] {
        let bound = tail.support_bound().unwrap().ln();
        for seed in 0..20 {
            let cfg = NbpConfig {
                r: 3.0,
                tail,
                truncation: TruncationPolicy::fixed(100),
            };
            let seq = sample_nbp_points(&cfg, seed).unwrap();
            assert!(seq.log_points.iter().all(|&u| u < bound));
            assert!(seq.log_points.windows(2).all(|w| w[1] < w[0]));
        }
    }
}
