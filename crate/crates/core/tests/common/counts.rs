//! Count statistics of the arrival and negative binomial samplers.

use nbp_measures::points::{gamma_arrivals, sample_nbp_points, NbpConfig, TruncationPolicy};
use nbp_measures::rng::replication_seed;
use nbp_measures::stats::{chi_square_test, mean_and_std_error};
use nbp_measures::tail::LevyTail;

/// Chi-square p-value of the number of arrivals in `[0, t]` against
/// Poisson(t), over `reps` independent streams.
pub fn poisson_arrival_pvalue(reps: usize, t: f64, seed: u64) -> f64 {
    let cells = 16;
    let mut observed = vec![0.0; cells];
    for i in 0..reps {
        let s = gamma_arrivals(replication_seed(seed, i as u64), 80).unwrap();
        let k = s.arrivals().iter().take_while(|&&g| g <= t).count();
        observed[k.min(cells - 1)] += 1.0;
    }
    let mut expected = Vec::with_capacity(cells);
    let mut pmf = (-t).exp();
    let mut below = 0.0;
    for k in 0..cells - 1 {
        expected.push(pmf * reps as f64);
        below += pmf;
        pmf *= t / (k + 1) as f64;
    }
    expected.push((1.0 - below) * reps as f64);
    chi_square_test(&observed, &expected, 1).unwrap().p_value
}

/// Number of NBP(r) levels `Γᵢ/Γ_r` at or below `t`, one count per replication.
pub fn nbp_threshold_counts(r: f64, t: f64, reps: usize, seed: u64) -> Vec<f64> {
    let tail = LevyTail::stable(0.5).unwrap();
    (0..reps)
        .map(|i| {
            let cfg = NbpConfig {
                r,
                tail,
                truncation: TruncationPolicy::fixed(r.floor() as usize + 400),
            };
            let seq = sample_nbp_points(&cfg, replication_seed(seed, i as u64)).unwrap();
            let k = seq.levels.iter().take_while(|&&y| y <= t).count();
            assert!(k < seq.levels.len(), "truncation too small");
            k as f64
        })
        .collect()
}

/// `((mean, se), (variance, se))` of a sample.
pub fn moments(x: &[f64]) -> ((f64, f64), (f64, f64)) {
    let n = x.len() as f64;
    let (mean, mean_se) = mean_and_std_error(x);
    let m2 = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let m4 = x.iter().map(|v| (v - mean).powi(4)).sum::<f64>() / n;
    let var_se = ((m4 - m2 * m2) / n).sqrt();
    ((mean, mean_se), (m2, var_se))
}
