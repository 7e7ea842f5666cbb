//! Monte Carlo experiments on random measures.
//!
//! Every replication gets its own seed from
//! [`replication_seed`](crate::rng::replication_seed), results are collected
//! in replication order and reduced sequentially, so the numbers do not
//! depend on the worker count.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{
    distinct_count, draw_from_measure, sample_dp, sample_extended_dp_finite, sample_pdp_series,
    sample_pdp_stick_breaking, sample_pkp, sample_stable_normalized, BaseMeasure, DiscreteMeasure,
    ExtendedDpParams, PdpParams,
};
use crate::points::{TruncationMode, TruncationPolicy};
use crate::rng::{replication_seed, splitmix64};
use crate::stats::{ks_two_sample, mean_and_std_error, TestReport};
use crate::tail::LevyTail;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProcessKind {
    Dirichlet,
    ExtendedDp,
    Pkp,
    PdpSeries,
    PdpStick,
    Stable,
}

impl ProcessKind {
    pub fn name(&self) -> &'static str {
        match self {
            ProcessKind::Dirichlet => "dirichlet",
            ProcessKind::ExtendedDp => "extended_dp",
            ProcessKind::Pkp => "pkp",
            ProcessKind::PdpSeries => "pdp_series",
            ProcessKind::PdpStick => "pdp_stick",
            ProcessKind::Stable => "stable",
        }
    }
}

impl std::str::FromStr for ProcessKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "dirichlet" | "dp" => ProcessKind::Dirichlet,
            "extended_dp" => ProcessKind::ExtendedDp,
            "pkp" => ProcessKind::Pkp,
            "pdp_series" => ProcessKind::PdpSeries,
            "pdp_stick" => ProcessKind::PdpStick,
            "stable" => ProcessKind::Stable,
            other => return Err(Error::Config(format!("unknown process `{other}`"))),
        })
    }
}

/// Parameters of a process; which ones are needed depends on the kind.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ProcessParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail: Option<LevyTail>,
}

fn need(value: Option<f64>, name: &str, kind: ProcessKind) -> Result<f64> {
    value.ok_or_else(|| Error::Config(format!("process {} needs `{name}`", kind.name())))
}

fn fixed_count(trunc: &TruncationPolicy, kind: ProcessKind) -> Result<usize> {
    match trunc.mode {
        TruncationMode::FixedCount { n } => Ok(n),
        TruncationMode::EpsilonRule { .. } => Err(Error::Config(format!(
            "process {} needs a fixed_count truncation",
            kind.name()
        ))),
    }
}

/// Builds one realization of the process described by `kind` and `params`.
pub fn build_measure(
    kind: ProcessKind,
    params: &ProcessParams,
    trunc: &TruncationPolicy,
    base: &BaseMeasure,
    seed: u64,
) -> Result<DiscreteMeasure> {
    match kind {
        ProcessKind::Dirichlet => sample_dp(need(params.theta, "theta", kind)?, base, trunc, seed),
        ProcessKind::ExtendedDp => {
            let r = params.r.unwrap_or(0.0);
            if r < 0.0 || r.fract() != 0.0 {
                return Err(Error::domain(format!(
                    "extended_dp needs an integer r, got {r}"
                )));
            }
            let p = ExtendedDpParams::new(
                need(params.theta, "theta", kind)?,
                r as usize,
                fixed_count(trunc, kind)?,
            )?;
            sample_extended_dp_finite(&p, base, seed)
        }
        ProcessKind::Pkp => {
            let tail = params
                .tail
                .ok_or_else(|| Error::Config("process pkp needs `tail`".into()))?;
            sample_pkp(params.r.unwrap_or(0.0), &tail, base, trunc, seed)
        }
        ProcessKind::PdpSeries => {
            let alpha = need(params.alpha, "alpha", kind)?;
            let theta = need(params.theta, "theta", kind)?;
            let p = match params.r {
                Some(r) => PdpParams::with_r(alpha, theta, r)?,
                None => PdpParams::new(alpha, theta)?,
            };
            sample_pdp_series(&p, base, trunc, seed)
        }
        ProcessKind::PdpStick => sample_pdp_stick_breaking(
            need(params.alpha, "alpha", kind)?,
            need(params.theta, "theta", kind)?,
            base,
            fixed_count(trunc, kind)?,
            true,
            seed,
        ),
        ProcessKind::Stable => {
            sample_stable_normalized(need(params.alpha, "alpha", kind)?, base, trunc, seed)
        }
    }
}

/// `sup_x |F_m(x) − H(x)|` for a discrete `m` against a continuous base CDF.
///
/// The supremum of a step function against a continuous CDF is attained at
/// an atom, on one side or the other of the jump.
pub fn kolmogorov_distance(m: &DiscreteMeasure, base: &BaseMeasure) -> Result<f64> {
    if !base.has_cdf() {
        return Err(Error::Capability(format!(
            "base measure `{}` has no cdf",
            base.label()
        )));
    }
    let mut pairs: Vec<(f64, f64)> = m
        .atoms()
        .iter()
        .copied()
        .zip(m.weights().iter().copied())
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut below = 0.0;
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < pairs.len() {
        let x = pairs[i].0;
        let mut upto = below;
        while i < pairs.len() && pairs[i].0 == x {
            upto += pairs[i].1;
            i += 1;
        }
        let h = base.cdf(x)?;
        d = d.max((upto.min(1.0) - h).abs()).max((below - h).abs());
        below = upto;
    }
    Ok(d)
}

fn default_parallelism() -> usize {
    1
}

/// One Monte Carlo experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub process: ProcessKind,
    #[serde(default)]
    pub params: ProcessParams,
    pub replications: usize,
    pub truncation: TruncationPolicy,
    pub master_seed: u64,
    /// Worker count hint. Not serialized: it never changes the result.
    #[serde(default = "default_parallelism", skip_serializing)]
    pub parallelism: usize,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(Error::domain("replications must be at least 1"));
        }
        self.truncation.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub mean_distance: f64,
    pub std_error: f64,
    pub replications: usize,
    /// Replications that returned an error and were left out of the mean.
    pub failures: usize,
    pub flagged: bool,
    /// Elapsed seconds; left out of serialized output to keep it reproducible.
    #[serde(skip)]
    pub wall_time: f64,
    pub spec_echo: ExperimentSpec,
}

/// Runs `f(0..count)` on a pool of `jobs` workers, keeping index order.
pub fn par_map<T, F>(jobs: usize, count: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Resource(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(|| (0..count).into_par_iter().map(&f).collect()))
}

/// Mean Kolmogorov distance between independent realizations and `base`.
pub fn run_ks_experiment(spec: &ExperimentSpec, base: &BaseMeasure) -> Result<ExperimentResult> {
    spec.validate()?;
    if !base.has_cdf() {
        return Err(Error::Capability(format!(
            "base measure `{}` has no cdf",
            base.label()
        )));
    }
    let start = Instant::now();
    let outcomes = par_map(spec.parallelism, spec.replications, |i| {
        let seed = replication_seed(spec.master_seed, i as u64);
        build_measure(spec.process, &spec.params, &spec.truncation, base, seed)
            .and_then(|m| kolmogorov_distance(&m, base))
    })?;
    let mut distances = Vec::with_capacity(outcomes.len());
    let mut first_error = None;
    for o in outcomes {
        match o {
            Ok(d) => distances.push(d),
            Err(e) => {
                first_error.get_or_insert(e);
            }
        }
    }
    if distances.is_empty() {
        return Err(first_error.expect("at least one replication"));
    }
    let failures = spec.replications - distances.len();
    let (mean, se) = mean_and_std_error(&distances);
    Ok(ExperimentResult {
        mean_distance: mean,
        std_error: se,
        replications: spec.replications,
        failures,
        flagged: failures > 0,
        wall_time: start.elapsed().as_secs_f64(),
        spec_echo: spec.clone(),
    })
}

/// One row of a Kolmogorov-distance grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridRow {
    pub alpha: f64,
    pub theta: f64,
    pub r: f64,
    /// Published value to compare against, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<f64>,
}

/// A grid of Kolmogorov-distance experiments sharing process and truncation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KsGrid {
    pub process: ProcessKind,
    pub replications: usize,
    pub truncation: TruncationPolicy,
    pub rows: Vec<GridRow>,
}

/// The bundled nine-row grid (PDP series, 500 replications, 400 points).
pub const BUNDLED_GRID_JSON: &str = include_str!("../configs/ks_grid.json");

impl KsGrid {
    pub fn bundled() -> Self {
        serde_json::from_str(BUNDLED_GRID_JSON).expect("bundled grid parses")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let grid: KsGrid = serde_json::from_str(text)?;
        if grid.rows.is_empty() {
            return Err(Error::Config("grid has no rows".into()));
        }
        Ok(grid)
    }

    /// The experiment for row `index`; its master seed is derived from
    /// `master_seed` and the row index.
    pub fn row_spec(&self, index: usize, master_seed: u64, jobs: usize) -> ExperimentSpec {
        let row = self.rows[index];
        ExperimentSpec {
            process: self.process,
            params: ProcessParams {
                alpha: Some(row.alpha),
                theta: Some(row.theta),
                r: Some(row.r),
                tail: None,
            },
            replications: self.replications,
            truncation: self.truncation,
            master_seed: splitmix64(master_seed ^ splitmix64(!(index as u64))),
            parallelism: jobs,
        }
    }

    pub fn run(
        &self,
        master_seed: u64,
        jobs: usize,
        base: &BaseMeasure,
    ) -> Result<Vec<GridResult>> {
        (0..self.rows.len())
            .map(|i| {
                let result = run_ks_experiment(&self.row_spec(i, master_seed, jobs), base)?;
                Ok(GridResult {
                    row: self.rows[i],
                    result,
                })
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridResult {
    pub row: GridRow,
    pub result: ExperimentResult,
}

/// Mean of the `top_k` largest weights for each `r`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightProfile {
    pub tail: LevyTail,
    pub r_grid: Vec<f64>,
    pub top_k: usize,
    pub replications: usize,
    pub truncation: TruncationPolicy,
    pub seed: u64,
    /// `means[i][k]` is the mean `(k+1)`-th largest weight at `r_grid[i]`.
    pub means: Vec<Vec<f64>>,
}

/// Monte Carlo means of the largest weights of PKP^(r) for each `r`.
pub fn weight_profile(
    tail: &LevyTail,
    r_grid: &[f64],
    top_k: usize,
    replications: usize,
    trunc: &TruncationPolicy,
    seed: u64,
    jobs: usize,
) -> Result<WeightProfile> {
    if top_k == 0 {
        return Err(Error::domain("top_k must be at least 1"));
    }
    if replications == 0 {
        return Err(Error::domain("replications must be at least 1"));
    }
    let base = BaseMeasure::standard_uniform();
    let mut means = Vec::with_capacity(r_grid.len());
    for &r in r_grid {
        let rows = par_map(jobs, replications, |i| -> Result<Vec<f64>> {
            let m = sample_pkp(r, tail, &base, trunc, replication_seed(seed, i as u64))?;
            let mut w = m.ranked_weights();
            w.resize(top_k, 0.0);
            Ok(w)
        })?;
        let mut sums = vec![0.0; top_k];
        for row in rows {
            for (s, w) in sums.iter_mut().zip(row?) {
                *s += w;
            }
        }
        means.push(sums.into_iter().map(|s| s / replications as f64).collect());
    }
    Ok(WeightProfile {
        tail: *tail,
        r_grid: r_grid.to_vec(),
        top_k,
        replications,
        truncation: *trunc,
        seed,
        means,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalizer {
    LogN,
    NPowAlpha,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthDiagnostic {
    pub process: ProcessKind,
    pub params: ProcessParams,
    pub n_grid: Vec<usize>,
    pub kn_means: Vec<f64>,
    pub kn_std_errors: Vec<f64>,
    pub normalizer: Normalizer,
    /// `kn_means / normalizer(n)`.
    pub ratios: Vec<f64>,
}

/// Mean number of distinct values among `n` draws from a fresh realization,
/// for each `n` in `n_grid`.
///
/// Ratios use `ln n` for the Dirichlet and extended processes and `n^α`
/// otherwise.
pub fn clustering_growth(
    kind: ProcessKind,
    params: &ProcessParams,
    trunc: &TruncationPolicy,
    n_grid: &[usize],
    replications: usize,
    seed: u64,
    jobs: usize,
) -> Result<GrowthDiagnostic> {
    if n_grid.is_empty() || n_grid.windows(2).any(|w| w[1] <= w[0]) || n_grid[0] == 0 {
        return Err(Error::domain(
            "n_grid must be positive and strictly increasing",
        ));
    }
    if replications == 0 {
        return Err(Error::domain("replications must be at least 1"));
    }
    let normalizer = match kind {
        ProcessKind::Dirichlet | ProcessKind::ExtendedDp => Normalizer::LogN,
        _ => Normalizer::NPowAlpha,
    };
    let alpha = match normalizer {
        Normalizer::NPowAlpha => need(params.alpha, "alpha", kind)?,
        Normalizer::LogN => 0.0,
    };
    let base = BaseMeasure::standard_uniform();
    let mut kn_means = Vec::new();
    let mut kn_std_errors = Vec::new();
    let mut ratios = Vec::new();
    for (g, &n) in n_grid.iter().enumerate() {
        let grid_seed = splitmix64(seed ^ splitmix64(!(g as u64)));
        let counts = par_map(jobs, replications, |i| -> Result<f64> {
            let s = replication_seed(grid_seed, i as u64);
            let m = build_measure(kind, params, trunc, &base, s)?;
            let draws = draw_from_measure(&m, n, s)?;
            Ok(distinct_count(&draws)? as f64)
        })?
        .into_iter()
        .collect::<Result<Vec<f64>>>()?;
        let (mean, se) = mean_and_std_error(&counts);
        let norm = match normalizer {
            Normalizer::LogN => (n as f64).ln(),
            Normalizer::NPowAlpha => (n as f64).powf(alpha),
        };
        kn_means.push(mean);
        kn_std_errors.push(se);
        ratios.push(mean / norm);
    }
    Ok(GrowthDiagnostic {
        process: kind,
        params: *params,
        n_grid: n_grid.to_vec(),
        kn_means,
        kn_std_errors,
        normalizer,
        ratios,
    })
}

/// Exact `E[K_n] = Σ_{i<n} θ/(θ+i)` under DP(θ).
pub fn dirichlet_expected_clusters(theta: f64, n: usize) -> f64 {
    (0..n).map(|i| theta / (theta + i as f64)).sum()
}

/// Largest weight of each of `spec.replications` realizations.
pub fn largest_weights(spec: &ExperimentSpec) -> Result<Vec<f64>> {
    spec.validate()?;
    let base = BaseMeasure::standard_uniform();
    par_map(spec.parallelism, spec.replications, |i| {
        let seed = replication_seed(spec.master_seed, i as u64);
        build_measure(spec.process, &spec.params, &spec.truncation, &base, seed)
            .map(|m| m.largest_weight())
    })?
    .into_iter()
    .collect()
}

/// Two-sample KS test on the largest weights of two processes.
pub fn largest_weight_test(a: &ExperimentSpec, b: &ExperimentSpec) -> Result<TestReport> {
    for s in [a, b] {
        if s.replications < 100 {
            return Err(Error::domain(format!(
                "need at least 100 replications per side, got {}",
                s.replications
            )));
        }
    }
    ks_two_sample(&largest_weights(a)?, &largest_weights(b)?)
}

/// Compares the largest weight of the PDP series against ranked
/// stick-breaking with `truncation.n` sticks.
pub fn rank_weight_equivalence_test(
    alpha: f64,
    theta: f64,
    replications: usize,
    truncation: &TruncationPolicy,
    seed: u64,
    jobs: usize,
) -> Result<TestReport> {
    let params = ProcessParams {
        alpha: Some(alpha),
        theta: Some(theta),
        ..Default::default()
    };
    let series = ExperimentSpec {
        process: ProcessKind::PdpSeries,
        params,
        replications,
        truncation: *truncation,
        master_seed: seed,
        parallelism: jobs,
    };
    let stick = ExperimentSpec {
        process: ProcessKind::PdpStick,
        master_seed: splitmix64(seed ^ 0x5DEE_CE66_D1CE_4E5B),
        ..series.clone()
    };
    largest_weight_test(&series, &stick)
}
