//! Random discrete probability measures `Σ pᵢ δ_{ζᵢ}`.
//!
//! Weights come from the point samplers in [`crate::points`] (or from
//! stick-breaking), atoms are i.i.d. draws from a [`BaseMeasure`] read from a
//! separate random stream, so the weight vector depends only on the arrivals.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{BufRead, Write};
use std::sync::Arc;

use rand::distr::weighted::WeightedIndex;
use rand::{Rng, RngCore};
use rand_distr::{Beta, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::points::{
    sample_mixed_prm_points, sample_nbp_points, Arrivals, NbpConfig, PointSequence,
    TruncationPolicy, TruncationStatus,
};
use crate::rng::{stream_rng, Stream, GENERATOR_ID};
use crate::special::{gamma_quantile_upper, Precision};
use crate::tail::LevyTail;

pub const SCHEMA_VERSION: u32 = 1;

/// Largest tolerated `|Σ w − 1|`.
pub const NORMALIZATION_TOL: f64 = 1e-12;

type Sampler = Arc<dyn Fn(&mut dyn RngCore) -> f64 + Send + Sync>;
type Cdf = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A diffuse distribution on the real line from which atoms are drawn.
#[derive(Clone)]
pub struct BaseMeasure {
    label: String,
    sampler: Sampler,
    cdf: Option<Cdf>,
}

impl fmt::Debug for BaseMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BaseMeasure")
            .field("label", &self.label)
            .field("has_cdf", &self.cdf.is_some())
            .finish()
    }
}

impl BaseMeasure {
    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::domain(format!(
                "invalid uniform bounds [{lo}, {hi}]"
            )));
        }
        let width = hi - lo;
        Ok(BaseMeasure {
            label: format!("uniform[{lo},{hi}]"),
            sampler: Arc::new(move |rng: &mut dyn RngCore| lo + width * rng.random::<f64>()),
            cdf: Some(Arc::new(move |x: f64| ((x - lo) / width).clamp(0.0, 1.0))),
        })
    }

    /// Uniform on `[0, 1]`, the default base measure.
    pub fn standard_uniform() -> Self {
        Self::uniform(0.0, 1.0).expect("valid bounds")
    }

    pub fn exponential(rate: f64) -> Result<Self> {
        if !(rate > 0.0 && rate.is_finite()) {
            return Err(Error::domain(format!("rate must be positive, got {rate}")));
        }
        Ok(BaseMeasure {
            label: format!("exponential({rate})"),
            sampler: Arc::new(move |rng: &mut dyn RngCore| {
                -(1.0 - rng.random::<f64>()).ln() / rate
            }),
            cdf: Some(Arc::new(
                move |x: f64| {
                    if x <= 0.0 {
                        0.0
                    } else {
                        -(-rate * x).exp_m1()
                    }
                },
            )),
        })
    }

    /// A user-supplied distribution. The CDF is optional, but the Kolmogorov
    /// distance needs it.
    pub fn custom<S, C>(label: impl Into<String>, sampler: S, cdf: Option<C>) -> Self
    where
        S: Fn(&mut dyn RngCore) -> f64 + Send + Sync + 'static,
        C: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        BaseMeasure {
            label: label.into(),
            sampler: Arc::new(sampler),
            cdf: cdf.map(|c| Arc::new(c) as Cdf),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn has_cdf(&self) -> bool {
        self.cdf.is_some()
    }

    pub fn sample(&self, rng: &mut dyn RngCore) -> f64 {
        (self.sampler)(rng)
    }

    pub fn cdf(&self, x: f64) -> Result<f64> {
        match &self.cdf {
            Some(c) => Ok(c(x)),
            None => Err(Error::Capability(format!(
                "base measure `{}` has no cdf",
                self.label
            ))),
        }
    }
}

/// Where a measure came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub kind: String,
    pub params: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<TruncationPolicy>,
    pub seed: u64,
    pub generator_id: String,
    pub base: String,
    pub status: TruncationStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail: Option<LevyTail>,
    /// Points whose normalized weight underflowed to zero and were dropped.
    #[serde(default)]
    pub underflow_dropped: usize,
}

impl Provenance {
    fn new(kind: &str, seed: u64, base: &BaseMeasure) -> Self {
        Provenance {
            kind: kind.to_string(),
            params: BTreeMap::new(),
            truncation: None,
            seed,
            generator_id: GENERATOR_ID.to_string(),
            base: base.label().to_string(),
            status: TruncationStatus::Complete,
            tail: None,
            underflow_dropped: 0,
        }
    }

    fn param(mut self, name: &str, value: f64) -> Self {
        self.params.insert(name.to_string(), value);
        self
    }

    fn tail(mut self, t: &LevyTail) -> Self {
        self.tail = Some(*t);
        self
    }

    fn truncation(mut self, t: TruncationPolicy) -> Self {
        self.truncation = Some(t);
        self
    }
}

/// A finite discrete probability measure with positive weights summing to 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MeasureDocument", into = "MeasureDocument")]
pub struct DiscreteMeasure {
    atoms: Vec<f64>,
    weights: Vec<f64>,
    sorted_by_weight: bool,
    provenance: Provenance,
}

/// Serialized form of [`DiscreteMeasure`].
#[derive(Debug, Clone, Serialize, Deserialize)]
struct MeasureDocument {
    schema_version: u32,
    atoms: Vec<f64>,
    weights: Vec<f64>,
    sorted_by_weight: bool,
    provenance: Provenance,
}

impl TryFrom<MeasureDocument> for DiscreteMeasure {
    type Error = Error;

    fn try_from(doc: MeasureDocument) -> Result<Self> {
        if doc.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "unsupported schema_version {}",
                doc.schema_version
            )));
        }
        DiscreteMeasure::new(doc.atoms, doc.weights, doc.sorted_by_weight, doc.provenance)
    }
}

impl From<DiscreteMeasure> for MeasureDocument {
    fn from(m: DiscreteMeasure) -> Self {
        MeasureDocument {
            schema_version: SCHEMA_VERSION,
            atoms: m.atoms,
            weights: m.weights,
            sorted_by_weight: m.sorted_by_weight,
            provenance: m.provenance,
        }
    }
}

/// Header line of the CSV form.
#[derive(Debug, Serialize, Deserialize)]
struct CsvHeader {
    schema_version: u32,
    sorted_by_weight: bool,
    provenance: Provenance,
}

/// Compensated (Neumaier) sum.
pub fn stable_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

impl DiscreteMeasure {
    /// Validates and builds a measure.
    pub fn new(
        atoms: Vec<f64>,
        weights: Vec<f64>,
        sorted_by_weight: bool,
        provenance: Provenance,
    ) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::domain("measure has no atoms"));
        }
        if atoms.len() != weights.len() {
            return Err(Error::domain(format!(
                "{} atoms but {} weights",
                atoms.len(),
                weights.len()
            )));
        }
        if let Some(w) = weights.iter().find(|w| !(**w > 0.0 && w.is_finite())) {
            return Err(Error::domain(format!(
                "weights must be positive, found {w}"
            )));
        }
        if let Some(a) = atoms.iter().find(|a| !a.is_finite()) {
            return Err(Error::domain(format!("atoms must be finite, found {a}")));
        }
        let total = stable_sum(weights.iter().copied());
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::domain(format!("weights sum to {total}, not 1")));
        }
        if sorted_by_weight && weights.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::domain(
                "weights flagged sorted but not strictly decreasing",
            ));
        }
        Ok(DiscreteMeasure {
            atoms,
            weights,
            sorted_by_weight,
            provenance,
        })
    }

    pub fn atoms(&self) -> &[f64] {
        &self.atoms
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn sorted_by_weight(&self) -> bool {
        self.sorted_by_weight
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn weight_sum(&self) -> f64 {
        stable_sum(self.weights.iter().copied())
    }

    /// `P((−∞, x])`.
    pub fn mass_at_or_below(&self, x: f64) -> f64 {
        stable_sum(
            self.atoms
                .iter()
                .zip(&self.weights)
                .filter(|(a, _)| **a <= x)
                .map(|(_, w)| *w),
        )
    }

    /// Weights in decreasing order.
    pub fn ranked_weights(&self) -> Vec<f64> {
        let mut w = self.weights.clone();
        if !self.sorted_by_weight {
            w.sort_by(|a, b| b.total_cmp(a));
        }
        w
    }

    pub fn largest_weight(&self) -> f64 {
        self.weights.iter().copied().fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// CSV with a `# {json header}` first line followed by `atom,weight` rows.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let header = CsvHeader {
            schema_version: SCHEMA_VERSION,
            sorted_by_weight: self.sorted_by_weight,
            provenance: self.provenance.clone(),
        };
        writeln!(out, "# {}", serde_json::to_string(&header)?)?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["atom", "weight"])?;
        for (a, p) in self.atoms.iter().zip(&self.weights) {
            w.write_record([format!("{a:e}"), format!("{p:e}")])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: BufRead>(mut input: R) -> Result<Self> {
        let mut first = String::new();
        input.read_line(&mut first)?;
        let json = first
            .trim_end()
            .strip_prefix("# ")
            .ok_or_else(|| Error::Config("missing `# {header}` line".into()))?;
        let header: CsvHeader = serde_json::from_str(json)?;
        if header.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "unsupported schema_version {}",
                header.schema_version
            )));
        }
        let mut reader = csv::Reader::from_reader(input);
        let mut atoms = Vec::new();
        let mut weights = Vec::new();
        for row in reader.deserialize::<(f64, f64)>() {
            let (a, w) = row?;
            atoms.push(a);
            weights.push(w);
        }
        Self::new(atoms, weights, header.sorted_by_weight, header.provenance)
    }
}

/// Normalizes log-weights with a log-sum-exp reduction.
///
/// Returns the weights in input order; entries that underflow are reported
/// as `None`.
fn normalize_log_weights(log_w: &[f64]) -> Vec<Option<f64>> {
    let max = log_w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let scaled = stable_sum(log_w.iter().map(|u| (u - max).exp()));
    let lse = max + scaled.ln();
    log_w
        .iter()
        .map(|u| {
            let w = (u - lse).exp();
            // Subnormal weights lose precision and can tie, so they count as underflow.
            (w >= f64::MIN_POSITIVE).then_some(w)
        })
        .collect()
}

/// Pairs normalized weights with atoms drawn from the atom stream.
fn assemble(
    log_w: &[f64],
    base: &BaseMeasure,
    seed: u64,
    sorted_by_weight: bool,
    mut provenance: Provenance,
) -> Result<DiscreteMeasure> {
    if log_w.len() < 2 {
        return Err(Error::DegenerateTruncation {
            retained: log_w.len(),
        });
    }
    let mut rng = stream_rng(seed, Stream::Atoms);
    let mut atoms = Vec::with_capacity(log_w.len());
    let mut weights = Vec::with_capacity(log_w.len());
    let mut dropped = 0;
    for w in normalize_log_weights(log_w) {
        let atom = base.sample(&mut rng);
        match w {
            Some(w) => {
                atoms.push(atom);
                weights.push(w);
            }
            None => dropped += 1,
        }
    }
    let total = stable_sum(weights.iter().copied());
    for w in &mut weights {
        *w /= total;
    }
    provenance.underflow_dropped = dropped;
    DiscreteMeasure::new(atoms, weights, sorted_by_weight, provenance)
}

fn from_points(
    seq: &PointSequence,
    base: &BaseMeasure,
    seed: u64,
    provenance: Provenance,
) -> Result<DiscreteMeasure> {
    let mut provenance = provenance;
    provenance.status = seq.status;
    assemble(&seq.log_points, base, seed, true, provenance)
}

/// PKP^(r)(H; L): normalized NBP(r, L) points on i.i.d. atoms from `base`.
pub fn sample_pkp(
    r: f64,
    tail: &LevyTail,
    base: &BaseMeasure,
    trunc: &TruncationPolicy,
    seed: u64,
) -> Result<DiscreteMeasure> {
    let cfg = NbpConfig {
        r,
        tail: *tail,
        truncation: *trunc,
    };
    let seq = sample_nbp_points(&cfg, seed)?;
    let prov = Provenance::new("pkp", seed, base)
        .param("r", r)
        .tail(tail)
        .truncation(*trunc);
    from_points(&seq, base, seed, prov)
}

/// Dirichlet process DP(θ, H): `sample_pkp` with `r = 0` and the gamma tail.
pub fn sample_dp(
    theta: f64,
    base: &BaseMeasure,
    trunc: &TruncationPolicy,
    seed: u64,
) -> Result<DiscreteMeasure> {
    let tail = LevyTail::gamma(theta)?;
    let mut m = sample_pkp(0.0, &tail, base, trunc, seed)?;
    m.provenance.kind = "dirichlet".into();
    m.provenance.params.insert("theta".into(), theta);
    Ok(m)
}

/// Normalized α-stable process: `sample_pkp` with `r = 0` and the stable tail.
pub fn sample_stable_normalized(
    alpha: f64,
    base: &BaseMeasure,
    trunc: &TruncationPolicy,
    seed: u64,
) -> Result<DiscreteMeasure> {
    let tail = LevyTail::stable(alpha)?;
    let mut m = sample_pkp(0.0, &tail, base, trunc, seed)?;
    m.provenance.kind = "stable".into();
    m.provenance.params.insert("alpha".into(), alpha);
    Ok(m)
}

/// Parameters of the two-parameter Poisson–Dirichlet process (θ > 0 only).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PdpParams {
    pub alpha: f64,
    pub theta: f64,
    /// Shape of the Gamma mixing variable; θ/α unless overridden.
    pub r_derived: f64,
}

impl PdpParams {
    pub fn new(alpha: f64, theta: f64) -> Result<Self> {
        Self::with_r(alpha, theta, theta / alpha)
    }

    /// Uses a given `r` instead of θ/α, e.g. a rounded grid value. The law is then that of PD(α, rα).
    pub fn with_r(alpha: f64, theta: f64, r: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::domain(format!(
                "alpha must lie in (0,1), got {alpha}"
            )));
        }
        if !(theta > 0.0 && theta.is_finite()) {
            return Err(Error::domain(format!(
                "theta must be positive for the series representation, got {theta}"
            )));
        }
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::domain(format!("r must be positive, got {r}")));
        }
        Ok(PdpParams {
            alpha,
            theta,
            r_derived: r,
        })
    }
}

/// PDP(H; α, θ) through the Gamma(r, 1)-mixed PRM with the generalized gamma
/// tail, `r = θ/α`. Weights are strictly decreasing.
pub fn sample_pdp_series(
    params: &PdpParams,
    base: &BaseMeasure,
    trunc: &TruncationPolicy,
    seed: u64,
) -> Result<DiscreteMeasure> {
    let p = PdpParams::with_r(params.alpha, params.theta, params.r_derived)?;
    let tail = LevyTail::generalized_gamma(p.alpha)?;
    let seq = sample_mixed_prm_points(&tail, p.r_derived, trunc, seed)?;
    let prov = Provenance::new("pdp_series", seed, base)
        .param("alpha", p.alpha)
        .param("theta", p.theta)
        .param("r", p.r_derived)
        .tail(&tail)
        .truncation(*trunc);
    from_points(&seq, base, seed, prov)
}

/// GEM(α, θ) stick-breaking weights truncated after `sticks` breaks.
///
/// The leftover mass `∏(1 − βₖ)` goes to one extra atom so the measure is
/// exactly normalized. With `ranked` the weights are sorted decreasingly,
/// giving a truncated PD(α, θ) vector.
pub fn sample_pdp_stick_breaking(
    alpha: f64,
    theta: f64,
    base: &BaseMeasure,
    sticks: usize,
    ranked: bool,
    seed: u64,
) -> Result<DiscreteMeasure> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::domain(format!(
            "alpha must lie in [0,1), got {alpha}"
        )));
    }
    if !(theta > -alpha) || !theta.is_finite() {
        return Err(Error::domain(format!(
            "theta must exceed -alpha, got {theta}"
        )));
    }
    if sticks == 0 {
        return Err(Error::domain("at least one stick is required"));
    }
    let weights = stick_weights(alpha, theta, sticks, seed)?;
    let mut rng = stream_rng(seed, Stream::Atoms);
    let mut pairs: Vec<(f64, f64)> = weights
        .into_iter()
        .map(|w| (base.sample(&mut rng), w))
        .filter(|(_, w)| *w > 0.0)
        .collect();
    if ranked {
        pairs.sort_by(|a, b| b.1.total_cmp(&a.1));
    }
    let total = stable_sum(pairs.iter().map(|p| p.1));
    let (atoms, weights): (Vec<f64>, Vec<f64>) =
        pairs.into_iter().map(|(a, w)| (a, w / total)).unzip();
    let strictly = ranked && weights.windows(2).all(|w| w[1] < w[0]);
    let prov = Provenance::new("pdp_stick", seed, base)
        .param("alpha", alpha)
        .param("theta", theta)
        .param("sticks", sticks as f64)
        .param("ranked", if ranked { 1.0 } else { 0.0 });
    DiscreteMeasure::new(atoms, weights, strictly, prov)
}

/// Raw GEM weights `p'₁ … p'_sticks` followed by the residual mass.
pub fn stick_weights(alpha: f64, theta: f64, sticks: usize, seed: u64) -> Result<Vec<f64>> {
    let mut rng = stream_rng(seed, Stream::Sticks);
    let mut remaining = 1.0;
    let mut out = Vec::with_capacity(sticks + 1);
    for k in 1..=sticks {
        let b = Beta::new(1.0 - alpha, theta + k as f64 * alpha)
            .map_err(|e| Error::domain(format!("invalid stick distribution: {e}")))?;
        let beta: f64 = b.sample(&mut rng);
        out.push(beta * remaining);
        remaining *= 1.0 - beta;
    }
    out.push(remaining);
    Ok(out)
}

/// Parameters of the finite approximation to the extended Dirichlet process.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtendedDpParams {
    /// Total mass θ of the gamma tail.
    pub concentration: f64,
    pub r: usize,
    /// Last series index; must exceed `r + 1`.
    pub n: usize,
}

impl ExtendedDpParams {
    pub fn new(concentration: f64, r: usize, n: usize) -> Result<Self> {
        if !(concentration > 0.0 && concentration.is_finite()) {
            return Err(Error::domain(format!(
                "concentration must be positive, got {concentration}"
            )));
        }
        if n <= r + 1 {
            return Err(Error::domain(format!(
                "n = {n} must exceed r + 1 = {}",
                r + 1
            )));
        }
        Ok(ExtendedDpParams {
            concentration,
            r,
            n,
        })
    }
}

/// Unnormalized log-weights `ln G_n⁻¹(Γᵢ/(Γ_r Γ_{n+1}))`, `i = r+1..=n`,
/// where `G_n` is the Gamma(θ/n, 1) survival function and `Γ₀ = 1`.
pub fn extended_dp_log_weights(params: &ExtendedDpParams, seed: u64) -> Result<Vec<f64>> {
    let p = ExtendedDpParams::new(params.concentration, params.r, params.n)?;
    let arrivals: Vec<f64> = Arrivals::new(seed).take(p.n + 1).collect();
    let gamma_r = if p.r == 0 { 1.0 } else { arrivals[p.r - 1] };
    let scale = gamma_r * arrivals[p.n];
    let shape = p.concentration / p.n as f64;
    let prec = Precision::default();
    arrivals[p.r..p.n]
        .iter()
        .map(|&g| {
            let y = g / scale;
            if !(y > 0.0 && y < 1.0) {
                return Err(Error::domain(format!(
                    "quantile level {y} outside (0,1) (Γ_r = {gamma_r})"
                )));
            }
            gamma_quantile_upper(shape, y, prec)
        })
        .collect()
}

/// Finite approximation `P_{n,r,H}` of the extended Dirichlet process.
pub fn sample_extended_dp_finite(
    params: &ExtendedDpParams,
    base: &BaseMeasure,
    seed: u64,
) -> Result<DiscreteMeasure> {
    let log_w = extended_dp_log_weights(params, seed)?;
    let prov = Provenance::new("extended_dp", seed, base)
        .param("theta", params.concentration)
        .param("r", params.r as f64)
        .param("n", params.n as f64);
    assemble(&log_w, base, seed, true, prov)
}

/// `k` i.i.d. draws from `m`.
pub fn draw_from_measure(m: &DiscreteMeasure, k: usize, seed: u64) -> Result<Vec<f64>> {
    if k == 0 {
        return Err(Error::domain("number of draws must be positive"));
    }
    let index = WeightedIndex::new(m.weights())
        .map_err(|e| Error::domain(format!("invalid measure weights: {e}")))?;
    let mut rng = stream_rng(seed, Stream::Draws);
    Ok((0..k).map(|_| m.atoms()[index.sample(&mut rng)]).collect())
}

/// Number of distinct values among `draws`.
pub fn distinct_count(draws: &[f64]) -> Result<usize> {
    if draws.is_empty() {
        return Err(Error::domain(
            "cannot count distinct values of an empty sample",
        ));
    }
    let mut v = draws.to_vec();
    v.sort_by(f64::total_cmp);
    v.dedup_by(|a, b| a.to_bits() == b.to_bits());
    Ok(v.len())
}
