//! Poisson arrivals, Poisson random measure points and negative binomial
//! process points.
//!
//! Every sampler here works on the level sequence `y₁ < y₂ < …` fed to
//! `L⁻¹`; the points themselves are returned as natural logs so that deep
//! tails keep their relative sizes.
//!
//! * PRM(L): `yᵢ = Γᵢ`.
//! * NBP(r, L), integer `r ≥ 1`: `yᵢ = Γ_{r+i}/Γ_r`, all above 1, so every
//!   point lies below `L⁻¹(1)`.
//! * NBP(r, L), real `r`: `G ~ Gamma(r, 1)` and a fresh stream `Γ'ⱼ`, with
//!   `yⱼ = 1 + Γ'ⱼ/G`. Given `Γ_r = G` the increments `Γ_{r+j} − Γ_r` are a
//!   fresh arrival stream, so this has exactly the law of the integer case.
//! * Gamma-mixed PRM (`PRM(G·L)` with `G ~ Gamma(s, 1)`, unrestricted):
//!   `yⱼ = Γ'ⱼ/G`. For integer `s` the mixing variable is `Γ_s` of the same
//!   arrival stream.

use std::io::Write;

use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Gamma};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{stream_rng, Stream, GENERATOR_ID};
use crate::tail::LevyTail;

/// Upper bound on the number of points any sampler may materialize.
pub const MAX_POINTS: usize = 1 << 26;

pub const DEFAULT_HARD_CAP: usize = 1_000_000;

/// Increasing partial sums of i.i.d. unit exponentials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArrivalStream {
    arrivals: Vec<f64>,
    seed: u64,
    generator_id: String,
}

impl ArrivalStream {
    pub fn arrivals(&self) -> &[f64] {
        &self.arrivals
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn generator_id(&self) -> &str {
        &self.generator_id
    }

    pub fn len(&self) -> usize {
        self.arrivals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arrivals.is_empty()
    }

    /// The exponential increments `Eᵢ = Γᵢ − Γᵢ₋₁`.
    pub fn increments(&self) -> Vec<f64> {
        let mut prev = 0.0;
        self.arrivals
            .iter()
            .map(|&g| {
                let e = g - prev;
                prev = g;
                e
            })
            .collect()
    }
}

/// Lazily generated arrival times from the arrivals stream of a seed.
pub(crate) struct Arrivals {
    rng: ChaCha8Rng,
    total: f64,
}

impl Arrivals {
    pub(crate) fn new(seed: u64) -> Self {
        Arrivals {
            rng: stream_rng(seed, Stream::Arrivals),
            total: 0.0,
        }
    }

    /// Draws a positive unit exponential (a zero draw is redrawn so that the
    /// stream stays strictly increasing).
    fn increment(&mut self) -> f64 {
        loop {
            let e: f64 = Exp1.sample(&mut self.rng);
            if e > 0.0 {
                return e;
            }
        }
    }
}

impl Iterator for Arrivals {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        self.total += self.increment();
        Some(self.total)
    }
}

/// First `count` arrival times of the stream keyed by `seed`.
pub fn gamma_arrivals(seed: u64, count: usize) -> Result<ArrivalStream> {
    if count == 0 {
        return Err(Error::domain("arrival count must be at least 1"));
    }
    if count > MAX_POINTS {
        return Err(Error::Resource(format!(
            "requested {count} arrivals, limit is {MAX_POINTS}"
        )));
    }
    Ok(ArrivalStream {
        arrivals: Arrivals::new(seed).take(count).collect(),
        seed,
        generator_id: GENERATOR_ID.to_string(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum TruncationMode {
    /// Keep series indices up to `n` (indices `⌊r⌋+1 ..= n`).
    FixedCount { n: usize },
    /// Stop at the first index whose weight, relative to the running sum of
    /// the retained weights, falls below `epsilon`. That index is kept.
    EpsilonRule { epsilon: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationPolicy {
    #[serde(flatten)]
    pub mode: TruncationMode,
    #[serde(default = "default_hard_cap")]
    pub hard_cap: usize,
}

fn default_hard_cap() -> usize {
    DEFAULT_HARD_CAP
}

impl TruncationPolicy {
    pub fn fixed(n: usize) -> Self {
        TruncationPolicy {
            mode: TruncationMode::FixedCount { n },
            hard_cap: DEFAULT_HARD_CAP.max(n),
        }
    }

    pub fn epsilon(epsilon: f64) -> Self {
        TruncationPolicy {
            mode: TruncationMode::EpsilonRule { epsilon },
            hard_cap: DEFAULT_HARD_CAP,
        }
    }

    pub fn with_hard_cap(mut self, hard_cap: usize) -> Self {
        self.hard_cap = hard_cap;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.hard_cap == 0 {
            return Err(Error::domain("hard_cap must be positive"));
        }
        if self.hard_cap > MAX_POINTS {
            return Err(Error::Resource(format!(
                "hard_cap {} exceeds limit {MAX_POINTS}",
                self.hard_cap
            )));
        }
        match self.mode {
            TruncationMode::FixedCount { n } if n == 0 => {
                Err(Error::domain("fixed truncation count must be positive"))
            }
            TruncationMode::EpsilonRule { epsilon } if !(epsilon > 0.0 && epsilon < 1.0) => Err(
                Error::domain(format!("epsilon must lie in (0,1), got {epsilon}")),
            ),
            _ => Ok(()),
        }
    }

    /// Number of points to draw under a fixed count, given the index offset.
    fn fixed_points(&self, offset: usize) -> Option<usize> {
        match self.mode {
            TruncationMode::FixedCount { n } => Some(n.saturating_sub(offset)),
            TruncationMode::EpsilonRule { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TruncationStatus {
    Complete,
    /// The hard cap stopped the series before the truncation rule did.
    CapReached,
}

/// A finite, strictly decreasing run of points, stored as natural logs.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSequence {
    pub log_points: Vec<f64>,
    /// The level `yᵢ` each point was obtained from (`point = L⁻¹(yᵢ)`).
    pub levels: Vec<f64>,
    pub status: TruncationStatus,
}

impl PointSequence {
    pub fn points(&self) -> Vec<f64> {
        self.log_points.iter().map(|u| u.exp()).collect()
    }

    pub fn len(&self) -> usize {
        self.log_points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_points.is_empty()
    }

    /// Writes `index,value` rows (1-based index) for diagnostics.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["index", "value"])?;
        for (i, u) in self.log_points.iter().enumerate() {
            w.write_record([(i + 1).to_string(), format!("{:e}", u.exp())])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// `L⁻¹(Γᵢ)` for every arrival in `stream`, i.e. the points of a PRM(L).
pub fn sample_prm_points(tail: &LevyTail, stream: &ArrivalStream) -> Result<Vec<f64>> {
    let mut prev = 0.0;
    for &g in stream.arrivals() {
        if !(g > prev) {
            return Err(Error::domain(
                "arrival stream must be positive and strictly increasing",
            ));
        }
        prev = g;
    }
    stream.arrivals().iter().map(|&g| tail.inverse(g)).collect()
}

/// Configuration of a negative binomial process sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NbpConfig {
    /// `r = 0` gives the plain PRM.
    pub r: f64,
    pub tail: LevyTail,
    pub truncation: TruncationPolicy,
}

/// Whether levels are shifted by one (negative binomial process on
/// `(0, L⁻¹(1))`) or not (Gamma-mixed PRM on `(0, ∞)`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Intensity {
    Restricted,
    Unrestricted,
}

/// Level generator `y_j = offset + Γ'_j / G`.
pub(crate) struct Levels {
    arrivals: Arrivals,
    mixing: f64,
    offset: f64,
    /// Set for the integer path so that levels equal `Γ_{r+j}/Γ_r` exactly.
    integer_base: Option<f64>,
}

impl Levels {
    pub(crate) fn new(seed: u64, shape: f64, intensity: Intensity) -> Result<Self> {
        if !(shape >= 0.0) || !shape.is_finite() {
            return Err(Error::domain(format!(
                "r must be a nonnegative real, got {shape}"
            )));
        }
        let mut arrivals = Arrivals::new(seed);
        if shape == 0.0 {
            // Γ₀ = 1: the levels are the arrivals themselves.
            return Ok(Levels {
                arrivals,
                mixing: 1.0,
                offset: 0.0,
                integer_base: None,
            });
        }
        let offset = match intensity {
            Intensity::Restricted => 1.0,
            Intensity::Unrestricted => 0.0,
        };
        if shape.fract() == 0.0 && shape <= MAX_POINTS as f64 {
            let mut g = 0.0;
            for _ in 0..shape as usize {
                g = arrivals.next().expect("arrivals never end");
            }
            return Ok(match intensity {
                Intensity::Restricted => Levels {
                    arrivals,
                    mixing: g,
                    offset: 0.0,
                    integer_base: Some(g),
                },
                // Restart partial sums at zero: Γ'_j = Γ_{r+j} − Γ_r.
                Intensity::Unrestricted => Levels {
                    arrivals: Arrivals {
                        rng: arrivals.rng,
                        total: 0.0,
                    },
                    mixing: g,
                    offset,
                    integer_base: None,
                },
            });
        }
        let mut mix_rng = stream_rng(seed, Stream::Mixing);
        let dist = Gamma::new(shape, 1.0)
            .map_err(|e| Error::domain(format!("invalid gamma shape {shape}: {e}")))?;
        let mut g: f64 = dist.sample(&mut mix_rng);
        while !(g > 0.0) {
            g = dist.sample(&mut mix_rng);
        }
        Ok(Levels {
            arrivals,
            mixing: g,
            offset,
            integer_base: None,
        })
    }
}

impl Iterator for Levels {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        let g = self.arrivals.next()?;
        Some(match self.integer_base {
            Some(base) => g / base,
            None => self.offset + g / self.mixing,
        })
    }
}

/// Applies `L⁻¹` to successive levels until the truncation policy stops.
pub(crate) fn truncate_points(
    tail: &LevyTail,
    levels: impl Iterator<Item = f64>,
    truncation: &TruncationPolicy,
    offset: usize,
) -> Result<PointSequence> {
    truncation.validate()?;
    let mut log_points = Vec::new();
    let mut level_values = Vec::new();
    let mut status = TruncationStatus::Complete;
    match truncation.fixed_points(offset) {
        Some(count) => {
            let take = count.min(truncation.hard_cap);
            if take < count {
                status = TruncationStatus::CapReached;
            }
            log_points.reserve(take);
            for y in levels.take(take) {
                log_points.push(tail.ln_inverse(y)?);
                level_values.push(y);
            }
        }
        None => {
            let ln_eps = match truncation.mode {
                TruncationMode::EpsilonRule { epsilon } => epsilon.ln(),
                TruncationMode::FixedCount { .. } => unreachable!(),
            };
            let mut ln_sum = f64::NEG_INFINITY;
            let mut fired = false;
            for y in levels.take(truncation.hard_cap) {
                let u = tail.ln_inverse(y)?;
                ln_sum = log_add_exp(ln_sum, u);
                log_points.push(u);
                level_values.push(y);
                if u - ln_sum < ln_eps {
                    fired = true;
                    break;
                }
            }
            if !fired {
                status = TruncationStatus::CapReached;
            }
        }
    }
    Ok(PointSequence {
        log_points,
        levels: level_values,
        status,
    })
}

pub(crate) fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// Points of NBP(r, L): `L⁻¹(Γᵢ/Γ_r)` for `i > r`, truncated.
///
/// Real non-integer `r` uses the Gamma(r, 1) mixing representation described
/// in the module docs; `r = 0` is the PRM with `Γ₀ = 1`.
pub fn sample_nbp_points(cfg: &NbpConfig, seed: u64) -> Result<PointSequence> {
    if !(cfg.r >= 0.0) || !cfg.r.is_finite() {
        return Err(Error::domain(format!(
            "r must be nonnegative, got {}",
            cfg.r
        )));
    }
    let levels = Levels::new(seed, cfg.r, Intensity::Restricted)?;
    truncate_points(&cfg.tail, levels, &cfg.truncation, cfg.r.floor() as usize)
}

/// Points of the Gamma(`shape`, 1)-mixed PRM(G·L) on `(0, ∞)`.
///
/// For `shape = θ/α` and the generalized gamma tail this is the series whose
/// normalized points follow PD(α, θ).
pub fn sample_mixed_prm_points(
    tail: &LevyTail,
    shape: f64,
    truncation: &TruncationPolicy,
    seed: u64,
) -> Result<PointSequence> {
    let levels = Levels::new(seed, shape, Intensity::Unrestricted)?;
    truncate_points(tail, levels, truncation, shape.floor() as usize)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arrivals_increase() {
        let s = gamma_arrivals(1, 1000).unwrap();
        assert!(s.arrivals()[0] > 0.0);
        assert!(s.arrivals().windows(2).all(|w| w[1] > w[0]));
        assert_eq!(s.generator_id(), "chacha8");
        assert!(s.increments().iter().all(|&e| e > 0.0));
        assert!(gamma_arrivals(1, 0).is_err());
        assert!(matches!(
            gamma_arrivals(1, MAX_POINTS + 1),
            Err(Error::Resource(_))
        ));
    }

    #[test]
    fn stable_prm_closed_form() {
        let s = gamma_arrivals(3, 50).unwrap();
        let tail = LevyTail::stable(0.5).unwrap();
        let pts = sample_prm_points(&tail, &s).unwrap();
        for (p, g) in pts.iter().zip(s.arrivals()) {
            assert!(((p - g.powi(-2)) / p).abs() < 1e-13);
        }
    }

    #[test]
    fn nbp_r0_matches_prm() {
        let tail = LevyTail::gamma(3.0).unwrap();
        let cfg = NbpConfig {
            r: 0.0,
            tail,
            truncation: TruncationPolicy::fixed(40),
        };
        let nbp = sample_nbp_points(&cfg, 11).unwrap();
        let prm = sample_prm_points(&tail, &gamma_arrivals(11, 40).unwrap()).unwrap();
        assert_eq!(nbp.points(), prm);
    }

    #[test]
    fn integer_levels_are_ratios() {
        let s = gamma_arrivals(5, 30).unwrap();
        let g = s.arrivals();
        let levels: Vec<f64> = Levels::new(5, 4.0, Intensity::Restricted)
            .unwrap()
            .take(10)
            .collect();
        for (j, y) in levels.iter().enumerate() {
            assert_eq!(*y, g[4 + j] / g[3]);
        }
        let shifted: Vec<f64> = Levels::new(5, 4.0, Intensity::Unrestricted)
            .unwrap()
            .take(10)
            .collect();
        for (a, b) in levels.iter().zip(&shifted) {
            assert!((a - 1.0 - b).abs() < 1e-12);
        }
    }

    #[test]
    fn nbp_points_below_support() {
        for tail in [
            LevyTail::gamma(3.0).unwrap(),
            LevyTail::stable(0.5).unwrap(),
            LevyTail::generalized_gamma(0.5).unwrap(),
        ] {
            let bound = tail.support_bound().unwrap();
            for r in [5.0, 2.5] {
                let cfg = NbpConfig {
                    r,
                    tail,
                    truncation: TruncationPolicy::fixed(30),
                };
                let p = sample_nbp_points(&cfg, 9).unwrap().points();
                assert!(p[0] < bound);
                assert!(p.windows(2).all(|w| w[1] < w[0]));
            }
        }
    }

    #[test]
    fn fixed_count_uses_series_index() {
        let tail = LevyTail::stable(0.5).unwrap();
        let cfg = NbpConfig {
            r: 10.0,
            tail,
            truncation: TruncationPolicy::fixed(400),
        };
        assert_eq!(sample_nbp_points(&cfg, 1).unwrap().len(), 390);
    }

    #[test]
    fn epsilon_rule_stops() {
        let tail = LevyTail::gamma(3.0).unwrap();
        let cfg = NbpConfig {
            r: 0.0,
            tail,
            truncation: TruncationPolicy::epsilon(1e-6),
        };
        let seq = sample_nbp_points(&cfg, 2).unwrap();
        assert_eq!(seq.status, TruncationStatus::Complete);
        let pts = seq.points();
        let total: f64 = pts.iter().sum();
        let last = *pts.last().unwrap();
        assert!(last / total < 1e-6);
        // every earlier prefix was still above the threshold
        let mut running = 0.0;
        for &p in &pts[..pts.len() - 1] {
            running += p;
            assert!(p / running >= 1e-6);
        }
    }

    #[test]
    fn cap_sets_warning_status() {
        let tail = LevyTail::stable(0.9).unwrap();
        let cfg = NbpConfig {
            r: 0.0,
            tail,
            truncation: TruncationPolicy::epsilon(1e-9).with_hard_cap(100),
        };
        let seq = sample_nbp_points(&cfg, 2).unwrap();
        assert_eq!(seq.len(), 100);
        assert_eq!(seq.status, TruncationStatus::CapReached);
    }

    #[test]
    fn negative_r_rejected() {
        let cfg = NbpConfig {
            r: -1.0,
            tail: LevyTail::gamma(1.0).unwrap(),
            truncation: TruncationPolicy::fixed(10),
        };
        assert!(matches!(sample_nbp_points(&cfg, 0), Err(Error::Domain(_))));
    }

    #[test]
    fn csv_export() {
        let cfg = NbpConfig {
            r: 0.0,
            tail: LevyTail::stable(0.5).unwrap(),
            truncation: TruncationPolicy::fixed(3),
        };
        let seq = sample_nbp_points(&cfg, 4).unwrap();
        let mut buf = Vec::new();
        seq.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("index,value\n1,"));
        assert_eq!(text.lines().count(), 4);
    }
}
