//! Lévy tail functions `L(x) = ν((x, ∞))` and their inverses.
//!
//! Three kinds are supported:
//!
//! | kind                | `L(x)`                              |
//! |---------------------|-------------------------------------|
//! | `stable`            | `x^{−α}`                            |
//! | `gamma`             | `θ E₁(x)`                           |
//! | `generalized_gamma` | `α/Γ(1−α) · Γ(−α, x)`               |
//!
//! Each is a strictly decreasing bijection of `(0, ∞)`. Inversion works on
//! `u = ln x` so that the tiny jumps produced by large arguments do not
//! underflow before normalization.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::roots::{solve_decreasing, Expansion};
use crate::special::{ln_e1_unchecked, ln_upper_gamma, log_gamma, Precision, EULER_GAMMA};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TailKind {
    Stable { alpha: f64 },
    Gamma { theta: f64 },
    GeneralizedGamma { alpha: f64 },
}

/// A Lévy tail together with the precision used to invert it.
///
/// Serializes as `{"kind": "gamma", "theta": 3.0}` and so on; the precision
/// is not part of the wire format.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TailKind", into = "TailKind")]
pub struct LevyTail {
    kind: TailKind,
    prec: Precision,
    ln_coef: f64,
}

impl TryFrom<TailKind> for LevyTail {
    type Error = Error;

    fn try_from(kind: TailKind) -> Result<Self> {
        LevyTail::new(kind)
    }
}

impl From<LevyTail> for TailKind {
    fn from(t: LevyTail) -> Self {
        t.kind
    }
}

impl LevyTail {
    pub fn new(kind: TailKind) -> Result<Self> {
        let ln_coef = match kind {
            TailKind::Stable { alpha } => {
                check_alpha(alpha)?;
                alpha.ln()
            }
            TailKind::Gamma { theta } => {
                if !(theta > 0.0 && theta.is_finite()) {
                    return Err(Error::domain(format!(
                        "theta must be positive, got {theta}"
                    )));
                }
                theta.ln()
            }
            TailKind::GeneralizedGamma { alpha } => {
                check_alpha(alpha)?;
                alpha.ln() - log_gamma(1.0 - alpha)?
            }
        };
        Ok(LevyTail {
            kind,
            prec: Precision::default(),
            ln_coef,
        })
    }

    pub fn stable(alpha: f64) -> Result<Self> {
        Self::new(TailKind::Stable { alpha })
    }

    pub fn gamma(theta: f64) -> Result<Self> {
        Self::new(TailKind::Gamma { theta })
    }

    pub fn generalized_gamma(alpha: f64) -> Result<Self> {
        Self::new(TailKind::GeneralizedGamma { alpha })
    }

    pub fn with_precision(mut self, prec: Precision) -> Self {
        self.prec = prec;
        self
    }

    pub fn kind(&self) -> TailKind {
        self.kind
    }

    pub fn precision(&self) -> Precision {
        self.prec
    }

    pub fn label(&self) -> &'static str {
        match self.kind {
            TailKind::Stable { .. } => "stable",
            TailKind::Gamma { .. } => "gamma",
            TailKind::GeneralizedGamma { .. } => "generalized_gamma",
        }
    }

    /// `L(x)`.
    pub fn value(&self, x: f64) -> Result<f64> {
        Ok(self.ln_value(x)?.exp())
    }

    /// `ln L(x)`.
    pub fn ln_value(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) || x.is_nan() {
            return Err(Error::domain(format!(
                "tail argument must be positive, got {x}"
            )));
        }
        self.ln_value_at(x.ln())
    }

    fn ln_value_at(&self, u: f64) -> Result<f64> {
        let x = u.exp();
        match self.kind {
            TailKind::Stable { alpha } => Ok(-alpha * u),
            TailKind::Gamma { .. } => {
                if x == 0.0 {
                    // E₁(x) = −γ − ln x + O(x)
                    return Ok(self.ln_coef + (-EULER_GAMMA - u).ln());
                }
                Ok(self.ln_coef + ln_e1_unchecked(x)?)
            }
            TailKind::GeneralizedGamma { alpha } => {
                if x == 0.0 {
                    // Γ(−α,x) = x^{−α}/α − Γ(1−α) + O(x^{1−α})
                    return Ok(self.ln_coef - alpha * u - alpha.ln());
                }
                Ok(self.ln_coef + ln_upper_gamma(-alpha, x, self.prec.max_iter)?)
            }
        }
    }

    /// `ln(x · |L'(x)|)` at `x = e^u`: the slope of `L` in `u`.
    fn ln_slope_at(&self, u: f64) -> f64 {
        let x = u.exp();
        match self.kind {
            TailKind::Stable { alpha } => alpha.ln() - alpha * u,
            TailKind::Gamma { .. } => self.ln_coef - x,
            TailKind::GeneralizedGamma { alpha } => self.ln_coef - alpha * u - x,
        }
    }

    /// `L⁻¹(y)`.
    pub fn inverse(&self, y: f64) -> Result<f64> {
        Ok(self.ln_inverse(y)?.exp())
    }

    /// `ln L⁻¹(y)`, computed without forming `L⁻¹(y)` itself.
    pub fn ln_inverse(&self, y: f64) -> Result<f64> {
        check_level(y)?;
        match self.kind {
            TailKind::Stable { alpha } => Ok(-y.ln() / alpha),
            _ => self.ln_inverse_numeric_unchecked(y),
        }
    }

    /// Numeric inversion, also for the stable kind (used to cross-check the
    /// closed form).
    pub fn ln_inverse_numeric(&self, y: f64) -> Result<f64> {
        check_level(y)?;
        self.ln_inverse_numeric_unchecked(y)
    }

    fn ln_inverse_numeric_unchecked(&self, y: f64) -> Result<f64> {
        let ln_y = y.ln();
        let start = self.seed(y);
        let tol = self.prec.rel_tol;
        let objective = |u: f64| -> Result<(f64, f64)> {
            let lv = self.ln_value_at(u)?;
            let slope = -(self.ln_slope_at(u) - lv).exp();
            let v = lv - ln_y;
            if v.is_nan() {
                return Err(Error::numeric("tail objective is NaN", u));
            }
            Ok((v, slope))
        };
        solve_decreasing(
            objective,
            start,
            Expansion::log_factor_four(),
            |v| v.exp_m1().abs() <= tol,
            self.prec.max_iter,
        )
    }

    /// Starting point for inversion from the small-`x` asymptote of each kind.
    fn seed(&self, y: f64) -> f64 {
        match self.kind {
            TailKind::Stable { alpha } => -y.ln() / alpha,
            TailKind::Gamma { theta } => {
                let z = y / theta;
                if z > 0.5 {
                    -z - EULER_GAMMA
                } else {
                    // L(x) ≈ θ e⁻ˣ / x for large x
                    (-z.ln()).max(0.1).ln()
                }
            }
            TailKind::GeneralizedGamma { alpha } => {
                // L(x) ≈ x^{−α}/Γ(1−α) near zero.
                let ln_gamma_1ma = alpha.ln() - self.ln_coef;
                -(y.ln() + ln_gamma_1ma) / alpha
            }
        }
    }

    /// `L⁻¹(1)`, the upper end of the support of the negative binomial process.
    pub fn support_bound(&self) -> Result<f64> {
        self.inverse(1.0)
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "alpha must lie in (0,1), got {alpha}"
        )))
    }
}

fn check_level(y: f64) -> Result<()> {
    if y > 0.0 && y.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "tail level must be positive and finite, got {y}"
        )))
    }
}

/// Free-function form of [`LevyTail::value`].
pub fn tail_value(tail: &LevyTail, x: f64) -> Result<f64> {
    tail.value(x)
}

/// Free-function form of [`LevyTail::inverse`].
pub fn tail_inverse(tail: &LevyTail, y: f64) -> Result<f64> {
    tail.inverse(y)
}

/// Free-function form of [`LevyTail::support_bound`].
pub fn tail_support_bound(tail: &LevyTail) -> Result<f64> {
    tail.support_bound()
}
