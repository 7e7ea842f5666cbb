//! Safeguarded Newton iteration for monotone decreasing scalar functions.

use crate::error::{Error, Result};

/// How the initial bracket grows away from the starting guess.
#[derive(Debug, Clone, Copy)]
pub struct Expansion {
    /// First additive step (in the solver's variable).
    pub step: f64,
    /// Multiplier applied to the step after every failed expansion.
    pub growth: f64,
    /// Maximum number of expansions on either side.
    pub max_steps: usize,
}

impl Expansion {
    /// Constant additive steps of `ln 4`: multiplying `x` by 4 when solving
    /// in `u = ln x`.
    pub fn log_factor_four() -> Self {
        Expansion {
            step: 4f64.ln(),
            growth: 1.0,
            max_steps: 2000,
        }
    }

    pub fn doubling(step: f64) -> Self {
        Expansion {
            step,
            growth: 2.0,
            max_steps: 200,
        }
    }
}

/// Finds the root of a strictly decreasing `f`.
///
/// `f` returns `(value, derivative)`. The root is first bracketed by
/// expanding from `start`, then refined with Newton steps that fall back to
/// bisection whenever the step leaves the bracket. Iteration stops once
/// `done(value)` holds or the bracket collapses to machine precision.
pub fn solve_decreasing<F, D>(
    f: F,
    start: f64,
    expansion: Expansion,
    done: D,
    max_iter: usize,
) -> Result<f64>
where
    F: Fn(f64) -> Result<(f64, f64)>,
    D: Fn(f64) -> bool,
{
    let (f0, d0) = f(start)?;
    if !f0.is_finite() {
        return Err(Error::numeric("objective not finite at start", start));
    }
    if done(f0) {
        return Ok(start);
    }

    // Bracket [lo, hi] with f(lo) > 0 > f(hi).
    let (mut lo, mut hi);
    let (mut u, mut fu, mut du) = (start, f0, d0);
    let mut step = expansion.step;
    if f0 > 0.0 {
        lo = start;
        let mut probe = start;
        let mut steps = 0;
        loop {
            probe += step;
            step *= expansion.growth;
            let (fp, dp) = f(probe)?;
            if done(fp) {
                return Ok(probe);
            }
            if fp < 0.0 {
                hi = probe;
                if fp.abs() < fu.abs() {
                    u = probe;
                    fu = fp;
                    du = dp;
                }
                break;
            }
            lo = probe;
            u = probe;
            fu = fp;
            du = dp;
            steps += 1;
            if steps >= expansion.max_steps {
                return Err(Error::numeric("failed to bracket root", probe));
            }
        }
    } else {
        hi = start;
        let mut probe = start;
        let mut steps = 0;
        loop {
            probe -= step;
            step *= expansion.growth;
            let (fp, dp) = f(probe)?;
            if done(fp) {
                return Ok(probe);
            }
            if fp > 0.0 {
                lo = probe;
                if fp.abs() < fu.abs() {
                    u = probe;
                    fu = fp;
                    du = dp;
                }
                break;
            }
            hi = probe;
            u = probe;
            fu = fp;
            du = dp;
            steps += 1;
            if steps >= expansion.max_steps {
                return Err(Error::numeric("failed to bracket root", probe));
            }
        }
    }

    for _ in 0..max_iter {
        let mut next = if du.is_finite() && du < 0.0 {
            u - fu / du
        } else {
            f64::NAN
        };
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        let (fn_, dn) = f(next)?;
        if done(fn_) {
            return Ok(next);
        }
        if fn_ > 0.0 {
            lo = next;
        } else {
            hi = next;
        }
        u = next;
        fu = fn_;
        du = dn;
        let width = hi - lo;
        if width <= 4.0 * f64::EPSILON * u.abs().max(1.0) {
            return Ok(u);
        }
    }
    Err(Error::numeric("root iteration limit reached", u))
}
