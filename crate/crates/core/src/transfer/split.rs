use crate::error::{FqnmError, Result};
use crate::flux::ScalarFlux;

/// Samples used when validating a split on its working interval.
const VALIDATION_SAMPLES: usize = 1001;

/// Lax-Friedrichs flux splitting `f = f+ + f-` with `f±(u) = (f(u) ± alpha u) / 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxSplit {
    flux: ScalarFlux,
    alpha: f64,
}

impl FluxSplit {
    #[inline]
    pub fn flux(&self) -> ScalarFlux {
        self.flux
    }

    #[inline]
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    #[inline]
    pub fn plus(&self, u: f64) -> f64 {
        0.5 * (self.flux.eval(u) + self.alpha * u)
    }

    #[inline]
    pub fn minus(&self, u: f64) -> f64 {
        0.5 * (self.flux.eval(u) - self.alpha * u)
    }

    /// The classical split numerical flux `F(uL, uR) = f+(uL) + f-(uR)`.
    #[inline]
    pub fn numerical_flux(&self, ul: f64, ur: f64) -> f64 {
        self.plus(ul) + self.minus(ur)
    }

    /// Checks by sampling that `f+` is nondecreasing, `f-` nonincreasing and
    /// `f+ + f- = f` on `[lo, hi]`.
    pub fn validate(&self, lo: f64, hi: f64) -> Result<()> {
        let mut prev: Option<(f64, f64)> = None;
        for u in sample(lo, hi) {
            let (p, m) = (self.plus(u), self.minus(u));
            let f = self.flux.eval(u);
            if (p + m - f).abs() > 1e-12 * (1.0 + f.abs()) {
                return Err(FqnmError::InvalidSplit(format!(
                    "f+ + f- differs from f at u = {u}"
                )));
            }
            if let Some((pp, pm)) = prev {
                let tol = 1e-12 * (1.0 + p.abs().max(m.abs()));
                if p < pp - tol {
                    return Err(FqnmError::InvalidSplit(format!("f+ decreases near u = {u}")));
                }
                if m > pm + tol {
                    return Err(FqnmError::InvalidSplit(format!("f- increases near u = {u}")));
                }
            }
            prev = Some((p, m));
        }
        Ok(())
    }
}

/// Builds the Lax-Friedrichs split, rejecting `alpha` below the largest
/// sampled wave speed on the working interval `[lo, hi]`.
pub fn lax_friedrichs_split(flux: ScalarFlux, alpha: f64, lo: f64, hi: f64) -> Result<FluxSplit> {
    if !(alpha.is_finite() && alpha >= 0.0) {
        return Err(FqnmError::InvalidSplit(format!("alpha must be nonnegative, got {alpha}")));
    }
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
        return Err(FqnmError::InvalidSplit(format!("bad working interval [{lo}, {hi}]")));
    }
    for u in sample(lo, hi) {
        let s = flux.speed(u).abs();
        if s > alpha * (1.0 + 1e-12) {
            return Err(FqnmError::InvalidSplit(format!(
                "alpha = {alpha} is below |f'({u})| = {s}"
            )));
        }
    }
    let split = FluxSplit { flux, alpha };
    split.validate(lo, hi)?;
    Ok(split)
}

/// Wave-speed bound for data in `[lo, hi]`: `max |f'|`, inflated by
/// `inflation` (0.1 gives the 10 % margin used for Burgers runs).
pub fn alpha_for_range(flux: ScalarFlux, lo: f64, hi: f64, inflation: f64) -> f64 {
    flux.max_speed(lo, hi) * (1.0 + inflation)
}

fn sample(lo: f64, hi: f64) -> impl Iterator<Item = f64> {
    let n = VALIDATION_SAMPLES;
    (0..n).map(move |k| {
        if k + 1 == n {
            hi
        } else {
            lo + (hi - lo) * k as f64 / (n - 1) as f64
        }
    })
}
