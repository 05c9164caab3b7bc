use crate::error::{FqnmError, Result};
use crate::quantise::Resolution;

/// Grid, time step, resolution and wave-speed bound of one scheme instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeParams {
    pub delta: Resolution,
    pub dx: f64,
    pub dt: f64,
    pub alpha: f64,
}

/// Outcome of [`cfl_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CflReport {
    pub nu: f64,
    pub valid: bool,
}

impl SchemeParams {
    pub fn new(delta: Resolution, dx: f64, dt: f64, alpha: f64) -> Result<Self> {
        if !(dx.is_finite() && dx > 0.0) {
            return Err(FqnmError::Config(format!("dx must be positive, got {dx}")));
        }
        if !(dt.is_finite() && dt > 0.0) {
            return Err(FqnmError::Config(format!("dt must be positive, got {dt}")));
        }
        if !(alpha.is_finite() && alpha >= 0.0) {
            return Err(FqnmError::Config(format!("alpha must be nonnegative, got {alpha}")));
        }
        Ok(Self { delta, dx, dt, alpha })
    }

    /// `dt / dx`.
    #[inline]
    pub fn ratio(&self) -> f64 {
        self.dt / self.dx
    }

    #[inline]
    pub fn nu(&self) -> f64 {
        self.alpha * self.dt / self.dx
    }

    /// Errors unless the parameters are in the monotone regime `nu <= 1`.
    pub fn require_monotone(&self) -> Result<()> {
        let r = cfl_check(self);
        if r.valid {
            Ok(())
        } else {
            Err(FqnmError::CflViolation { nu: r.nu, limit: 1.0 })
        }
    }
}

pub fn cfl_check(p: &SchemeParams) -> CflReport {
    let nu = p.nu();
    CflReport { nu, valid: nu <= 1.0 }
}
