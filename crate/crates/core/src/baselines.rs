//! Floating-point reference schemes on periodic grids.

use crate::error::{FqnmError, Result};
use crate::flux::ScalarFlux;
use crate::transfer::FluxSplit;

/// Cell averages on a periodic grid; every value must stay finite.
#[derive(Debug, Clone, PartialEq)]
pub struct RealField {
    values: Vec<f64>,
}

impl RealField {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        ensure_finite(&values, 0)?;
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }
}

pub(crate) fn ensure_finite(values: &[f64], step: usize) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(cell) => Err(FqnmError::NonFiniteState { step, cell }),
        None => Ok(()),
    }
}

fn check_cfl(nu: f64) -> Result<()> {
    if nu <= 1.0 {
        Ok(())
    } else {
        Err(FqnmError::CflViolation { nu, limit: 1.0 })
    }
}

/// `u_i -= dt/dx (F_{i+1/2} - F_{i-1/2})` for a periodic two-point flux.
fn flux_difference_update(u: &[f64], lambda: f64, flux: impl Fn(f64, f64) -> f64) -> Vec<f64> {
    let n = u.len();
    let f: Vec<f64> = (0..n).map(|i| flux(u[i], u[(i + 1) % n])).collect();
    (0..n)
        .map(|i| u[i] - lambda * (f[i] - f[(i + n - 1) % n]))
        .collect()
}

/// First-order upwind finite volume with the split flux `f+(uL) + f-(uR)`.
pub fn upwind_fv_step(u: &RealField, split: &FluxSplit, dt: f64, dx: f64) -> Result<RealField> {
    check_cfl(split.alpha() * dt / dx)?;
    let values = flux_difference_update(&u.values, dt / dx, |l, r| split.numerical_flux(l, r));
    ensure_finite(&values, 0)?;
    Ok(RealField { values })
}

/// Reusable buffers for the upwind update; avoids allocation in timing loops.
#[derive(Debug, Clone)]
pub struct UpwindStepper {
    split: FluxSplit,
    lambda: f64,
    flux: Vec<f64>,
}

impl UpwindStepper {
    pub fn new(split: FluxSplit, dt: f64, dx: f64, n: usize) -> Result<Self> {
        check_cfl(split.alpha() * dt / dx)?;
        Ok(Self {
            split,
            lambda: dt / dx,
            flux: vec![0.0; n],
        })
    }

    pub fn step(&mut self, u: &mut [f64]) {
        let n = u.len();
        for i in 0..n {
            let r = if i + 1 == n { 0 } else { i + 1 };
            self.flux[i] = self.split.numerical_flux(u[i], u[r]);
        }
        let mut left = self.flux[n - 1];
        for i in 0..n {
            let right = self.flux[i];
            u[i] -= self.lambda * (right - left);
            left = right;
        }
    }

    /// Operation classes of one step on `n` cells: two split-flux
    /// evaluations per interface, then a scaled difference per cell.
    pub fn op_counts(n: usize) -> crate::transfer::OpCounts {
        let n = n as u64;
        crate::transfer::OpCounts {
            real_flux_evals: 2 * n,
            // f(u), alpha*u and the 1/2 in each split half, lambda per cell
            real_mul: 2 * 3 * n + n,
            // f ± alpha u, f+ + f-, flux difference, update
            real_add: 2 * n + n + 2 * n,
            ..Default::default()
        }
    }
}

/// Classical Lax-Friedrichs flux `(f(uL) + f(uR))/2 - alpha/2 (uR - uL)`.
pub fn lax_friedrichs_step(u: &RealField, flux: ScalarFlux, alpha: f64, dt: f64, dx: f64) -> Result<RealField> {
    check_cfl(alpha * dt / dx)?;
    let values = flux_difference_update(&u.values, dt / dx, |l, r| flux.lax_friedrichs(l, r, alpha));
    ensure_finite(&values, 0)?;
    Ok(RealField { values })
}

const WENO_EPS: f64 = 1e-6;

/// Fifth-order WENO (Jiang-Shu weights) value at the right face of the
/// centre cell, from the five cells `v[0..5]` centred on it, upwind from the left.
#[inline]
fn weno5_face(v0: f64, v1: f64, v2: f64, v3: f64, v4: f64) -> f64 {
    let b0 = 13.0 / 12.0 * (v0 - 2.0 * v1 + v2).powi(2) + 0.25 * (v0 - 4.0 * v1 + 3.0 * v2).powi(2);
    let b1 = 13.0 / 12.0 * (v1 - 2.0 * v2 + v3).powi(2) + 0.25 * (v1 - v3).powi(2);
    let b2 = 13.0 / 12.0 * (v2 - 2.0 * v3 + v4).powi(2) + 0.25 * (3.0 * v2 - 4.0 * v3 + v4).powi(2);
    let a0 = 0.1 / (WENO_EPS + b0).powi(2);
    let a1 = 0.6 / (WENO_EPS + b1).powi(2);
    let a2 = 0.3 / (WENO_EPS + b2).powi(2);
    let p0 = (2.0 * v0 - 7.0 * v1 + 11.0 * v2) / 6.0;
    let p1 = (-v1 + 5.0 * v2 + 2.0 * v3) / 6.0;
    let p2 = (2.0 * v2 + 5.0 * v3 - v4) / 6.0;
    (a0 * p0 + a1 * p1 + a2 * p2) / (a0 + a1 + a2)
}

/// `-(F_{i+1/2} - F_{i-1/2}) / dx` for linear advection with WENO5 faces.
fn weno5_rhs(u: &[f64], a: f64, dx: f64, out: &mut [f64], faces: &mut [f64]) {
    let n = u.len();
    let at = |k: isize| u[k.rem_euclid(n as isize) as usize];
    for i in 0..n {
        let i = i as isize;
        // face i + 1/2, reconstructed from the upwind side
        faces[i as usize] = if a >= 0.0 {
            a * weno5_face(at(i - 2), at(i - 1), at(i), at(i + 1), at(i + 2))
        } else {
            a * weno5_face(at(i + 3), at(i + 2), at(i + 1), at(i), at(i - 1))
        };
    }
    for i in 0..n {
        out[i] = -(faces[i] - faces[(i + n - 1) % n]) / dx;
    }
}

/// One SSP-RK3 step of WENO5 for linear advection `u_t + a u_x = 0`.
pub fn weno5_rk3_step(u: &RealField, a: f64, dt: f64, dx: f64) -> Result<RealField> {
    let mut s = Weno5Rk3::new(a, dt, dx, u.len())?;
    let mut v = u.values.clone();
    s.step(&mut v)?;
    Ok(RealField { values: v })
}

/// Buffers for repeated WENO5 + SSP-RK3 steps.
#[derive(Debug, Clone)]
pub struct Weno5Rk3 {
    a: f64,
    dt: f64,
    dx: f64,
    stage: Vec<f64>,
    rhs: Vec<f64>,
    faces: Vec<f64>,
    steps: usize,
}

impl Weno5Rk3 {
    pub fn new(a: f64, dt: f64, dx: f64, n: usize) -> Result<Self> {
        check_cfl(a.abs() * dt / dx)?;
        if n < 5 {
            return Err(FqnmError::Config(format!("WENO5 needs at least 5 cells, got {n}")));
        }
        Ok(Self {
            a,
            dt,
            dx,
            stage: vec![0.0; n],
            rhs: vec![0.0; n],
            faces: vec![0.0; n],
            steps: 0,
        })
    }

    pub fn step(&mut self, u: &mut [f64]) -> Result<()> {
        let (a, dt, dx) = (self.a, self.dt, self.dx);
        weno5_rhs(u, a, dx, &mut self.rhs, &mut self.faces);
        for i in 0..u.len() {
            self.stage[i] = u[i] + dt * self.rhs[i];
        }
        weno5_rhs(&self.stage, a, dx, &mut self.rhs, &mut self.faces);
        for i in 0..u.len() {
            self.stage[i] = 0.75 * u[i] + 0.25 * (self.stage[i] + dt * self.rhs[i]);
        }
        weno5_rhs(&self.stage, a, dx, &mut self.rhs, &mut self.faces);
        for i in 0..u.len() {
            u[i] = u[i] / 3.0 + 2.0 / 3.0 * (self.stage[i] + dt * self.rhs[i]);
        }
        self.steps += 1;
        ensure_finite(u, self.steps)
    }
}
