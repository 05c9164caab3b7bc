//! Exact and near-exact reference solutions.

use std::f64::consts::PI;

use crate::error::{FqnmError, Result};
use crate::euler::EulerPrimitive;

/// Exact periodic shift `u0((x - a t) mod 1)` on the unit domain.
pub fn exact_advection(u0: impl Fn(f64) -> f64, a: f64, t: f64, x: f64) -> f64 {
    u0((x - a * t).rem_euclid(1.0))
}

/// Default number of candidate points in the Hopf-Lax minimisation.
pub const HOPF_LAX_CANDIDATES: usize = 2048;

/// Entropy solution of inviscid Burgers by Hopf-Lax minimisation:
/// `u(x, t) = (x - y*) / t` with `y*` minimising `U0(y) + (x - y)^2 / (2t)`
/// over uniformly spaced candidates.
#[derive(Debug, Clone, Copy)]
pub struct HopfLax<U, A> {
    initial: U,
    antiderivative: A,
    max_speed: f64,
    candidates: usize,
}

impl<U, A> HopfLax<U, A>
where
    U: Fn(f64) -> f64,
    A: Fn(f64) -> f64,
{
    /// `antiderivative` must be the antiderivative of `initial` on the real
    /// line (not reduced to a period); `max_speed` bounds `|u0|`.
    pub fn new(initial: U, antiderivative: A, max_speed: f64, candidates: usize) -> Self {
        Self {
            initial,
            antiderivative,
            max_speed,
            candidates: candidates.max(2),
        }
    }

    pub fn candidates(&self) -> usize {
        self.candidates
    }

    /// Spacing of the candidate grid, which bounds the error in `y*`.
    pub fn candidate_spacing(&self, t: f64) -> f64 {
        2.0 * (self.max_speed * t + 1.0) / (self.candidates - 1) as f64
    }

    /// Minimiser `y*`; the smallest candidate wins ties.
    pub fn minimiser(&self, x: f64, t: f64) -> f64 {
        let half = self.max_speed * t + 1.0;
        let lo = x - half;
        let h = self.candidate_spacing(t);
        let mut best = (lo, f64::INFINITY);
        for j in 0..self.candidates {
            let y = lo + h * j as f64;
            let v = (self.antiderivative)(y) + (x - y) * (x - y) / (2.0 * t);
            if v < best.1 {
                best = (y, v);
            }
        }
        best.0
    }

    pub fn evaluate(&self, x: f64, t: f64) -> f64 {
        if t <= 0.0 {
            return (self.initial)(x);
        }
        (x - self.minimiser(x, t)) / t
    }

    pub fn sample(&self, xs: &[f64], t: f64) -> Vec<f64> {
        xs.iter().map(|&x| self.evaluate(x, t)).collect()
    }
}

/// `u0(x) = 0.5 + sin(2 pi x)`.
pub fn burgers_initial(x: f64) -> f64 {
    0.5 + (2.0 * PI * x).sin()
}

/// Antiderivative of [`burgers_initial`] on the real line.
pub fn burgers_antiderivative(y: f64) -> f64 {
    0.5 * y - (2.0 * PI * y).cos() / (2.0 * PI)
}

pub type BurgersHopfLax = HopfLax<fn(f64) -> f64, fn(f64) -> f64>;

/// Hopf-Lax reference for the standard Burgers data.
pub fn burgers_reference(candidates: usize) -> BurgersHopfLax {
    HopfLax::new(burgers_initial, burgers_antiderivative, 1.5, candidates)
}

const SOD_MAX_ITERATIONS: usize = 100;
const SOD_TOLERANCE: f64 = 1e-12;

/// Star-region values of a Riemann problem for an ideal gas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StarState {
    pub pressure: f64,
    pub velocity: f64,
    /// Density between the left wave and the contact.
    pub rho_left: f64,
    /// Density between the contact and the right wave.
    pub rho_right: f64,
    pub iterations: usize,
}

/// Pressure function `f_K(p)` and its derivative for one side.
fn pressure_function(p: f64, s: &EulerPrimitive, gamma: f64) -> (f64, f64) {
    let a = s.sound_speed(gamma);
    if p > s.p {
        let ak = 2.0 / ((gamma + 1.0) * s.rho);
        let bk = (gamma - 1.0) / (gamma + 1.0) * s.p;
        let q = (ak / (p + bk)).sqrt();
        ((p - s.p) * q, q * (1.0 - 0.5 * (p - s.p) / (bk + p)))
    } else {
        let z = (gamma - 1.0) / (2.0 * gamma);
        let r = p / s.p;
        (
            2.0 * a / (gamma - 1.0) * (r.powf(z) - 1.0),
            r.powf(-(gamma + 1.0) / (2.0 * gamma)) / (s.rho * a),
        )
    }
}

fn check_admissible(s: &EulerPrimitive, which: &str) -> Result<()> {
    if s.rho > 0.0 && s.p > 0.0 && s.u.is_finite() {
        Ok(())
    } else {
        Err(FqnmError::Inadmissible {
            cell: 0,
            detail: format!("{which} Riemann state {s:?}"),
        })
    }
}

/// Newton iteration on the star pressure from the two-rarefaction guess.
pub fn sod_star_state(left: &EulerPrimitive, right: &EulerPrimitive, gamma: f64) -> Result<StarState> {
    check_admissible(left, "left")?;
    check_admissible(right, "right")?;
    let (al, ar) = (left.sound_speed(gamma), right.sound_speed(gamma));
    let du = right.u - left.u;
    if 2.0 / (gamma - 1.0) * (al + ar) <= du {
        return Err(FqnmError::Vacuum);
    }
    let z = (gamma - 1.0) / (2.0 * gamma);
    let guess = ((al + ar - 0.5 * (gamma - 1.0) * du) / (al / left.p.powf(z) + ar / right.p.powf(z))).powf(1.0 / z);
    let mut p = guess.max(1e-14);
    for it in 1..=SOD_MAX_ITERATIONS {
        let (fl, dl) = pressure_function(p, left, gamma);
        let (fr, dr) = pressure_function(p, right, gamma);
        let next = (p - (fl + fr + du) / (dl + dr)).max(1e-14);
        let change = (next - p).abs();
        p = next;
        if change <= SOD_TOLERANCE {
            let (fl, _) = pressure_function(p, left, gamma);
            let (fr, _) = pressure_function(p, right, gamma);
            let u = 0.5 * (left.u + right.u) + 0.5 * (fr - fl);
            return Ok(StarState {
                pressure: p,
                velocity: u,
                rho_left: star_density(p, left, gamma),
                rho_right: star_density(p, right, gamma),
                iterations: it,
            });
        }
    }
    Err(FqnmError::NoConvergence {
        iterations: SOD_MAX_ITERATIONS,
    })
}

fn star_density(p: f64, s: &EulerPrimitive, gamma: f64) -> f64 {
    let r = p / s.p;
    if p > s.p {
        let g = (gamma - 1.0) / (gamma + 1.0);
        s.rho * (r + g) / (g * r + 1.0)
    } else {
        s.rho * r.powf(1.0 / gamma)
    }
}

/// Exact Riemann solution sampled at `xi = (x - x0) / t`.
pub fn exact_riemann(xi: f64, left: &EulerPrimitive, right: &EulerPrimitive, gamma: f64, star: &StarState) -> EulerPrimitive {
    let g1 = (gamma - 1.0) / (gamma + 1.0);
    let (ps, us) = (star.pressure, star.velocity);
    if xi <= us {
        let a = left.sound_speed(gamma);
        if ps > left.p {
            let speed = left.u - a * ((gamma + 1.0) / (2.0 * gamma) * ps / left.p + (gamma - 1.0) / (2.0 * gamma)).sqrt();
            if xi <= speed { *left } else { EulerPrimitive { rho: star.rho_left, u: us, p: ps } }
        } else {
            let head = left.u - a;
            let a_star = a * (ps / left.p).powf((gamma - 1.0) / (2.0 * gamma));
            let tail = us - a_star;
            if xi <= head {
                *left
            } else if xi >= tail {
                EulerPrimitive { rho: star.rho_left, u: us, p: ps }
            } else {
                let c = 2.0 / (gamma + 1.0) + g1 / a * (left.u - xi);
                EulerPrimitive {
                    rho: left.rho * c.powf(2.0 / (gamma - 1.0)),
                    u: 2.0 / (gamma + 1.0) * (a + 0.5 * (gamma - 1.0) * left.u + xi),
                    p: left.p * c.powf(2.0 * gamma / (gamma - 1.0)),
                }
            }
        }
    } else {
        let a = right.sound_speed(gamma);
        if ps > right.p {
            let speed = right.u + a * ((gamma + 1.0) / (2.0 * gamma) * ps / right.p + (gamma - 1.0) / (2.0 * gamma)).sqrt();
            if xi >= speed { *right } else { EulerPrimitive { rho: star.rho_right, u: us, p: ps } }
        } else {
            let head = right.u + a;
            let a_star = a * (ps / right.p).powf((gamma - 1.0) / (2.0 * gamma));
            let tail = us + a_star;
            if xi >= head {
                *right
            } else if xi <= tail {
                EulerPrimitive { rho: star.rho_right, u: us, p: ps }
            } else {
                let c = 2.0 / (gamma + 1.0) - g1 / a * (right.u - xi);
                EulerPrimitive {
                    rho: right.rho * c.powf(2.0 / (gamma - 1.0)),
                    u: 2.0 / (gamma + 1.0) * (-a + 0.5 * (gamma - 1.0) * right.u + xi),
                    p: right.p * c.powf(2.0 * gamma / (gamma - 1.0)),
                }
            }
        }
    }
}

/// Exact shock-tube solution at `(x, t)` with the diaphragm at `x0`.
pub fn exact_sod(x: f64, t: f64, x0: f64, left: &EulerPrimitive, right: &EulerPrimitive, gamma: f64) -> Result<EulerPrimitive> {
    if t <= 0.0 {
        return Ok(if x < x0 { *left } else { *right });
    }
    let star = sod_star_state(left, right, gamma)?;
    Ok(exact_riemann((x - x0) / t, left, right, gamma, &star))
}

/// Exact profile at many points; the star state is solved once.
pub fn exact_sod_profile(xs: &[f64], t: f64, x0: f64, left: &EulerPrimitive, right: &EulerPrimitive, gamma: f64) -> Result<Vec<EulerPrimitive>> {
    if t <= 0.0 {
        return Ok(xs.iter().map(|&x| if x < x0 { *left } else { *right }).collect());
    }
    let star = sod_star_state(left, right, gamma)?;
    Ok(xs.iter().map(|&x| exact_riemann((x - x0) / t, left, right, gamma, &star)).collect())
}

/// Canonical shock-tube data `(1, 0, 1) | (0.125, 0, 0.1)`.
pub fn sod_states() -> (EulerPrimitive, EulerPrimitive) {
    (
        EulerPrimitive { rho: 1.0, u: 0.0, p: 1.0 },
        EulerPrimitive { rho: 0.125, u: 0.0, p: 0.1 },
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn advection_shift_examples() {
        let u0 = |x: f64| (2.0 * PI * x).sin();
        assert_eq!(exact_advection(u0, 1.0, 0.0, 0.3), u0(0.3));
        assert!((exact_advection(u0, 1.0, 1.0, 0.3) - u0(0.3)).abs() < 1e-12);
        let x = 0.1;
        assert!((exact_advection(u0, 1.0, 0.25, x) - (2.0 * PI * (x - 0.25)).sin()).abs() < 1e-12);
    }

    #[test]
    fn hopf_lax_constant_data() {
        let c = 0.7;
        let hl = HopfLax::new(move |_| c, move |y| c * y, c, 4001);
        for &x in &[0.1, 0.5, 0.93] {
            let u = hl.evaluate(x, 0.3);
            assert!((u - c).abs() <= hl.candidate_spacing(0.3) / 0.3);
        }
        assert_eq!(hl.evaluate(0.5, 0.0), c);
    }

    #[test]
    fn hopf_lax_matches_characteristics_before_the_shock() {
        let hl = burgers_reference(HOPF_LAX_CANDIDATES);
        let t = 0.05;
        let bound = 2.0 * hl.candidate_spacing(t) / t;
        for k in 0..64 {
            let x = (k as f64 + 0.5) / 64.0;
            // u = u0(x - u t) by fixed-point iteration; t |u0'| < 1 here
            let mut u = burgers_initial(x);
            for _ in 0..200 {
                u = burgers_initial(x - u * t);
            }
            assert!((hl.evaluate(x, t) - u).abs() <= bound, "x = {x}");
        }
    }

    #[test]
    fn sod_star_values() {
        let (l, r) = sod_states();
        let s = sod_star_state(&l, &r, 1.4).unwrap();
        assert!((s.pressure - 0.30313).abs() < 1e-5);
        assert!((s.velocity - 0.92745).abs() < 1e-5);
        assert!((s.rho_left - 0.42632).abs() < 1e-5);
        assert!((s.rho_right - 0.26557).abs() < 1e-5);
    }

    #[test]
    fn sod_initial_and_symmetric_data() {
        let (l, r) = sod_states();
        assert_eq!(exact_sod(0.2, 0.0, 0.5, &l, &r, 1.4).unwrap(), l);
        assert_eq!(exact_sod(0.7, 0.0, 0.5, &l, &r, 1.4).unwrap(), r);
        for &x in &[0.0, 0.3, 0.5, 0.9] {
            let s = exact_sod(x, 0.2, 0.5, &l, &l, 1.4).unwrap();
            assert!((s.rho - 1.0).abs() < 1e-12 && s.u.abs() < 1e-12 && (s.p - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn sod_is_self_similar() {
        let (l, r) = sod_states();
        for &x in &[-0.3, -0.1, 0.0, 0.1, 0.17, 0.3] {
            let a = exact_sod(x, 0.2, 0.0, &l, &r, 1.4).unwrap();
            let b = exact_sod(3.0 * x, 0.6, 0.0, &l, &r, 1.4).unwrap();
            assert!((a.rho - b.rho).abs() < 1e-12);
            assert!((a.u - b.u).abs() < 1e-12);
            assert!((a.p - b.p).abs() < 1e-12);
        }
    }

    #[test]
    fn vacuum_and_bad_data_are_errors() {
        let l = EulerPrimitive { rho: 1.0, u: -20.0, p: 0.1 };
        let r = EulerPrimitive { rho: 1.0, u: 20.0, p: 0.1 };
        assert!(matches!(sod_star_state(&l, &r, 1.4), Err(FqnmError::Vacuum)));
        let bad = EulerPrimitive { rho: -1.0, u: 0.0, p: 1.0 };
        assert!(sod_star_state(&bad, &r, 1.4).is_err());
    }
}
