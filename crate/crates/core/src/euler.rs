//! One-dimensional compressible Euler: a floating-point Roe solver and the
//! hybrid variant whose density transfer is carried by integer quanta.

use crate::diagnostics::{l1_error, transition_width};
use crate::error::{FqnmError, Result};
use crate::quantise::round_to_int;
use crate::references::{exact_sod_profile, sod_star_state};

/// Largest CFL number accepted by the Euler steps.
pub const EULER_CFL_LIMIT: f64 = 0.9;

/// Harten entropy-fix width as a fraction of `|u| + a` at the Roe average.
const ENTROPY_FIX_FRACTION: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerPrimitive {
    pub rho: f64,
    pub u: f64,
    pub p: f64,
}

impl EulerPrimitive {
    #[inline]
    pub fn sound_speed(&self, gamma: f64) -> f64 {
        (gamma * self.p / self.rho).sqrt()
    }

    pub fn to_conservative(&self, gamma: f64) -> EulerConservative {
        EulerConservative {
            rho: self.rho,
            m: self.rho * self.u,
            energy: self.p / (gamma - 1.0) + 0.5 * self.rho * self.u * self.u,
            gamma,
        }
    }
}

/// Conservative triple `(rho, m, E)` for an ideal gas with ratio `gamma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerConservative {
    pub rho: f64,
    pub m: f64,
    pub energy: f64,
    pub gamma: f64,
}

impl EulerConservative {
    #[inline]
    pub fn velocity(&self) -> f64 {
        self.m / self.rho
    }

    #[inline]
    pub fn pressure(&self) -> f64 {
        (self.gamma - 1.0) * (self.energy - 0.5 * self.m * self.m / self.rho)
    }

    pub fn to_primitive(&self) -> EulerPrimitive {
        EulerPrimitive {
            rho: self.rho,
            u: self.velocity(),
            p: self.pressure(),
        }
    }

    pub fn is_admissible(&self) -> bool {
        self.rho > 0.0 && self.energy.is_finite() && self.m.is_finite() && self.pressure() > 0.0
    }

    fn check(&self, cell: usize) -> Result<()> {
        if self.is_admissible() {
            Ok(())
        } else {
            Err(FqnmError::Inadmissible {
                cell,
                detail: format!("{self:?}"),
            })
        }
    }

    /// Physical flux `(m, m u + p, (E + p) u)`.
    pub fn flux(&self) -> [f64; 3] {
        let u = self.velocity();
        let p = self.pressure();
        [self.m, self.m * u + p, (self.energy + p) * u]
    }

    /// `|u| + a`.
    pub fn signal_speed(&self) -> f64 {
        let p = self.to_primitive();
        p.u.abs() + p.sound_speed(self.gamma)
    }
}

fn entropy_fixed(lambda: f64, eps: f64) -> f64 {
    let a = lambda.abs();
    if a < eps {
        (lambda * lambda + eps * eps) / (2.0 * eps)
    } else {
        a
    }
}

/// Roe flux with Roe-averaged eigensystem and Harten's entropy fix.
pub fn roe_flux(left: &EulerConservative, right: &EulerConservative) -> Result<[f64; 3]> {
    left.check(0)?;
    right.check(1)?;
    Ok(roe_flux_unchecked(left, right))
}

fn roe_flux_unchecked(left: &EulerConservative, right: &EulerConservative) -> [f64; 3] {
    let g = left.gamma;
    let (pl, pr) = (left.to_primitive(), right.to_primitive());
    let (sl, sr) = (left.rho.sqrt(), right.rho.sqrt());
    let hl = (left.energy + pl.p) / left.rho;
    let hr = (right.energy + pr.p) / right.rho;
    let u = (sl * pl.u + sr * pr.u) / (sl + sr);
    let h = (sl * hl + sr * hr) / (sl + sr);
    let a = ((g - 1.0) * (h - 0.5 * u * u)).sqrt();

    let d_rho = right.rho - left.rho;
    let d_m = right.m - left.m;
    let d_e = right.energy - left.energy;
    let a2 = (g - 1.0) / (a * a) * (d_rho * (h - u * u) + u * d_m - d_e);
    let a1 = (d_rho * (u + a) - d_m - a * a2) / (2.0 * a);
    let a3 = d_rho - a1 - a2;

    let eps = ENTROPY_FIX_FRACTION * (u.abs() + a);
    let l1 = entropy_fixed(u - a, eps);
    let l2 = entropy_fixed(u, eps);
    let l3 = entropy_fixed(u + a, eps);

    let (fl, fr) = (left.flux(), right.flux());
    let r1 = [1.0, u - a, h - u * a];
    let r2 = [1.0, u, 0.5 * u * u];
    let r3 = [1.0, u + a, h + u * a];
    let mut out = [0.0; 3];
    for k in 0..3 {
        let diss = l1 * a1 * r1[k] + l2 * a2 * r2[k] + l3 * a3 * r3[k];
        out[k] = 0.5 * (fl[k] + fr[k]) - 0.5 * diss;
    }
    out
}

/// `max(|u| + a) dt / dx` over the cells.
pub fn euler_cfl(states: &[EulerConservative], dt: f64, dx: f64) -> f64 {
    states.iter().map(EulerConservative::signal_speed).fold(0.0, f64::max) * dt / dx
}

fn check_cfl(nu: f64) -> Result<()> {
    if nu <= EULER_CFL_LIMIT {
        Ok(())
    } else {
        Err(FqnmError::CflViolation {
            nu,
            limit: EULER_CFL_LIMIT,
        })
    }
}

/// Interface fluxes `F_{i-1/2}` for `i = 0..=N` with zero-gradient ghosts.
fn roe_interface_fluxes(states: &[EulerConservative]) -> Vec<[f64; 3]> {
    let n = states.len();
    (0..=n)
        .map(|i| {
            let l = &states[i.saturating_sub(1)];
            let r = &states[i.min(n - 1)];
            roe_flux_unchecked(l, r)
        })
        .collect()
}

/// Floating-point Roe flux-difference update with outflow boundaries.
pub fn fp_roe_step(states: &[EulerConservative], dt: f64, dx: f64) -> Result<Vec<EulerConservative>> {
    for (i, s) in states.iter().enumerate() {
        s.check(i)?;
    }
    check_cfl(euler_cfl(states, dt, dx))?;
    let f = roe_interface_fluxes(states);
    let lambda = dt / dx;
    let next: Vec<EulerConservative> = states
        .iter()
        .enumerate()
        .map(|(i, s)| EulerConservative {
            rho: s.rho - lambda * (f[i + 1][0] - f[i][0]),
            m: s.m - lambda * (f[i + 1][1] - f[i][1]),
            energy: s.energy - lambda * (f[i + 1][2] - f[i][2]),
            gamma: s.gamma,
        })
        .collect();
    for (i, s) in next.iter().enumerate() {
        s.check(i)?;
    }
    Ok(next)
}

/// Density carried as integer quanta of size `delta_rho`; momentum and
/// energy stay real.
#[derive(Debug, Clone, PartialEq)]
pub struct HybridState {
    pub q_rho: Vec<i64>,
    pub m: Vec<f64>,
    pub energy: Vec<f64>,
    pub delta_rho: f64,
    pub gamma: f64,
}

/// Integer mass transfers through the two domain ends during one step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BoundaryTransfer {
    /// Quanta entering through the left end.
    pub left_in: i64,
    /// Quanta leaving through the right end.
    pub right_out: i64,
}

impl HybridState {
    pub fn from_conservative(states: &[EulerConservative], delta_rho: f64) -> Result<Self> {
        if !(delta_rho.is_finite() && delta_rho > 0.0) {
            return Err(FqnmError::InvalidResolution(delta_rho));
        }
        let gamma = states.first().map_or(1.4, |s| s.gamma);
        Ok(Self {
            q_rho: states
                .iter()
                .map(|s| round_to_int(s.rho / delta_rho))
                .collect::<Result<_>>()?,
            m: states.iter().map(|s| s.m).collect(),
            energy: states.iter().map(|s| s.energy).collect(),
            delta_rho,
            gamma,
        })
    }

    /// Reconstructed conservative states with `rho = delta_rho * q_rho`.
    pub fn reconstruct(&self) -> Vec<EulerConservative> {
        self.q_rho
            .iter()
            .zip(&self.m)
            .zip(&self.energy)
            .map(|((&q, &m), &e)| EulerConservative {
                rho: self.delta_rho * q as f64,
                m,
                energy: e,
                gamma: self.gamma,
            })
            .collect()
    }

    pub fn total_quanta(&self) -> i64 {
        self.q_rho.iter().sum()
    }
}

/// One step of the hybrid update: Roe fluxes from the reconstructed state,
/// the mass component rounded to whole quanta per interface, momentum and
/// energy advanced with the unrounded Roe components.
pub fn fqnm_density_step(h: &HybridState, dt: f64, dx: f64) -> Result<(HybridState, BoundaryTransfer)> {
    let states = h.reconstruct();
    for (i, s) in states.iter().enumerate() {
        s.check(i)?;
    }
    check_cfl(euler_cfl(&states, dt, dx))?;
    let f = roe_interface_fluxes(&states);
    let lambda = dt / dx;
    let scale = lambda / h.delta_rho;
    let phi = f
        .iter()
        .map(|fi| round_to_int(fi[0] * scale))
        .collect::<Result<Vec<i64>>>()?;
    let n = states.len();
    let mut next = h.clone();
    for i in 0..n {
        let div = phi[i + 1].checked_sub(phi[i]).ok_or(FqnmError::Overflow { cell: i })?;
        next.q_rho[i] = h.q_rho[i].checked_sub(div).ok_or(FqnmError::Overflow { cell: i })?;
        next.m[i] = h.m[i] - lambda * (f[i + 1][1] - f[i][1]);
        next.energy[i] = h.energy[i] - lambda * (f[i + 1][2] - f[i][2]);
        if next.q_rho[i] <= 0 {
            return Err(FqnmError::Inadmissible {
                cell: i,
                detail: format!("reconstructed density {} is not positive", h.delta_rho * next.q_rho[i] as f64),
            });
        }
    }
    Ok((
        next,
        BoundaryTransfer {
            left_in: phi[0],
            right_out: phi[n],
        },
    ))
}

/// Shock-tube configuration shared by the paired runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SodSetup {
    pub cells: usize,
    pub t_final: f64,
    /// Target CFL against the largest exact signal speed.
    pub cfl: f64,
    pub delta_rho: f64,
    pub gamma: f64,
    pub diaphragm: f64,
    pub left: EulerPrimitive,
    pub right: EulerPrimitive,
}

impl Default for SodSetup {
    fn default() -> Self {
        let (left, right) = crate::references::sod_states();
        Self {
            cells: 400,
            t_final: 0.2,
            cfl: 0.8,
            delta_rho: left.rho / 1000.0,
            gamma: 1.4,
            diaphragm: 0.5,
            left,
            right,
        }
    }
}

/// Final profiles and bookkeeping of a paired Roe / hybrid run.
#[derive(Debug, Clone)]
pub struct SodRun {
    pub setup: SodSetup,
    pub x: Vec<f64>,
    pub dt: f64,
    pub steps: usize,
    pub roe: Vec<EulerPrimitive>,
    pub fqnm: Vec<EulerPrimitive>,
    pub exact: Vec<EulerPrimitive>,
    /// Total density quanta after every step (index 0 is the initial state).
    pub quanta_trace: Vec<i64>,
    /// Net quanta entering through the ends, per step.
    pub boundary_trace: Vec<BoundaryTransfer>,
    /// Floating-point total mass `dx * sum rho` of the Roe run per step.
    pub roe_mass_trace: Vec<f64>,
    pub max_cfl: f64,
}

impl SodRun {
    pub fn density(profile: &[EulerPrimitive]) -> Vec<f64> {
        profile.iter().map(|s| s.rho).collect()
    }

    pub fn l1_density_error(&self, profile: &[EulerPrimitive]) -> f64 {
        let dx = 1.0 / self.setup.cells as f64;
        l1_error(&Self::density(profile), &Self::density(&self.exact), dx)
    }

    /// Cells strictly inside the 10 %–90 % band of the exact shock jump,
    /// counted between the contact and the end of the domain.
    pub fn shock_width(&self, profile: &[EulerPrimitive]) -> Result<usize> {
        let star = sod_star_state(&self.setup.left, &self.setup.right, self.setup.gamma)?;
        let contact = self.setup.diaphragm + star.velocity * self.setup.t_final;
        let n = self.setup.cells;
        // halfway between contact and shock
        let shock_speed = shock_speed_right(&self.setup, star.pressure);
        let shock = self.setup.diaphragm + shock_speed * self.setup.t_final;
        let start = (0.5 * (contact + shock) * n as f64) as usize;
        Ok(transition_width(&Self::density(profile), start..n, self.setup.right.rho, star.rho_right))
    }

    /// Exact shock position at the final time.
    pub fn shock_position(&self) -> Result<f64> {
        let star = sod_star_state(&self.setup.left, &self.setup.right, self.setup.gamma)?;
        Ok(self.setup.diaphragm + shock_speed_right(&self.setup, star.pressure) * self.setup.t_final)
    }
}

fn shock_speed_right(setup: &SodSetup, p_star: f64) -> f64 {
    let g = setup.gamma;
    let r = &setup.right;
    r.u + r.sound_speed(g) * ((g + 1.0) / (2.0 * g) * p_star / r.p + (g - 1.0) / (2.0 * g)).sqrt()
}

/// Largest `|u| + a` over the exact solution's constant states.
fn exact_max_signal_speed(setup: &SodSetup) -> Result<f64> {
    let star = sod_star_state(&setup.left, &setup.right, setup.gamma)?;
    let g = setup.gamma;
    let speeds = [
        setup.left.u.abs() + setup.left.sound_speed(g),
        setup.right.u.abs() + setup.right.sound_speed(g),
        star.velocity.abs() + (g * star.pressure / star.rho_left).sqrt(),
        star.velocity.abs() + (g * star.pressure / star.rho_right).sqrt(),
    ];
    Ok(speeds.into_iter().fold(0.0, f64::max))
}

/// Runs the Roe and hybrid solvers from identical data, grid, time step and
/// flux, and samples the exact solution at the cell centres.
pub fn run_sod(setup: &SodSetup) -> Result<SodRun> {
    if setup.cells < 8 || !(setup.t_final > 0.0) || !(setup.cfl > 0.0) {
        return Err(FqnmError::Config(format!("bad shock-tube setup {setup:?}")));
    }
    let n = setup.cells;
    let dx = 1.0 / n as f64;
    let x: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) * dx).collect();
    let dt_cfl = setup.cfl * dx / exact_max_signal_speed(setup)?;
    let steps = (setup.t_final / dt_cfl - 1e-9).ceil().max(1.0) as usize;
    let dt = setup.t_final / steps as f64;

    let initial: Vec<EulerConservative> = x
        .iter()
        .map(|&xi| {
            let s = if xi < setup.diaphragm { setup.left } else { setup.right };
            s.to_conservative(setup.gamma)
        })
        .collect();
    let mut roe = initial.clone();
    let mut hybrid = HybridState::from_conservative(&initial, setup.delta_rho)?;
    let mut quanta_trace = vec![hybrid.total_quanta()];
    let mut boundary_trace = Vec::with_capacity(steps);
    let mut roe_mass_trace = vec![dx * roe.iter().map(|s| s.rho).sum::<f64>()];
    let mut max_cfl: f64 = 0.0;
    for _ in 0..steps {
        max_cfl = max_cfl.max(euler_cfl(&roe, dt, dx));
        roe = fp_roe_step(&roe, dt, dx)?;
        let (next, boundary) = fqnm_density_step(&hybrid, dt, dx)?;
        hybrid = next;
        quanta_trace.push(hybrid.total_quanta());
        boundary_trace.push(boundary);
        roe_mass_trace.push(dx * roe.iter().map(|s| s.rho).sum::<f64>());
    }
    let exact = exact_sod_profile(&x, setup.t_final, setup.diaphragm, &setup.left, &setup.right, setup.gamma)?;
    Ok(SodRun {
        setup: *setup,
        x,
        dt,
        steps,
        roe: roe.iter().map(EulerConservative::to_primitive).collect(),
        fqnm: hybrid.reconstruct().iter().map(EulerConservative::to_primitive).collect(),
        exact,
        quanta_trace,
        boundary_trace,
        roe_mass_trace,
        max_cfl,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::references::sod_states;

    fn cons(rho: f64, u: f64, p: f64) -> EulerConservative {
        EulerPrimitive { rho, u, p }.to_conservative(1.4)
    }

    #[test]
    fn roe_flux_is_consistent() {
        let s = cons(0.8, 0.3, 1.7);
        let f = roe_flux(&s, &s).unwrap();
        let g = s.flux();
        for k in 0..3 {
            assert!((f[k] - g[k]).abs() < 1e-14 * (1.0 + g[k].abs()));
        }
    }

    #[test]
    fn roe_mass_flux_is_antisymmetric_under_mirror() {
        let (a, b) = (cons(1.0, 0.4, 1.0), cons(0.5, -0.2, 0.6));
        let (am, bm) = (cons(1.0, -0.4, 1.0), cons(0.5, 0.2, 0.6));
        let f = roe_flux(&a, &b).unwrap();
        let g = roe_flux(&bm, &am).unwrap();
        assert!((f[0] + g[0]).abs() < 1e-14);
        assert!((f[1] - g[1]).abs() < 1e-14);
        assert!((f[2] + g[2]).abs() < 1e-14);
    }

    #[test]
    fn roe_rejects_inadmissible_states() {
        let bad = EulerConservative { rho: 1.0, m: 0.0, energy: -1.0, gamma: 1.4 };
        assert!(roe_flux(&bad, &cons(1.0, 0.0, 1.0)).is_err());
    }

    #[test]
    fn uniform_state_is_fixed_point() {
        let u = vec![cons(0.9, 0.25, 1.1); 20];
        let next = fp_roe_step(&u, 0.001, 0.05).unwrap();
        for s in &next {
            assert!((s.rho - 0.9).abs() < 1e-14 && (s.energy - u[0].energy).abs() < 1e-14);
        }
        let h = HybridState::from_conservative(&u, 1e-3).unwrap();
        let (h1, b) = fqnm_density_step(&h, 0.001, 0.05).unwrap();
        assert_eq!(h1.q_rho, h.q_rho);
        assert_eq!(b.left_in, b.right_out);
    }

    #[test]
    fn euler_cfl_limit_is_enforced() {
        let u = vec![cons(1.0, 0.0, 1.0); 10];
        assert!(matches!(fp_roe_step(&u, 1.0, 0.1), Err(FqnmError::CflViolation { .. })));
    }

    #[test]
    fn hybrid_quanta_follow_boundary_transfers() {
        let (l, r) = sod_states();
        let states: Vec<_> = (0..100)
            .map(|i| if i < 50 { l.to_conservative(1.4) } else { r.to_conservative(1.4) })
            .collect();
        let mut h = HybridState::from_conservative(&states, 1e-3).unwrap();
        let mut total = h.total_quanta();
        for _ in 0..40 {
            let (next, b) = fqnm_density_step(&h, 0.002, 0.01).unwrap();
            total += b.left_in - b.right_out;
            assert_eq!(next.total_quanta(), total);
            // no wave has reached the ends yet
            assert_eq!(b, BoundaryTransfer::default());
            h = next;
        }
    }

    #[test]
    fn sod_run_orders_waves() {
        let run = run_sod(&SodSetup { cells: 200, ..Default::default() }).unwrap();
        assert!(run.max_cfl <= EULER_CFL_LIMIT);
        let rho = SodRun::density(&run.roe);
        // rarefaction region decreasing, then plateau, contact, plateau, shock
        let at = |x: f64| rho[(x * 200.0) as usize];
        assert!(at(0.1) > at(0.45) && at(0.45) > at(0.6));
        assert!(at(0.6) > at(0.78) && at(0.78) > at(0.9));
        assert!(run.quanta_trace.iter().all(|&q| q == run.quanta_trace[0]));
    }
}
