//! Fixtures shared by the step-kernel benchmarks.

use fqnm::baselines::{UpwindStepper, Weno5Rk3};
use fqnm::problems::{burgers_ic, gaussian_packet_ic, BURGERS_ALPHA_INFLATION, DEFAULT_LEVELS};
use fqnm::transfer::{alpha_for_range, build_transfer_maps, lax_friedrichs_split, SchemeParams, TabulatedStep};
use fqnm::{quantise, Resolution, Result, ScalarFlux};

/// Burgers sine data on `n` cells, set up for both the tabulated FQNM step
/// and the upwind split baseline at the same `dt`.
pub struct BurgersFixture {
    pub kernel: TabulatedStep,
    pub states: Vec<i64>,
    pub scratch: Vec<i64>,
    pub upwind: UpwindStepper,
    pub values: Vec<f64>,
}

impl BurgersFixture {
    pub fn new(n: usize, cfl: f64) -> Result<Self> {
        let u0 = burgers_ic(n);
        let (lo, hi) = u0.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &u| (a.min(u), b.max(u)));
        let alpha = alpha_for_range(ScalarFlux::Burgers, lo, hi, BURGERS_ALPHA_INFLATION);
        let dx = 1.0 / n as f64;
        let dt = cfl * dx / alpha;
        let res = Resolution::new((hi - lo) / DEFAULT_LEVELS)?;
        let split = lax_friedrichs_split(ScalarFlux::Burgers, alpha, lo, hi)?;
        let maps = build_transfer_maps(split, &SchemeParams::new(res, dx, dt, alpha)?);
        let q = quantise(&u0, res)?;
        let (qlo, qhi) = q.min_max();
        let margin = (qhi - qlo) / 4;
        Ok(Self {
            kernel: TabulatedStep::new(maps, qlo - margin, qhi + margin)?,
            states: q.into_states(),
            scratch: vec![0; n],
            upwind: UpwindStepper::new(split, dt, dx, n)?,
            values: u0,
        })
    }
}

/// Gaussian packet advected at unit speed, stepped with WENO5 + SSP-RK3.
pub struct AdvectionFixture {
    pub weno: Weno5Rk3,
    pub values: Vec<f64>,
}

impl AdvectionFixture {
    pub fn new(n: usize, cfl: f64) -> Result<Self> {
        let packet = gaussian_packet_ic(n, n as f64 / 8.0, 0.1, 0.5)?;
        let dx = 1.0 / n as f64;
        Ok(Self {
            weno: Weno5Rk3::new(1.0, cfl * dx, dx, n)?,
            values: packet.values,
        })
    }
}
