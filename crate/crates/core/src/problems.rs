//! Scalar benchmark problems and the run driver shared by every scheme.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::baselines::{lax_friedrichs_step, RealField, UpwindStepper, Weno5Rk3};
use crate::diagnostics::{
    check_step, discrete_entropy, effective_levels, l1_error, level_distribution, level_transition_matrix,
    relative_l2_error, total_variation, total_variation_real, bistochastic_defect, InvariantViolation,
    ViolationKind,
};
use crate::error::{FqnmError, Result};
use crate::flux::ScalarFlux;
use crate::quantise::{quantise, Resolution};
use crate::record::{DiagnosticsRow, RunRecord, Snapshot};
use crate::references::{burgers_reference, exact_advection};
use crate::transfer::{alpha_for_range, build_transfer_maps, lax_friedrichs_split, SchemeParams, TabulatedStep};

/// Number of quantisation levels spanned by the initial data when `delta`
/// is left to its default.
pub const DEFAULT_LEVELS: f64 = 500.0;

/// Margin added to `max |f'|` over the initial data for Burgers runs.
pub const BURGERS_ALPHA_INFLATION: f64 = 0.1;

/// Cell centres `(i + 1/2) / n` on the unit interval.
pub fn cell_centres(n: usize) -> Vec<f64> {
    let dx = 1.0 / n as f64;
    (0..n).map(|i| (i as f64 + 0.5) * dx).collect()
}

/// Gaussian-modulated sine samples together with the normalised wavenumber.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianPacket {
    pub values: Vec<f64>,
    /// `k0 dx` with `k0 = 2 pi f`.
    pub k0_dx: f64,
}

impl GaussianPacket {
    pub fn beyond_nyquist(&self) -> bool {
        self.k0_dx > PI
    }
}

fn packet(x: f64, frequency: f64, sigma: f64, center: f64) -> f64 {
    let d = x - center;
    (-d * d / (2.0 * sigma * sigma)).exp() * (2.0 * PI * frequency * x).sin()
}

pub fn gaussian_packet_ic(n_cells: usize, frequency: f64, sigma: f64, center: f64) -> Result<GaussianPacket> {
    if !(sigma > 0.0 && sigma < 0.5) {
        return Err(FqnmError::Config(format!("packet width must lie in (0, 0.5), got {sigma}")));
    }
    if !(frequency >= 1.0) {
        return Err(FqnmError::Config(format!("packet frequency must be at least 1, got {frequency}")));
    }
    if n_cells < 2 {
        return Err(FqnmError::Config(format!("need at least 2 cells, got {n_cells}")));
    }
    let values = cell_centres(n_cells)
        .into_iter()
        .map(|x| packet(x, frequency, sigma, center))
        .collect();
    Ok(GaussianPacket {
        values,
        k0_dx: 2.0 * PI * frequency / n_cells as f64,
    })
}

/// `0.5 + sin(2 pi x)` at cell centres.
pub fn burgers_ic(n_cells: usize) -> Vec<f64> {
    cell_centres(n_cells)
        .into_iter()
        .map(crate::references::burgers_initial)
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialCondition {
    GaussianPacket { frequency: f64, sigma: f64, center: f64 },
    BurgersSine,
    /// Explicit cell values; no analytic reference is available.
    Samples(Vec<f64>),
}

impl InitialCondition {
    pub fn packet(frequency: f64) -> Self {
        Self::GaussianPacket {
            frequency,
            sigma: 0.1,
            center: 0.5,
        }
    }

    fn pointwise(&self, x: f64) -> Option<f64> {
        match *self {
            Self::GaussianPacket { frequency, sigma, center } => Some(packet(x, frequency, sigma, center)),
            Self::BurgersSine => Some(crate::references::burgers_initial(x)),
            Self::Samples(_) => None,
        }
    }

    fn describe(&self) -> String {
        match self {
            Self::GaussianPacket { frequency, sigma, center } => {
                format!("gaussian_packet(f={frequency};sigma={sigma};center={center})")
            }
            Self::BurgersSine => "0.5+sin(2*pi*x)".into(),
            Self::Samples(v) => format!("samples({})", v.len()),
        }
    }
}

/// Reference solution used for error columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reference {
    None,
    /// Exact periodic translation of the initial condition.
    ExactShift,
    /// Hopf-Lax minimisation over the given number of candidates.
    HopfLax { candidates: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarProblem {
    pub flux: ScalarFlux,
    pub n_cells: usize,
    pub initial: InitialCondition,
    pub final_time: f64,
    pub reference: Reference,
}

impl ScalarProblem {
    pub fn advection_packet(n_cells: usize, frequency: f64, speed: f64, final_time: f64) -> Self {
        Self {
            flux: ScalarFlux::Advection { speed },
            n_cells,
            initial: InitialCondition::packet(frequency),
            final_time,
            reference: Reference::ExactShift,
        }
    }

    pub fn burgers(n_cells: usize, final_time: f64, candidates: usize) -> Self {
        Self {
            flux: ScalarFlux::Burgers,
            n_cells,
            initial: InitialCondition::BurgersSine,
            final_time,
            reference: Reference::HopfLax { candidates },
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_cells < 8 {
            return Err(FqnmError::Config(format!("need at least 8 cells, got {}", self.n_cells)));
        }
        if !(self.final_time.is_finite() && self.final_time > 0.0) {
            return Err(FqnmError::Config(format!("final time must be positive, got {}", self.final_time)));
        }
        if let InitialCondition::Samples(v) = &self.initial {
            if v.len() != self.n_cells {
                return Err(FqnmError::LengthMismatch {
                    expected: self.n_cells,
                    actual: v.len(),
                });
            }
            if self.reference != Reference::None {
                return Err(FqnmError::Config("sampled initial data has no analytic reference".into()));
            }
        }
        if matches!(self.reference, Reference::HopfLax { .. }) && self.initial != InitialCondition::BurgersSine {
            return Err(FqnmError::Config("the Hopf-Lax reference is wired to the sine data only".into()));
        }
        if self.reference == Reference::ExactShift && !matches!(self.flux, ScalarFlux::Advection { .. }) {
            return Err(FqnmError::Config("an exact shift reference needs linear advection".into()));
        }
        Ok(())
    }

    pub fn initial_values(&self) -> Result<(Vec<f64>, Option<f64>)> {
        Ok(match &self.initial {
            InitialCondition::GaussianPacket { frequency, sigma, center } => {
                let p = gaussian_packet_ic(self.n_cells, *frequency, *sigma, *center)?;
                (p.values, Some(p.k0_dx))
            }
            InitialCondition::BurgersSine => (burgers_ic(self.n_cells), None),
            InitialCondition::Samples(v) => (v.clone(), None),
        })
    }

    /// Reference values at the cell centres at time `t`.
    pub fn reference_at(&self, t: f64) -> Option<Vec<f64>> {
        let xs = cell_centres(self.n_cells);
        match self.reference {
            Reference::None => None,
            Reference::ExactShift => {
                let ScalarFlux::Advection { speed } = self.flux else { return None };
                let ic = &self.initial;
                Some(
                    xs.iter()
                        .map(|&x| exact_advection(|y| ic.pointwise(y).unwrap_or(f64::NAN), speed, t, x))
                        .collect(),
                )
            }
            Reference::HopfLax { candidates } => Some(burgers_reference(candidates).sample(&xs, t)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    Fqnm,
    UpwindFv,
    LaxFriedrichs,
    Weno5Rk3,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [Scheme::Fqnm, Scheme::UpwindFv, Scheme::LaxFriedrichs, Scheme::Weno5Rk3];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Fqnm => "fqnm",
            Scheme::UpwindFv => "upwind",
            Scheme::LaxFriedrichs => "lf",
            Scheme::Weno5Rk3 => "weno5rk3",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = FqnmError;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|k| k.name() == s.trim())
            .ok_or_else(|| FqnmError::Config(format!("unknown scheme `{s}` (expected fqnm, upwind, lf or weno5rk3)")))
    }
}

/// What to do when a quantised step breaks the maximum principle or TVD.
/// Mass is always enforced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InvariantPolicy {
    #[default]
    Record,
    Enforce,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scheme: Scheme,
    /// Quantisation resolution; `None` spans the initial data with
    /// [`DEFAULT_LEVELS`] levels. Ignored by the baselines.
    pub delta: Option<f64>,
    /// Target CFL number `alpha dt / dx`.
    pub cfl: f64,
    /// Wave-speed bound of the split; `None` derives it from the data.
    pub alpha: Option<f64>,
    pub record_every: usize,
    pub track_entropy: bool,
    pub policy: InvariantPolicy,
}

impl RunConfig {
    pub fn new(scheme: Scheme, cfl: f64) -> Self {
        Self {
            scheme,
            delta: None,
            cfl,
            alpha: None,
            record_every: 0,
            track_entropy: false,
            policy: InvariantPolicy::Record,
        }
    }
}

/// Uniform step count and size reaching `t_final` exactly with
/// `speed * dt / dx <= cfl`.
pub fn uniform_steps(t_final: f64, dx: f64, speed: f64, cfl: f64) -> (usize, f64) {
    if speed <= 0.0 {
        return (1, t_final);
    }
    let dt_cfl = cfl * dx / speed;
    let mut steps = ((t_final / dt_cfl) - 1e-9).ceil().max(1.0) as usize;
    while speed * (t_final / steps as f64) / dx > cfl {
        steps += 1;
    }
    (steps, t_final / steps as f64)
}

/// Resolved numerical parameters of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Discretisation {
    pub dx: f64,
    pub dt: f64,
    pub steps: usize,
    pub alpha: f64,
    pub delta: f64,
}

impl Discretisation {
    pub fn nu(&self) -> f64 {
        self.alpha * self.dt / self.dx
    }
}

pub fn discretise(problem: &ScalarProblem, config: &RunConfig, u0: &[f64]) -> Result<Discretisation> {
    problem.validate()?;
    if !(config.cfl.is_finite() && config.cfl > 0.0) {
        return Err(FqnmError::Config(format!("CFL number must be positive, got {}", config.cfl)));
    }
    if config.cfl > 1.0 {
        return Err(FqnmError::CflViolation {
            nu: config.cfl,
            limit: 1.0,
        });
    }
    let (lo, hi) = u0.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &u| (a.min(u), b.max(u)));
    let alpha = match (config.alpha, problem.flux) {
        (Some(a), _) => a,
        (None, ScalarFlux::Advection { speed }) => speed.abs(),
        (None, ScalarFlux::Burgers) => alpha_for_range(ScalarFlux::Burgers, lo, hi, BURGERS_ALPHA_INFLATION),
    };
    let delta = match config.delta {
        Some(d) => Resolution::new(d)?.get(),
        None if hi > lo => (hi - lo) / DEFAULT_LEVELS,
        None => 1.0 / DEFAULT_LEVELS,
    };
    let dx = 1.0 / problem.n_cells as f64;
    let (steps, dt) = uniform_steps(problem.final_time, dx, alpha, config.cfl);
    Ok(Discretisation { dx, dt, steps, alpha, delta })
}

struct Tracker<'a> {
    problem: &'a ScalarProblem,
    config: &'a RunConfig,
    disc: Discretisation,
    diagnostics: Vec<DiagnosticsRow>,
    snapshots: Vec<Snapshot>,
}

impl Tracker<'_> {
    fn recorded(&self, step: usize) -> bool {
        step == self.disc.steps || (self.config.record_every > 0 && step.is_multiple_of(self.config.record_every))
    }

    fn push(&mut self, step: usize, values: &[f64], states: Option<(&[i64], Option<&[i64]>)>) -> Result<()> {
        let time = step as f64 * self.disc.dt;
        let recorded = self.recorded(step);
        let (l1, l2) = match recorded.then(|| self.problem.reference_at(time)).flatten() {
            Some(r) => (l1_error(values, &r, self.disc.dx), relative_l2_error(values, &r)),
            None => (f64::NAN, f64::NAN),
        };
        let mut row = DiagnosticsRow {
            step,
            time,
            mass: values.iter().sum(),
            int_mass: None,
            tv: total_variation_real(values),
            entropy: f64::NAN,
            n_eff: f64::NAN,
            rho_defect: f64::NAN,
            l1_vs_ref: l1,
            l2rel_vs_ref: l2,
        };
        if let Some((q, previous)) = states {
            let mass = crate::diagnostics::total_mass(q)?;
            row.mass = mass as f64;
            row.int_mass = Some(mass);
            row.tv = total_variation(q) as f64;
            if self.config.track_entropy {
                let p = level_distribution(q);
                row.entropy = discrete_entropy(&p);
                row.n_eff = effective_levels(&p);
                if let Some(prev) = previous {
                    row.rho_defect = bistochastic_defect(&level_transition_matrix(prev, q)?);
                }
            }
        }
        self.diagnostics.push(row);
        if recorded {
            self.snapshots.push(Snapshot {
                step,
                time,
                values: values.to_vec(),
                states: states.map(|(q, _)| q.to_vec()),
            });
        }
        Ok(())
    }
}

/// Integrates `problem` to its final time with uniform steps.
///
/// Refuses to start when the CFL number exceeds one. Quantised runs check
/// mass (always fatal), the maximum principle and TVD after every step.
pub fn run(problem: &ScalarProblem, config: &RunConfig) -> Result<RunRecord> {
    let (u0, k0_dx) = problem.initial_values()?;
    let disc = discretise(problem, config, &u0)?;
    let n = problem.n_cells;
    let mut warnings = Vec::new();
    if let Some(k) = k0_dx {
        if k > PI {
            warnings.push(format!("k0*dx = {k} exceeds the Nyquist limit pi"));
        }
    }
    let mut metadata: Vec<(String, String)> = vec![
        ("scheme".into(), config.scheme.to_string()),
        ("flux".into(), format!("{:?}", problem.flux)),
        ("initial".into(), problem.initial.describe()),
        ("cells".into(), n.to_string()),
        ("t_final".into(), problem.final_time.to_string()),
        ("cfl_target".into(), config.cfl.to_string()),
        ("nu".into(), disc.nu().to_string()),
        ("alpha".into(), disc.alpha.to_string()),
        ("dt".into(), disc.dt.to_string()),
        ("time_steps".into(), disc.steps.to_string()),
    ];
    if config.scheme == Scheme::Fqnm {
        metadata.push(("delta_used".into(), disc.delta.to_string()));
    }
    if let Some(k) = k0_dx {
        metadata.push(("k0_dx".into(), k.to_string()));
    }
    let mut tracker = Tracker {
        problem,
        config,
        disc,
        diagnostics: Vec::with_capacity(disc.steps + 1),
        snapshots: Vec::new(),
    };
    let mut violations: Vec<InvariantViolation> = Vec::new();
    let (lo, hi) = u0.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &u| (a.min(u), b.max(u)));

    let (final_values, final_states) = match config.scheme {
        Scheme::Fqnm => {
            let res = Resolution::new(disc.delta)?;
            let params = SchemeParams::new(res, disc.dx, disc.dt, disc.alpha)?;
            params.require_monotone()?;
            let split = lax_friedrichs_split(problem.flux, disc.alpha, lo, hi)?;
            let q0 = quantise(&u0, res)?;
            let (qlo, qhi) = q0.min_max();
            let kernel = TabulatedStep::new(build_transfer_maps(split, &params), qlo, qhi)?;
            let mut q = q0.into_states();
            let mut prev = q.clone();
            let mut flux = vec![0i64; n];
            let recon = |q: &[i64]| q.iter().map(|&s| disc.delta * s as f64).collect::<Vec<_>>();
            tracker.push(0, &recon(&q), Some((&q, None)))?;
            for s in 1..=disc.steps {
                prev.copy_from_slice(&q);
                kernel.step(&mut q, &mut flux)?;
                for v in check_step(s, &prev, &q) {
                    if v.kind == ViolationKind::Mass || config.policy == InvariantPolicy::Enforce {
                        return Err(FqnmError::Invariant(v.to_string()));
                    }
                    violations.push(v);
                }
                tracker.push(s, &recon(&q), Some((&q, Some(&prev))))?;
            }
            (recon(&q), Some(q))
        }
        Scheme::UpwindFv => {
            let split = lax_friedrichs_split(problem.flux, disc.alpha, lo, hi)?;
            let mut stepper = UpwindStepper::new(split, disc.dt, disc.dx, n)?;
            let mut u = u0.clone();
            tracker.push(0, &u, None)?;
            for s in 1..=disc.steps {
                stepper.step(&mut u);
                crate::baselines::ensure_finite(&u, s)?;
                tracker.push(s, &u, None)?;
            }
            (u, None)
        }
        Scheme::LaxFriedrichs => {
            let mut u = RealField::new(u0.clone())?;
            tracker.push(0, u.values(), None)?;
            for s in 1..=disc.steps {
                u = lax_friedrichs_step(&u, problem.flux, disc.alpha, disc.dt, disc.dx)
                    .map_err(|e| restep(e, s))?;
                tracker.push(s, u.values(), None)?;
            }
            (u.into_values(), None)
        }
        Scheme::Weno5Rk3 => {
            let ScalarFlux::Advection { speed } = problem.flux else {
                return Err(FqnmError::Config("the WENO5 baseline covers linear advection only".into()));
            };
            let mut stepper = Weno5Rk3::new(speed, disc.dt, disc.dx, n)?;
            let mut u = u0.clone();
            tracker.push(0, &u, None)?;
            for s in 1..=disc.steps {
                stepper.step(&mut u)?;
                tracker.push(s, &u, None)?;
            }
            (u, None)
        }
    };

    let reference = problem.reference_at(problem.final_time);
    Ok(RunRecord {
        scheme: config.scheme.to_string(),
        metadata,
        x: cell_centres(n),
        dt: disc.dt,
        steps: disc.steps,
        initial: u0,
        final_values,
        final_states,
        reference,
        diagnostics: tracker.diagnostics,
        snapshots: tracker.snapshots,
        violations,
        warnings,
    })
}

fn restep(e: FqnmError, step: usize) -> FqnmError {
    match e {
        FqnmError::NonFiniteState { cell, .. } => FqnmError::NonFiniteState { step, cell },
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn packet_is_zero_where_the_sine_vanishes() {
        assert!(packet(0.5, 2.0, 0.1, 0.5).abs() < 1e-15);
    }

    #[test]
    fn packet_reports_nyquist() {
        let p = gaussian_packet_ic(64, 32.0, 0.1, 0.5).unwrap();
        assert!((p.k0_dx - PI).abs() < 1e-15);
        assert!(!p.beyond_nyquist());
        assert!(gaussian_packet_ic(64, 33.0, 0.1, 0.5).unwrap().beyond_nyquist());
        assert!(gaussian_packet_ic(64, 0.5, 0.1, 0.5).is_err());
        assert!(gaussian_packet_ic(64, 4.0, 0.5, 0.5).is_err());
    }

    #[test]
    fn packet_is_bounded_and_localised() {
        let p = gaussian_packet_ic(256, 32.0, 0.1, 0.5).unwrap();
        assert!(p.values.iter().all(|v| v.abs() <= 1.0));
        let xs = cell_centres(256);
        let total: f64 = p.values.iter().map(|v| v * v).sum();
        let inner: f64 = xs
            .iter()
            .zip(&p.values)
            .filter(|(x, _)| (**x - 0.5).abs() <= 0.4)
            .map(|(_, v)| v * v)
            .sum();
        assert!(inner / total > 0.99);
    }

    #[test]
    fn burgers_data_mean_and_range() {
        let u = burgers_ic(128);
        let mean = u.iter().sum::<f64>() / 128.0;
        assert!((mean - 0.5).abs() < 1e-14);
        let (lo, hi) = u.iter().fold((f64::MAX, f64::MIN), |(a, b), &v| (a.min(v), b.max(v)));
        assert!((hi - 1.5).abs() < 1e-3 && (lo + 0.5).abs() < 1e-3);
        for (i, v) in u.iter().enumerate() {
            let x = (i as f64 + 0.5) / 128.0;
            assert_eq!(*v, 0.5 + (2.0 * PI * x).sin());
        }
    }

    #[test]
    fn uniform_steps_hit_final_time() {
        let (steps, dt) = uniform_steps(0.35, 1.0 / 128.0, 1.65, 0.9);
        assert!((steps as f64 * dt - 0.35).abs() < 1e-14);
        assert!(1.65 * dt * 128.0 <= 0.9);
        assert_eq!(uniform_steps(1.0, 1.0 / 256.0, 1.0, 1.0), (256, 1.0 / 256.0));
    }

    #[test]
    fn unit_cfl_advection_returns_after_one_period() {
        let p = ScalarProblem::advection_packet(64, 4.0, 1.0, 1.0);
        let r = run(&p, &RunConfig::new(Scheme::Fqnm, 1.0)).unwrap();
        assert_eq!(r.steps, 64);
        let q0 = quantise(&r.initial, Resolution::new(r.meta("delta_used").unwrap().parse().unwrap()).unwrap()).unwrap();
        assert_eq!(r.final_states.as_deref().unwrap(), q0.states());
    }

    #[test]
    fn burgers_fqnm_conserves_integer_mass() {
        let p = ScalarProblem::burgers(128, 0.35, 256);
        let mut cfg = RunConfig::new(Scheme::Fqnm, 0.9);
        cfg.track_entropy = true;
        let r = run(&p, &cfg).unwrap();
        let trace = r.integer_mass_trace().unwrap();
        assert_eq!(trace.len(), r.steps + 1);
        assert!(trace.iter().all(|&m| m == trace[0]));
        assert!(r.diagnostics[1].rho_defect.is_finite());
    }

    #[test]
    fn cfl_above_one_is_refused() {
        let p = ScalarProblem::burgers(64, 0.1, 64);
        let err = run(&p, &RunConfig::new(Scheme::UpwindFv, 1.2)).unwrap_err();
        assert!(matches!(err, FqnmError::CflViolation { .. }));
    }

    #[test]
    fn weno_rejects_burgers() {
        let p = ScalarProblem::burgers(64, 0.1, 64);
        assert!(run(&p, &RunConfig::new(Scheme::Weno5Rk3, 0.5)).is_err());
    }

    #[test]
    fn schemes_parse_by_name() {
        for s in Scheme::ALL {
            assert_eq!(s.name().parse::<Scheme>().unwrap(), s);
        }
        assert!("roe".parse::<Scheme>().is_err());
    }

    #[test]
    fn lf_and_upwind_agree_for_advection() {
        let p = ScalarProblem::advection_packet(64, 3.0, 1.0, 0.25);
        let a = run(&p, &RunConfig::new(Scheme::UpwindFv, 0.5)).unwrap();
        let b = run(&p, &RunConfig::new(Scheme::LaxFriedrichs, 0.5)).unwrap();
        for (x, y) in a.final_values.iter().zip(&b.final_values) {
            assert!((x - y).abs() < 1e-13);
        }
    }
}
