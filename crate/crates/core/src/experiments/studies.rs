use std::f64::consts::PI;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::baselines::UpwindStepper;
use crate::diagnostics::{cell_distance, steepest_descent_cell, transition_width};
use crate::error::{FqnmError, Result};
use crate::euler::{run_sod, SodRun, SodSetup};
use crate::flux::ScalarFlux;
use crate::problems::{burgers_ic, run, RunConfig, ScalarProblem, Scheme, DEFAULT_LEVELS};
use crate::quantise::{quantise, QuantisedField, Resolution};
use crate::record::RunRecord;
use crate::references::{sod_star_state, StarState};
use crate::timing::{fit_through_origin, LinearFit, TimingConfig, TimingReport};
use crate::transfer::{
    alpha_for_range, build_transfer_maps, disagreement_set, first_disagreement, lax_friedrichs_split,
    quantised_two_point_flux, run_recording_visits, step_counted, trajectories_identical, TabulatedStep,
    EquivalenceReport, OpCounts, SchemeParams,
};

/// Target bands as fractions of pi: `k0 dx = r pi`.
pub const BAND_FRACTIONS: [f64; 4] = [0.125, 0.25, 0.5, 0.75];

/// Grids realising every band; the frequency is `f = r n / 2`.
pub const BAND_GRIDS: [usize; 3] = [128, 256, 512];

/// Cells on either side of the reference shock searched for the transition.
const SHOCK_WINDOW: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct BandRun {
    pub band: usize,
    pub n_x: usize,
    pub frequency: f64,
    pub k0_dx: f64,
    pub scheme: Scheme,
    pub l2rel: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BandSummary {
    pub band: usize,
    /// Nominal `k0 dx` of the band.
    pub k0_dx: f64,
    pub scheme: Scheme,
    pub count: usize,
    pub median: f64,
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BandSweep {
    pub runs: Vec<BandRun>,
    pub summaries: Vec<BandSummary>,
    /// Grid/band pairs beyond Nyquist that were not run.
    pub skipped: Vec<String>,
}

impl BandSweep {
    pub fn summary(&self, band: usize, scheme: Scheme) -> Option<&BandSummary> {
        self.summaries.iter().find(|s| s.band == band && s.scheme == scheme)
    }
}

/// Relative L2 error after advecting a Gaussian packet for `t_final` at
/// every `(band, grid, scheme)` combination. Runs execute in parallel.
pub fn band_sweep(
    schemes: &[Scheme],
    grids: &[usize],
    fractions: &[f64],
    cfl: f64,
    t_final: f64,
    speed: f64,
    delta: Option<f64>,
) -> Result<BandSweep> {
    let mut jobs = Vec::new();
    let mut skipped = Vec::new();
    for (b, &r) in fractions.iter().enumerate() {
        for &n in grids {
            let f = r * n as f64 / 2.0;
            if r > 1.0 || f < 1.0 {
                skipped.push(format!("band {b} on {n} cells (f = {f}) is not representable"));
                continue;
            }
            for &s in schemes {
                jobs.push((b, n, f, s));
            }
        }
    }
    let runs = jobs
        .into_par_iter()
        .map(|(band, n_x, frequency, scheme)| {
            let problem = ScalarProblem::advection_packet(n_x, frequency, speed, t_final);
            let mut cfg = RunConfig::new(scheme, cfl);
            cfg.delta = delta;
            let rec = run(&problem, &cfg)?;
            let reference = rec.reference.as_ref().expect("packet runs carry a reference");
            Ok(BandRun {
                band,
                n_x,
                frequency,
                k0_dx: 2.0 * PI * frequency / n_x as f64,
                scheme,
                l2rel: crate::diagnostics::relative_l2_error(&rec.final_values, reference),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut summaries = Vec::new();
    for (b, &r) in fractions.iter().enumerate() {
        for &s in schemes {
            let errs: Vec<f64> = runs.iter().filter(|x| x.band == b && x.scheme == s).map(|x| x.l2rel).collect();
            if errs.is_empty() {
                continue;
            }
            summaries.push(BandSummary {
                band: b,
                k0_dx: r * PI,
                scheme: s,
                count: errs.len(),
                median: crate::timing::median(&errs),
                min: errs.iter().copied().fold(f64::INFINITY, f64::min),
                max: errs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            });
        }
    }
    Ok(BandSweep { runs, summaries, skipped })
}

/// One `(rho defect, entropy change)` sample after shock formation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyPair {
    pub step: usize,
    pub time: f64,
    pub entropy: f64,
    pub rho_defect: f64,
    pub delta_s: f64,
}

#[derive(Debug, Clone)]
pub struct BurgersComparison {
    pub fqnm: RunRecord,
    pub fd: RunRecord,
    pub reference: Vec<f64>,
    pub reference_cell: usize,
    pub fqnm_cell: usize,
    pub fd_cell: usize,
    /// Reference values on either side of the shock.
    pub jump: (f64, f64),
    pub fqnm_width: usize,
    pub fd_width: usize,
    pub entropy_pairs: Vec<EntropyPair>,
}

impl BurgersComparison {
    pub fn fqnm_offset(&self) -> usize {
        cell_distance(self.fqnm_cell, self.reference_cell, self.reference.len())
    }
}

fn periodic_window(values: &[f64], center: usize, before: usize, after: usize) -> Vec<f64> {
    let n = values.len();
    (0..before + after + 1).map(|k| values[(center + n * (before + 1) + k - before) % n]).collect()
}

/// Shock formation time `1 / max(-u0')` for `0.5 + sin(2 pi x)`.
pub const BURGERS_SHOCK_TIME: f64 = 1.0 / (2.0 * PI);

/// FQNM against the upwind split baseline on the sine data, with shock
/// placement and width measured against the Hopf-Lax reference.
pub fn burgers_comparison(
    cells: usize,
    t_final: f64,
    cfl: f64,
    delta: Option<f64>,
    candidates: usize,
    record_every: usize,
) -> Result<BurgersComparison> {
    let problem = ScalarProblem::burgers(cells, t_final, candidates);
    let mut cfg = RunConfig::new(Scheme::Fqnm, cfl);
    cfg.delta = delta;
    cfg.record_every = record_every;
    cfg.track_entropy = true;
    let (fqnm, fd) = rayon::join(
        || run(&problem, &cfg),
        || {
            let mut c = cfg.clone();
            c.scheme = Scheme::UpwindFv;
            c.track_entropy = false;
            run(&problem, &c)
        },
    );
    let (fqnm, fd) = (fqnm?, fd?);
    let reference = fqnm.reference.clone().expect("burgers runs carry a reference");
    let s = steepest_descent_cell(&reference);
    let jump = (reference[s], reference[(s + 1) % cells]);
    let width = |v: &[f64]| {
        let w = periodic_window(v, s, SHOCK_WINDOW, SHOCK_WINDOW + 1);
        transition_width(&w, 0..w.len(), jump.1, jump.0)
    };
    let entropy_pairs = fqnm
        .diagnostics
        .windows(2)
        .filter(|w| w[1].time >= BURGERS_SHOCK_TIME)
        .map(|w| EntropyPair {
            step: w[1].step,
            time: w[1].time,
            entropy: w[1].entropy,
            rho_defect: w[1].rho_defect,
            delta_s: w[1].entropy - w[0].entropy,
        })
        .collect();
    Ok(BurgersComparison {
        fqnm_cell: steepest_descent_cell(&fqnm.final_values),
        fd_cell: steepest_descent_cell(&fd.final_values),
        fqnm_width: width(&fqnm.final_values),
        fd_width: width(&fd.final_values),
        reference_cell: s,
        jump,
        reference,
        fqnm,
        fd,
        entropy_pairs,
    })
}

#[derive(Debug, Clone)]
pub struct SodComparison {
    pub run: SodRun,
    pub star: StarState,
    pub l1_roe: f64,
    pub l1_fqnm: f64,
    pub width_roe: usize,
    pub width_fqnm: usize,
    /// Total quanta change by exactly the boundary transfers at every step.
    pub bookkeeping_exact: bool,
    /// Total quanta identical at every step.
    pub quanta_constant: bool,
    /// Largest `|M_n - M_0|` of the floating-point run's mass.
    pub roe_mass_drift: f64,
}

pub fn sod_comparison(setup: &SodSetup) -> Result<SodComparison> {
    let run = run_sod(setup)?;
    let star = sod_star_state(&setup.left, &setup.right, setup.gamma)?;
    let bookkeeping_exact = run
        .boundary_trace
        .iter()
        .zip(run.quanta_trace.windows(2))
        .all(|(b, w)| w[1] == w[0] + b.left_in - b.right_out);
    let quanta_constant = run.quanta_trace.iter().all(|&q| q == run.quanta_trace[0]);
    let m0 = run.roe_mass_trace[0];
    let roe_mass_drift = run.roe_mass_trace.iter().map(|m| (m - m0).abs()).fold(0.0, f64::max);
    Ok(SodComparison {
        l1_roe: run.l1_density_error(&run.roe),
        l1_fqnm: run.l1_density_error(&run.fqnm),
        width_roe: run.shock_width(&run.roe)?,
        width_fqnm: run.shock_width(&run.fqnm)?,
        star,
        bookkeeping_exact,
        quanta_constant,
        roe_mass_drift,
        run,
    })
}

/// One Burgers initial state in the equivalence study.
#[derive(Debug, Clone, PartialEq)]
pub struct BurgersCase {
    /// Half-width of the uniform noise around the base level.
    pub amplitude: i64,
    pub initial: Vec<i64>,
    pub visited: usize,
    /// First visited pair on which the Godunov and LF tables differ.
    pub disagreement: Option<(i64, i64)>,
    pub report: EquivalenceReport,
    /// The divergence pair was visited and the tables differ there.
    pub witnessed: bool,
}

impl BurgersCase {
    pub fn agree_on_visited(&self) -> bool {
        self.disagreement.is_none()
    }

    /// Identical trajectories exactly when the tables agree on the visited set.
    pub fn consistent(&self) -> bool {
        self.agree_on_visited() == self.report.identical && (self.report.identical || self.witnessed)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceStudy {
    pub advection: Vec<EquivalenceReport>,
    pub burgers: Vec<BurgersCase>,
    /// Pairs in `[-10, 10]^2` on which the Burgers tables differ.
    pub table_disagreements: Vec<(i64, i64)>,
}

/// Noise amplitudes cycled through the Burgers cases, so both agreeing and
/// disagreeing visited sets occur.
const EQUIVALENCE_AMPLITUDES: [i64; 8] = [0, 1, 2, 3, 5, 8, 13, 40];

/// Godunov against Lax-Friedrichs quantised fluxes: linear advection at
/// `nu = 0.4` (no rounding ties) and Burgers at the given CFL number.
pub fn equivalence_study(cases: usize, cells: usize, steps: usize, seed: u64, delta: f64, cfl: f64) -> Result<EquivalenceStudy> {
    let res = Resolution::new(delta)?;
    let dx = 1.0 / cells as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let adv = ScalarFlux::Advection { speed: 1.0 };
    let p_adv = SchemeParams::new(res, dx, 0.4 * dx, 1.0)?;
    let g_adv = quantised_two_point_flux(move |l, r| adv.godunov(l, r), &p_adv);
    let lf_adv = quantised_two_point_flux(move |l, r| adv.lax_friedrichs(l, r, 1.0), &p_adv);
    let mut advection = Vec::with_capacity(cases);
    for _ in 0..cases {
        let q: Vec<i64> = (0..cells).map(|_| rng.gen_range(-100..=100)).collect();
        let q0 = QuantisedField::new(q, res)?;
        advection.push(trajectories_identical(&g_adv, &lf_adv, &q0, steps)?);
    }

    let burgers = ScalarFlux::Burgers;
    let alpha = alpha_for_range(burgers, -0.5, 1.5, crate::problems::BURGERS_ALPHA_INFLATION);
    let p_b = SchemeParams::new(res, dx, cfl * dx / alpha, alpha)?;
    p_b.require_monotone()?;
    let g_b = quantised_two_point_flux(move |l, r| burgers.godunov(l, r), &p_b);
    let lf_b = quantised_two_point_flux(move |l, r| burgers.lax_friedrichs(l, r, alpha), &p_b);
    let table_disagreements = disagreement_set(&g_b, &lf_b, -10, 10);
    let mut out = Vec::with_capacity(cases);
    for k in 0..cases {
        let amplitude = EQUIVALENCE_AMPLITUDES[k % EQUIVALENCE_AMPLITUDES.len()];
        // levels stay inside [-0.5, 1.5] / delta
        let lo = (-0.5 / delta).ceil() as i64 + amplitude;
        let hi = (1.5 / delta).floor() as i64 - amplitude;
        let base = rng.gen_range(lo.min(hi)..=hi.max(lo));
        let initial: Vec<i64> = (0..cells).map(|_| base + rng.gen_range(-amplitude..=amplitude)).collect();
        let q0 = QuantisedField::new(initial.clone(), res)?;
        let (_, visited) = run_recording_visits(&q0, &g_b, steps)?;
        let report = trajectories_identical(&g_b, &lf_b, &q0, steps)?;
        let witnessed = report.divergence.as_ref().is_some_and(|d| {
            visited.contains(d.ql, d.qr) && d.flux_first != d.flux_second
        });
        out.push(BurgersCase {
            amplitude,
            initial,
            visited: visited.len(),
            disagreement: first_disagreement(&g_b, &lf_b, &visited),
            report,
            witnessed,
        });
    }
    Ok(EquivalenceStudy {
        advection,
        burgers: out,
        table_disagreements,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchLadder {
    pub fqnm: Vec<TimingReport>,
    pub upwind: Vec<TimingReport>,
    pub fqnm_fit: LinearFit,
    pub upwind_fit: LinearFit,
}

/// Cell updates per timed block, so small grids are timed over many steps.
const BENCH_WORK_PER_BLOCK: usize = 1 << 22;

/// Tabulated FQNM kernel and upwind baseline set up on the same Burgers
/// sine data, ready to be timed in blocks.
struct KernelPair {
    n: usize,
    kernel: TabulatedStep,
    q: Vec<i64>,
    scratch: Vec<i64>,
    ops: OpCounts,
    stepper: UpwindStepper,
    u: Vec<f64>,
}

impl KernelPair {
    fn new(n: usize, cfl: f64) -> Result<Self> {
        let u0 = burgers_ic(n);
        let (lo, hi) = u0.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &u| (a.min(u), b.max(u)));
        let alpha = alpha_for_range(ScalarFlux::Burgers, lo, hi, crate::problems::BURGERS_ALPHA_INFLATION);
        let dx = 1.0 / n as f64;
        let dt = cfl * dx / alpha;
        let res = Resolution::new((hi - lo) / DEFAULT_LEVELS)?;
        let params = SchemeParams::new(res, dx, dt, alpha)?;
        let split = lax_friedrichs_split(ScalarFlux::Burgers, alpha, lo, hi)?;
        let q0 = quantise(&u0, res)?;
        let (qlo, qhi) = q0.min_max();
        let margin = (qhi - qlo) / 4;
        let maps = build_transfer_maps(split, &params).tabulated(qlo - margin, qhi + margin);
        let kernel = TabulatedStep::new(maps.clone(), qlo - margin, qhi + margin)?;

        let mut ops = OpCounts::default();
        let mut probe = q0.states().to_vec();
        let mut scratch = vec![0i64; n];
        step_counted(&mut probe, &mut scratch, &maps, &mut ops)?;
        Ok(Self {
            n,
            kernel,
            q: q0.into_states(),
            scratch,
            ops,
            stepper: UpwindStepper::new(split, dt, dx, n)?,
            u: u0,
        })
    }

    /// Seconds per step of each scheme over one block of `steps` steps.
    fn time_block(&mut self, steps: usize) -> Result<(f64, f64)> {
        let t = Instant::now();
        for _ in 0..steps {
            self.kernel.step(&mut self.q, &mut self.scratch)?;
        }
        let f = t.elapsed().as_secs_f64() / steps as f64;
        let t = Instant::now();
        for _ in 0..steps {
            self.stepper.step(&mut self.u);
        }
        let u = t.elapsed().as_secs_f64() / steps as f64;
        crate::baselines::ensure_finite(&self.u, steps)?;
        Ok((f, u))
    }

    fn reports(&self, timing: &TimingConfig, f: Vec<f64>, u: Vec<f64>) -> (TimingReport, TimingReport) {
        let u_report = TimingReport::new("upwind", self.n, timing, u, UpwindStepper::op_counts(self.n));
        let f_report = TimingReport::new("fqnm", self.n, timing, f, self.ops);
        (f_report.with_speedup_over(&u_report), u_report)
    }
}

/// Times one tabulated FQNM step and one upwind split step on `n` cells of
/// Burgers sine data; the FQNM report carries the speedup over upwind.
pub fn time_burgers_kernels(n: usize, timing: &TimingConfig, cfl: f64) -> Result<(TimingReport, TimingReport)> {
    timing.validate()?;
    let mut pair = KernelPair::new(n, cfl)?;
    for _ in 0..timing.warmups {
        pair.time_block(timing.steps_per_block)?;
    }
    let (mut f, mut u) = (Vec::new(), Vec::new());
    for _ in 0..timing.repetitions {
        let (a, b) = pair.time_block(timing.steps_per_block)?;
        f.push(a);
        u.push(b);
    }
    Ok(pair.reports(timing, f, u))
}

/// Per-step wall time of the tabulated FQNM step and the upwind split
/// baseline on Burgers data over `2^min_log2 ..= 2^max_log2` cells.
///
/// Repetitions run round-robin over the sizes so slow drift in machine
/// speed lands on every size alike instead of bending the fit.
pub fn bench_ladder(min_log2: u32, max_log2: u32, repetitions: usize, warmups: usize, cfl: f64) -> Result<BenchLadder> {
    if min_log2 > max_log2 || max_log2 > 26 {
        return Err(FqnmError::Config(format!("bad ladder 2^{min_log2}..2^{max_log2}")));
    }
    let mut rungs = Vec::new();
    for k in min_log2..=max_log2 {
        let n = 1usize << k;
        let timing = TimingConfig {
            warmups,
            repetitions,
            steps_per_block: (BENCH_WORK_PER_BLOCK / n).max(1),
        };
        timing.validate()?;
        rungs.push((KernelPair::new(n, cfl)?, timing, Vec::new(), Vec::new()));
    }
    for rep in 0..warmups + repetitions {
        for (pair, timing, f, u) in rungs.iter_mut() {
            let (a, b) = pair.time_block(timing.steps_per_block)?;
            if rep >= warmups {
                f.push(a);
                u.push(b);
            }
        }
    }
    let (fqnm, upwind): (Vec<_>, Vec<_>) = rungs.into_iter().map(|(pair, timing, f, u)| pair.reports(&timing, f, u)).unzip();
    let fit = |r: &[TimingReport]| {
        let ns: Vec<f64> = r.iter().map(|x| x.n_cells as f64).collect();
        let ts: Vec<f64> = r.iter().map(|x| x.median).collect();
        fit_through_origin(&ns, &ts)
    };
    Ok(BenchLadder {
        fqnm_fit: fit(&fqnm),
        upwind_fit: fit(&upwind),
        fqnm,
        upwind,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn periodic_window_wraps() {
        let v: Vec<f64> = (0..10).map(f64::from).collect();
        assert_eq!(periodic_window(&v, 1, 2, 3), vec![9.0, 0.0, 1.0, 2.0, 3.0, 4.0]);
        assert_eq!(periodic_window(&v, 9, 1, 1), vec![8.0, 9.0, 0.0]);
    }

    #[test]
    fn single_realisation_band_is_degenerate() {
        let s = band_sweep(&[Scheme::Fqnm], &[64], &[0.25], 1.0, 0.25, 1.0, None).unwrap();
        let b = s.summary(0, Scheme::Fqnm).unwrap();
        assert_eq!(b.count, 1);
        assert_eq!(b.median, b.min);
        assert_eq!(b.min, b.max);
    }

    #[test]
    fn small_equivalence_study_is_consistent() {
        let s = equivalence_study(8, 16, 10, 5, 0.01, 0.8).unwrap();
        assert!(s.advection.iter().all(|r| r.identical));
        assert!(s.burgers.iter().all(BurgersCase::consistent));
        assert!(!s.table_disagreements.is_empty());
    }
}
