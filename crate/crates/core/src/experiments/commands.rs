use std::path::{Path, PathBuf};

use super::spec::{Experiment, ExperimentSpec};
use super::studies::{
    band_sweep, bench_ladder, burgers_comparison, equivalence_study, sod_comparison, time_burgers_kernels,
    BAND_FRACTIONS, BAND_GRIDS,
};
use super::Outcome;
use crate::error::Result;
use crate::euler::{SodRun, SodSetup};
use crate::problems::{run, RunConfig, ScalarProblem, Scheme};
use crate::record::{real, CsvTable};
use crate::references::sod_states;
use crate::timing::{TimingConfig, TimingReport};

fn emit(outcome: &mut Outcome, dir: &Path, name: &str, table: &CsvTable) -> Result<()> {
    let path: PathBuf = dir.join(name);
    table.write(&path)?;
    outcome.files.push(path);
    Ok(())
}

fn table_for(spec: &ExperimentSpec, columns: &[&str]) -> CsvTable {
    let mut t = CsvTable::new(columns.iter().copied());
    t.comments_from(&spec.to_pairs());
    t
}

/// Adds the full spec as comment lines to a table built elsewhere.
fn with_spec(spec: &ExperimentSpec, mut t: CsvTable) -> CsvTable {
    t.comments_from(&spec.to_pairs());
    t
}

pub fn run_experiment(spec: &ExperimentSpec) -> Result<Outcome> {
    spec.validate()?;
    match spec.experiment {
        Experiment::Advect => cmd_advect(spec),
        Experiment::BandSweep => cmd_band_sweep(spec),
        Experiment::Burgers => cmd_burgers(spec),
        Experiment::Sod => cmd_sod(spec),
        Experiment::Equivalence => cmd_equivalence(spec),
        Experiment::Bench => cmd_bench(spec),
    }
}

/// Gaussian packet advection with every selected scheme.
pub fn cmd_advect(spec: &ExperimentSpec) -> Result<Outcome> {
    spec.validate()?;
    let mut out = Outcome::default();
    let problem = ScalarProblem::advection_packet(spec.cells, spec.frequency, spec.speed, spec.t_final);
    for &scheme in &spec.schemes {
        let mut cfg = RunConfig::new(scheme, spec.cfl);
        cfg.delta = spec.delta;
        cfg.record_every = spec.record_every;
        cfg.track_entropy = scheme == Scheme::Fqnm;
        let rec = run(&problem, &cfg)?;
        for w in &rec.warnings {
            out.line(format!("warning: {w}"));
        }
        let last = rec.diagnostics.last().expect("at least the initial row");
        out.line(format!("{scheme}: steps={} l2rel={}", rec.steps, real(last.l2rel_vs_ref)));
        if let Some(trace) = rec.integer_mass_trace() {
            let constant = trace.iter().all(|&m| m == trace[0]);
            out.check("fqnm mass constant", constant, format!("initial mass {}", trace[0]));
            out.line(format!("{scheme}: {} maximum-principle/TVD violations recorded", rec.violations.len()));
        }
        let mut prof = rec.profile_table();
        prof.comments_from(&spec.to_pairs());
        emit(&mut out, &spec.out, &format!("advect_{scheme}_profile.csv"), &prof)?;
        emit(&mut out, &spec.out, &format!("advect_{scheme}_diagnostics.csv"), &with_spec(spec, rec.diagnostics_table()))?;
        if spec.record_every > 0 {
            emit(&mut out, &spec.out, &format!("advect_{scheme}_snapshots.csv"), &with_spec(spec, rec.snapshots_table()))?;
        }
    }
    Ok(out)
}

/// Relative L2 error per normalised-frequency band.
pub fn cmd_band_sweep(spec: &ExperimentSpec) -> Result<Outcome> {
    spec.validate()?;
    let mut out = Outcome::default();
    // cells = 0 sweeps the standard grids; a single grid gives one realisation per band
    let grids = if spec.cells == 0 { BAND_GRIDS.to_vec() } else { vec![spec.cells] };
    let sweep = band_sweep(&spec.schemes, &grids, &BAND_FRACTIONS, spec.cfl, spec.t_final, spec.speed, spec.delta)?;
    for s in &sweep.skipped {
        out.line(format!("skipped: {s}"));
    }
    let mut runs = table_for(spec, &["band", "k0_dx", "n_x", "f", "scheme", "l2rel"]);
    for r in &sweep.runs {
        runs.push_row(vec![
            r.band.to_string(),
            real(r.k0_dx),
            r.n_x.to_string(),
            real(r.frequency),
            r.scheme.to_string(),
            real(r.l2rel),
        ]);
    }
    let mut summary = table_for(spec, &["band", "k0_dx", "scheme", "realizations", "median", "min", "max"]);
    for s in &sweep.summaries {
        summary.push_row(vec![
            s.band.to_string(),
            real(s.k0_dx),
            s.scheme.to_string(),
            s.count.to_string(),
            real(s.median),
            real(s.min),
            real(s.max),
        ]);
        out.line(format!(
            "k0dx={:.4} {:>8}: median={:.3e} min={:.3e} max={:.3e}",
            s.k0_dx, s.scheme, s.median, s.min, s.max
        ));
    }
    let top = BAND_FRACTIONS.len() - 1;
    if let (Some(f), Some(w)) = (sweep.summary(top, Scheme::Fqnm), sweep.summary(top, Scheme::Weno5Rk3)) {
        out.check(
            "highest band: fqnm median below weno5rk3 median",
            f.median < w.median,
            format!("{:.3e} vs {:.3e}", f.median, w.median),
        );
    }
    emit(&mut out, &spec.out, "band_sweep_runs.csv", &runs)?;
    emit(&mut out, &spec.out, "band_sweep.csv", &summary)?;
    Ok(out)
}

fn timing_table(spec: &ExperimentSpec, reports: &[&TimingReport]) -> CsvTable {
    let mut t = table_for(
        spec,
        &[
            "scheme", "n_cells", "steps", "median_s", "samples_s", "speedup_vs", "speedup", "int_add", "int_sub",
            "map_evals", "real_flux_evals", "real_mul", "real_add",
        ],
    );
    for r in reports {
        let samples: Vec<String> = r.samples.iter().map(|&s| real(s)).collect();
        let (vs, speedup) = r
            .speedup
            .as_ref()
            .map_or((String::new(), String::new()), |(b, s)| (b.clone(), real(*s)));
        t.push_row(vec![
            r.scheme.clone(),
            r.n_cells.to_string(),
            r.steps.to_string(),
            real(r.median),
            samples.join(";"),
            vs,
            speedup,
            r.ops.int_add.to_string(),
            r.ops.int_sub.to_string(),
            r.ops.map_evals.to_string(),
            r.ops.real_flux_evals.to_string(),
            r.ops.real_mul.to_string(),
            r.ops.real_add.to_string(),
        ]);
    }
    t
}

/// FQNM against the upwind baseline past shock formation.
pub fn cmd_burgers(spec: &ExperimentSpec) -> Result<Outcome> {
    spec.validate()?;
    let mut out = Outcome::default();
    let cmp = burgers_comparison(spec.cells, spec.t_final, spec.cfl, spec.delta, spec.candidates, spec.record_every)?;
    let q = cmp.fqnm.final_states.as_ref().expect("quantised run");
    let mut prof = table_for(spec, &["x", "u0", "u_fqnm", "u_fd", "u_ref", "q_fqnm"]);
    for i in 0..spec.cells {
        prof.push_row(vec![
            real(cmp.fqnm.x[i]),
            real(cmp.fqnm.initial[i]),
            real(cmp.fqnm.final_values[i]),
            real(cmp.fd.final_values[i]),
            real(cmp.reference[i]),
            q[i].to_string(),
        ]);
    }
    prof.comment("reference_shock_cell", cmp.reference_cell)
        .comment("fqnm_shock_cell", cmp.fqnm_cell)
        .comment("fd_shock_cell", cmp.fd_cell)
        .comment("fqnm_width", cmp.fqnm_width)
        .comment("fd_width", cmp.fd_width);
    emit(&mut out, &spec.out, "burgers_profile.csv", &prof)?;
    emit(&mut out, &spec.out, "burgers_diagnostics_fqnm.csv", &with_spec(spec, cmp.fqnm.diagnostics_table()))?;
    emit(&mut out, &spec.out, "burgers_diagnostics_fd.csv", &with_spec(spec, cmp.fd.diagnostics_table()))?;
    let mut ent = table_for(spec, &["step", "time", "S", "rho_defect", "dS"]);
    for p in &cmp.entropy_pairs {
        ent.push_row(vec![p.step.to_string(), real(p.time), real(p.entropy), real(p.rho_defect), real(p.delta_s)]);
    }
    emit(&mut out, &spec.out, "burgers_entropy.csv", &ent)?;

    out.line(format!(
        "shock cell: reference {} fqnm {} fd {}; width fqnm {} fd {}",
        cmp.reference_cell, cmp.fqnm_cell, cmp.fd_cell, cmp.fqnm_width, cmp.fd_width
    ));
    out.check(
        "fqnm shock within one cell of the reference",
        cmp.fqnm_offset() <= 1,
        format!("offset {}", cmp.fqnm_offset()),
    );
    out.check(
        "fqnm shock width not above the baseline",
        cmp.fqnm_width <= cmp.fd_width,
        format!("{} vs {}", cmp.fqnm_width, cmp.fd_width),
    );
    let trace = cmp.fqnm.integer_mass_trace().expect("quantised run");
    out.check("fqnm mass constant", trace.iter().all(|&m| m == trace[0]), format!("mass {}", trace[0]));
    let fd_mass: Vec<f64> = cmp.fd.diagnostics.iter().map(|d| d.mass).collect();
    let drift = fd_mass.iter().map(|m| (m - fd_mass[0]).abs()).fold(0.0, f64::max);
    out.line(format!("baseline mass drift {drift:.3e}"));
    out.line(format!("fqnm maximum-principle/TVD violations recorded: {}", cmp.fqnm.violations.len()));
    let small: Vec<_> = cmp.entropy_pairs.iter().filter(|p| p.rho_defect < 0.1).collect();
    let rising = small.iter().filter(|p| p.delta_s >= 0.0).count();
    out.line(format!(
        "post-shock steps with rho_defect < 0.1: {} (entropy nondecreasing on {})",
        small.len(),
        rising
    ));

    let timing = TimingConfig {
        warmups: spec.warmups,
        repetitions: spec.repetitions.max(crate::timing::MIN_REPETITIONS),
        steps_per_block: ((1usize << 20) / spec.cells).max(1),
    };
    let (f, u) = time_burgers_kernels(spec.cells, &timing, spec.cfl)?;
    if let Some((_, s)) = &f.speedup {
        out.line(format!("timing per step: fqnm {:.3e} s, upwind {:.3e} s, speedup {s:.2}x", f.median, u.median));
    }
    emit(&mut out, &spec.out, "burgers_timing.csv", &timing_table(spec, &[&f, &u]))?;
    Ok(out)
}

fn sod_row(run: &SodRun, i: usize) -> Vec<String> {
    let (f, r, e) = (run.fqnm[i], run.roe[i], run.exact[i]);
    [run.x[i], f.rho, r.rho, e.rho, f.u, r.u, e.u, f.p, r.p, e.p].into_iter().map(real).collect()
}

const SOD_COLUMNS: [&str; 10] = ["x", "rho_fqnm", "rho_roe", "rho_exact", "u_fqnm", "u_roe", "u_exact", "p_fqnm", "p_roe", "p_exact"];

/// Paired Roe / density-quantised shock tube against the exact solution.
pub fn cmd_sod(spec: &ExperimentSpec) -> Result<Outcome> {
    spec.validate()?;
    let (left, right) = sod_states();
    let setup = SodSetup {
        cells: spec.cells,
        t_final: spec.t_final,
        cfl: spec.cfl,
        delta_rho: spec.delta.unwrap_or(left.rho / 1000.0),
        left,
        right,
        ..SodSetup::default()
    };
    sod_outcome(spec, &setup)
}

pub(crate) fn sod_outcome(spec: &ExperimentSpec, setup: &SodSetup) -> Result<Outcome> {
    let mut out = Outcome::default();
    let cmp = sod_comparison(setup)?;
    let metrics = [
        ("time_steps", cmp.run.steps.to_string()),
        ("dt", real(cmp.run.dt)),
        ("max_cfl", real(cmp.run.max_cfl)),
        ("p_star", real(cmp.star.pressure)),
        ("u_star", real(cmp.star.velocity)),
        ("l1_rho_roe", real(cmp.l1_roe)),
        ("l1_rho_fqnm", real(cmp.l1_fqnm)),
        ("width_roe", cmp.width_roe.to_string()),
        ("width_fqnm", cmp.width_fqnm.to_string()),
    ];
    let mut full = table_for(spec, &SOD_COLUMNS);
    let mut zoom = table_for(spec, &SOD_COLUMNS);
    for (k, v) in &metrics {
        full.comment(*k, v);
        zoom.comment(*k, v);
    }
    for i in 0..cmp.run.x.len() {
        full.push_row(sod_row(&cmp.run, i));
        let x = cmp.run.x[i];
        if x >= spec.zoom_lo && x <= spec.zoom_hi {
            zoom.push_row(sod_row(&cmp.run, i));
        }
    }
    emit(&mut out, &spec.out, "sod_profile.csv", &full)?;
    emit(&mut out, &spec.out, "sod_zoom.csv", &zoom)?;
    out.line(format!(
        "star state p*={:.6} u*={:.6} rho*L={:.6} rho*R={:.6} ({} Newton iterations)",
        cmp.star.pressure, cmp.star.velocity, cmp.star.rho_left, cmp.star.rho_right, cmp.star.iterations
    ));
    out.line(format!("steps {} dt {:.4e} max CFL {:.4}", cmp.run.steps, cmp.run.dt, cmp.run.max_cfl));
    out.line(format!("L1(rho): roe {:.6e} fqnm {:.6e}", cmp.l1_roe, cmp.l1_fqnm));
    out.line(format!("shock width: roe {} fqnm {}", cmp.width_roe, cmp.width_fqnm));
    out.line(format!("roe mass drift {:.3e}", cmp.roe_mass_drift));
    out.check(
        "fqnm density L1 error not above roe",
        cmp.l1_fqnm <= cmp.l1_roe,
        format!("{:.6e} vs {:.6e}", cmp.l1_fqnm, cmp.l1_roe),
    );
    out.check(
        "fqnm shock width not above roe",
        cmp.width_fqnm <= cmp.width_roe,
        format!("{} vs {}", cmp.width_fqnm, cmp.width_roe),
    );
    out.check(
        "density quanta change only through the ends",
        cmp.bookkeeping_exact,
        format!("initial {} final {}", cmp.run.quanta_trace[0], cmp.run.quanta_trace.last().unwrap_or(&0)),
    );
    Ok(out)
}

/// Godunov against Lax-Friedrichs quantised fluxes.
pub fn cmd_equivalence(spec: &ExperimentSpec) -> Result<Outcome> {
    spec.validate()?;
    let mut out = Outcome::default();
    let study = equivalence_study(spec.cases, spec.cells, spec.steps, spec.seed, spec.delta.unwrap_or(0.01), spec.cfl)?;
    let mut adv = table_for(spec, &["case", "identical"]);
    for (k, r) in study.advection.iter().enumerate() {
        adv.push_row(vec![k.to_string(), r.identical.to_string()]);
    }
    let mut bur = table_for(
        spec,
        &[
            "case", "amplitude", "visited", "agree_on_visited", "identical", "step", "cell", "interface", "ql", "qr",
            "flux_godunov", "flux_lf", "witnessed",
        ],
    );
    for (k, c) in study.burgers.iter().enumerate() {
        let mut row = vec![
            k.to_string(),
            c.amplitude.to_string(),
            c.visited.to_string(),
            c.agree_on_visited().to_string(),
            c.report.identical.to_string(),
        ];
        match &c.report.divergence {
            Some(d) => row.extend(
                [d.step, d.cell, d.interface].map(|v| v.to_string()).into_iter().chain(
                    [d.ql, d.qr, d.flux_first, d.flux_second].map(|v| v.to_string()),
                ),
            ),
            None => row.extend(std::iter::repeat_n(String::new(), 7)),
        }
        row.push(c.witnessed.to_string());
        bur.push_row(row);
    }
    emit(&mut out, &spec.out, "equivalence_advection.csv", &adv)?;
    emit(&mut out, &spec.out, "equivalence_burgers.csv", &bur)?;
    let identical_adv = study.advection.iter().filter(|r| r.identical).count();
    let agree = study.burgers.iter().filter(|c| c.agree_on_visited()).count();
    let identical_b = study.burgers.iter().filter(|c| c.report.identical).count();
    out.line(format!("advection: {identical_adv}/{} trajectories identical", study.advection.len()));
    out.line(format!(
        "burgers: tables agree on the visited set in {agree}/{} cases, trajectories identical in {identical_b}; {} disagreeing pairs in [-10,10]^2",
        study.burgers.len(),
        study.table_disagreements.len()
    ));
    out.check(
        "advection godunov and lax-friedrichs trajectories identical",
        identical_adv == study.advection.len(),
        format!("{identical_adv}/{}", study.advection.len()),
    );
    let bad: Vec<usize> = study.burgers.iter().enumerate().filter(|(_, c)| !c.consistent()).map(|(k, _)| k).collect();
    out.check(
        "burgers trajectories identical exactly when tables agree on visited pairs",
        bad.is_empty(),
        format!("inconsistent cases {bad:?}"),
    );
    Ok(out)
}

/// Per-step timing over a doubling ladder with operation-class counts.
pub fn cmd_bench(spec: &ExperimentSpec) -> Result<Outcome> {
    spec.validate()?;
    let mut out = Outcome::default();
    let ladder = bench_ladder(spec.min_log2, spec.max_log2, spec.repetitions, spec.warmups, spec.cfl)?;
    let reports: Vec<&TimingReport> = ladder.fqnm.iter().chain(&ladder.upwind).collect();
    let mut t = timing_table(spec, &reports);
    t.comment("fqnm_slope_s_per_cell", real(ladder.fqnm_fit.slope))
        .comment("fqnm_r2", real(ladder.fqnm_fit.r_squared))
        .comment("upwind_slope_s_per_cell", real(ladder.upwind_fit.slope))
        .comment("upwind_r2", real(ladder.upwind_fit.r_squared));
    emit(&mut out, &spec.out, "bench.csv", &t)?;
    for (f, u) in ladder.fqnm.iter().zip(&ladder.upwind) {
        out.line(format!(
            "N={:>8}: fqnm {:.3e} s/step, upwind {:.3e} s/step, speedup {:.2}x",
            f.n_cells,
            f.median,
            u.median,
            u.median / f.median
        ));
    }
    out.line(format!(
        "fit t = c N: fqnm c={:.3e} R2={:.5}; upwind c={:.3e} R2={:.5}",
        ladder.fqnm_fit.slope, ladder.fqnm_fit.r_squared, ladder.upwind_fit.slope, ladder.upwind_fit.r_squared
    ));
    out.check(
        "fqnm step time linear in N",
        ladder.fqnm_fit.r_squared > 0.99,
        format!("R2 = {:.5}", ladder.fqnm_fit.r_squared),
    );
    out.check(
        "fqnm online loop has no real flux evaluations",
        ladder.fqnm.iter().all(|r| r.ops.real_flux_evals == 0),
        String::new(),
    );
    out.check(
        "upwind evaluates at least one real flux per cell",
        ladder.upwind.iter().all(|r| r.ops.real_flux_evals >= r.n_cells as u64),
        String::new(),
    );
    Ok(out)
}

