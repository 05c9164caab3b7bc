use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fqnm::experiments::{run_experiment, Experiment, ExperimentSpec};
use fqnm::FqnmError;

const EXIT_FAILED_CHECK: u8 = 1;
const EXIT_CONFIG: u8 = 2;

const CSV_NOTE: &str = "Every CSV starts with `# key=value` comment lines holding the full run \
configuration, then one header row. Reals are written in shortest round-trip form.";

const ADVECT_HELP: &str = "Output files (per scheme):
  advect_<scheme>_profile.csv      x,u0,u[,q],u_ref
  advect_<scheme>_diagnostics.csv  step,time,mass,tv,S,N_eff,rho_defect,l1_vs_ref,l2rel_vs_ref
  advect_<scheme>_snapshots.csv    step,time,x,u   (only with --record-every > 0)";

const BAND_HELP: &str = "Output files:
  band_sweep_runs.csv  band,k0_dx,n_x,f,scheme,l2rel
  band_sweep.csv       band,k0_dx,scheme,realizations,median,min,max
--cells 0 (the default) sweeps the standard grids; any other value uses that grid only.";

const BURGERS_HELP: &str = "Output files:
  burgers_profile.csv          x,u0,u_fqnm,u_fd,u_ref,q_fqnm
  burgers_diagnostics_fqnm.csv step,time,mass,tv,S,N_eff,rho_defect,l1_vs_ref,l2rel_vs_ref
  burgers_diagnostics_fd.csv   same columns as above
  burgers_entropy.csv          step,time,S,rho_defect,dS
  burgers_timing.csv           scheme,n_cells,steps,median_s,samples_s,speedup_vs,speedup,
                               int_add,int_sub,map_evals,real_flux_evals,real_mul,real_add";

const SOD_HELP: &str = "Output files:
  sod_profile.csv  x,rho_fqnm,rho_roe,rho_exact,u_fqnm,u_roe,u_exact,p_fqnm,p_roe,p_exact
  sod_zoom.csv     same columns, restricted to zoom_lo <= x <= zoom_hi
--delta sets the density resolution delta_rho.";

const EQUIVALENCE_HELP: &str = "Output files:
  equivalence_advection.csv  case,identical
  equivalence_burgers.csv    case,amplitude,visited,agree_on_visited,identical,step,cell,
                             interface,ql,qr,flux_godunov,flux_lf,witnessed";

const BENCH_HELP: &str = "Output files:
  bench.csv  scheme,n_cells,steps,median_s,samples_s,speedup_vs,speedup,
             int_add,int_sub,map_evals,real_flux_evals,real_mul,real_add
The fitted slopes and R2 values are written as comment lines.";

/// Quantised conservative transport experiments.
#[derive(Parser, Debug)]
#[command(name = "fqnm", version, about, after_help = CSV_NOTE)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Gaussian packet advection with each selected scheme.
    #[command(after_help = ADVECT_HELP)]
    Advect(Common),
    /// Relative L2 error against the exact shift per frequency band.
    #[command(after_help = BAND_HELP)]
    BandSweep(Common),
    /// Burgers shock comparison against the Hopf-Lax reference, with timing.
    #[command(after_help = BURGERS_HELP)]
    Burgers(Common),
    /// Paired Roe and density-quantised shock tube against the exact solution.
    #[command(after_help = SOD_HELP)]
    Sod(Common),
    /// Godunov versus Lax-Friedrichs transfer operators on random data.
    #[command(after_help = EQUIVALENCE_HELP)]
    Equivalence(Common),
    /// Per-step timing over a doubling ladder of grid sizes.
    #[command(after_help = BENCH_HELP)]
    Bench(Common),
}

#[derive(Args, Debug)]
struct Common {
    /// Number of cells.
    #[arg(long)]
    cells: Option<usize>,
    /// Quantisation resolution, or `auto`.
    #[arg(long)]
    delta: Option<String>,
    #[arg(long)]
    cfl: Option<f64>,
    #[arg(long)]
    t_final: Option<f64>,
    /// Comma-separated schemes: fqnm, upwind, lf, weno5rk3.
    #[arg(long)]
    scheme: Option<String>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Snapshot and diagnostics stride in steps (0 = final only).
    #[arg(long)]
    record_every: Option<usize>,
    /// `key=value` config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Extra `key=value` settings, applied after the config file.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Print the resolved configuration and exit.
    #[arg(long)]
    print_config: bool,
}

impl Command {
    fn split(self) -> (Experiment, Common) {
        match self {
            Command::Advect(c) => (Experiment::Advect, c),
            Command::BandSweep(c) => (Experiment::BandSweep, c),
            Command::Burgers(c) => (Experiment::Burgers, c),
            Command::Sod(c) => (Experiment::Sod, c),
            Command::Equivalence(c) => (Experiment::Equivalence, c),
            Command::Bench(c) => (Experiment::Bench, c),
        }
    }
}

fn resolve(experiment: Experiment, c: &Common) -> Result<ExperimentSpec, FqnmError> {
    let mut spec = ExperimentSpec::defaults(experiment);
    if let Some(path) = &c.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| FqnmError::Config(format!("cannot read {}: {e}", path.display())))?;
        spec.apply_config(&text)?;
    }
    for kv in &c.set {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| FqnmError::Config(format!("--set expects KEY=VALUE, got `{kv}`")))?;
        spec.set(k, v)?;
    }
    let flags = [
        ("cells", c.cells.map(|v| v.to_string())),
        ("delta", c.delta.clone()),
        ("cfl", c.cfl.map(|v| v.to_string())),
        ("t_final", c.t_final.map(|v| v.to_string())),
        ("schemes", c.scheme.clone()),
        ("out", c.out.as_ref().map(|p| p.display().to_string())),
        ("seed", c.seed.map(|v| v.to_string())),
        ("record_every", c.record_every.map(|v| v.to_string())),
    ];
    for (k, v) in flags {
        if let Some(v) = v {
            spec.set(k, &v)?;
        }
    }
    spec.validate()?;
    Ok(spec)
}

/// Errors caused by the requested parameters rather than by the run itself.
fn is_config_error(e: &FqnmError) -> bool {
    matches!(
        e,
        FqnmError::Config(_)
            | FqnmError::InvalidResolution(_)
            | FqnmError::CflViolation { .. }
            | FqnmError::InvalidSplit(_)
    )
}

fn fail(e: &FqnmError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(if is_config_error(e) { EXIT_CONFIG } else { EXIT_FAILED_CHECK })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (experiment, common) = cli.command.split();
    let spec = match resolve(experiment, &common) {
        Ok(s) => s,
        Err(e) => return fail(&e),
    };
    if common.print_config {
        print!("{}", spec.to_config());
        return ExitCode::SUCCESS;
    }
    let outcome = match run_experiment(&spec) {
        Ok(o) => o,
        Err(e) => return fail(&e),
    };
    for line in &outcome.summary {
        println!("{line}");
    }
    for c in &outcome.checks {
        println!("[{}] {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    for f in &outcome.files {
        println!("wrote {}", f.display());
    }
    if outcome.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAILED_CHECK)
    }
}
