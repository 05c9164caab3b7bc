//! Experiment specifications, the studies behind each command, and the
//! command drivers that write CSV output.

mod commands;
mod spec;
mod studies;

pub use commands::{cmd_advect, cmd_band_sweep, cmd_bench, cmd_burgers, cmd_equivalence, cmd_sod, run_experiment};
pub use spec::{Experiment, ExperimentSpec};
pub use studies::{
    band_sweep, bench_ladder, burgers_comparison, equivalence_study, sod_comparison, time_burgers_kernels, BandRun, BandSummary,
    BandSweep, BenchLadder, BurgersCase, BurgersComparison, EntropyPair, EquivalenceStudy, SodComparison, BAND_FRACTIONS,
    BAND_GRIDS, BURGERS_SHOCK_TIME,
};

use std::path::PathBuf;

/// A named pass/fail statement produced by a command.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

/// What a command reports back to the caller.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Outcome {
    pub summary: Vec<String>,
    pub checks: Vec<Check>,
    pub files: Vec<PathBuf>,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub(crate) fn line(&mut self, s: impl Into<String>) {
        self.summary.push(s.into());
    }

    pub(crate) fn check(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check::new(name, passed, detail));
    }
}
