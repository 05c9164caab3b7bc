use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{FqnmError, Result};
use crate::problems::Scheme;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Experiment {
    Advect,
    BandSweep,
    Burgers,
    Sod,
    Equivalence,
    Bench,
}

impl Experiment {
    pub const ALL: [Experiment; 6] = [
        Experiment::Advect,
        Experiment::BandSweep,
        Experiment::Burgers,
        Experiment::Sod,
        Experiment::Equivalence,
        Experiment::Bench,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Advect => "advect",
            Experiment::BandSweep => "band-sweep",
            Experiment::Burgers => "burgers",
            Experiment::Sod => "sod",
            Experiment::Equivalence => "equivalence",
            Experiment::Bench => "bench",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = FqnmError;

    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s.trim())
            .ok_or_else(|| FqnmError::Config(format!("unknown experiment `{s}`")))
    }
}

/// Full parameter set of one command invocation. Every field round-trips
/// through the flat `key=value` config format.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub experiment: Experiment,
    pub schemes: Vec<Scheme>,
    pub cells: usize,
    /// Quantisation resolution (`delta_rho` for the shock tube); `None` means
    /// the data-derived default.
    pub delta: Option<f64>,
    pub cfl: f64,
    pub t_final: f64,
    pub out: PathBuf,
    pub seed: u64,
    pub record_every: usize,
    /// Packet frequency in cycles per unit length.
    pub frequency: f64,
    /// Advection speed.
    pub speed: f64,
    /// Hopf-Lax candidate count.
    pub candidates: usize,
    pub zoom_lo: f64,
    pub zoom_hi: f64,
    /// Random initial states per family in the equivalence study.
    pub cases: usize,
    /// Steps per trajectory in the equivalence study.
    pub steps: usize,
    pub min_log2: u32,
    pub max_log2: u32,
    pub repetitions: usize,
    pub warmups: usize,
}

impl ExperimentSpec {
    pub fn defaults(experiment: Experiment) -> Self {
        let base = Self {
            experiment,
            schemes: vec![Scheme::Fqnm],
            cells: 128,
            delta: None,
            cfl: 0.8,
            t_final: 1.0,
            out: PathBuf::from("out"),
            seed: 1,
            record_every: 0,
            frequency: 32.0,
            speed: 1.0,
            candidates: crate::references::HOPF_LAX_CANDIDATES,
            zoom_lo: 0.84,
            zoom_hi: 0.86,
            cases: 100,
            steps: 50,
            min_log2: 10,
            max_log2: 18,
            repetitions: 7,
            warmups: 2,
        };
        match experiment {
            Experiment::Advect => Self {
                schemes: vec![Scheme::Fqnm, Scheme::Weno5Rk3],
                cells: 256,
                cfl: 1.0,
                ..base
            },
            Experiment::BandSweep => Self {
                schemes: vec![Scheme::Fqnm, Scheme::Weno5Rk3],
                cells: 0,
                cfl: 1.0,
                ..base
            },
            Experiment::Burgers => Self {
                schemes: vec![Scheme::Fqnm, Scheme::UpwindFv],
                t_final: 0.35,
                ..base
            },
            Experiment::Sod => Self {
                schemes: Vec::new(),
                cells: 400,
                delta: Some(1e-3),
                t_final: 0.2,
                ..base
            },
            Experiment::Equivalence => Self {
                cells: 32,
                delta: Some(0.01),
                ..base
            },
            Experiment::Bench => Self {
                schemes: vec![Scheme::Fqnm, Scheme::UpwindFv],
                ..base
            },
        }
    }

    /// All fields as `key=value` pairs in a fixed order.
    pub fn to_pairs(&self) -> Vec<(String, String)> {
        let schemes: Vec<&str> = self.schemes.iter().map(|s| s.name()).collect();
        let delta = self.delta.map_or_else(|| "auto".to_string(), |d| d.to_string());
        [
            ("experiment", self.experiment.to_string()),
            ("schemes", schemes.join(",")),
            ("cells", self.cells.to_string()),
            ("delta", delta),
            ("cfl", self.cfl.to_string()),
            ("t_final", self.t_final.to_string()),
            ("out", self.out.display().to_string()),
            ("seed", self.seed.to_string()),
            ("record_every", self.record_every.to_string()),
            ("frequency", self.frequency.to_string()),
            ("speed", self.speed.to_string()),
            ("candidates", self.candidates.to_string()),
            ("zoom_lo", self.zoom_lo.to_string()),
            ("zoom_hi", self.zoom_hi.to_string()),
            ("cases", self.cases.to_string()),
            ("steps", self.steps.to_string()),
            ("min_log2", self.min_log2.to_string()),
            ("max_log2", self.max_log2.to_string()),
            ("repetitions", self.repetitions.to_string()),
            ("warmups", self.warmups.to_string()),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect()
    }

    pub fn to_config(&self) -> String {
        self.to_pairs().into_iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }

    /// Sets one field from its config-file spelling.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: FromStr>(key: &str, v: &str) -> Result<T> {
            v.trim()
                .parse()
                .map_err(|_| FqnmError::Config(format!("cannot parse `{v}` for `{key}`")))
        }
        let v = value.trim();
        match key.trim() {
            "experiment" => {
                let e: Experiment = v.parse()?;
                if e != self.experiment {
                    return Err(FqnmError::Config(format!(
                        "config is for `{e}` but the command is `{}`",
                        self.experiment
                    )));
                }
            }
            "schemes" | "scheme" => {
                self.schemes = if v.is_empty() {
                    Vec::new()
                } else {
                    v.split(',').map(str::parse).collect::<Result<_>>()?
                }
            }
            "cells" => self.cells = num(key, v)?,
            "delta" => self.delta = if v == "auto" { None } else { Some(num(key, v)?) },
            "cfl" => self.cfl = num(key, v)?,
            "t_final" => self.t_final = num(key, v)?,
            "out" => self.out = PathBuf::from(v),
            "seed" => self.seed = num(key, v)?,
            "record_every" => self.record_every = num(key, v)?,
            "frequency" => self.frequency = num(key, v)?,
            "speed" => self.speed = num(key, v)?,
            "candidates" => self.candidates = num(key, v)?,
            "zoom_lo" => self.zoom_lo = num(key, v)?,
            "zoom_hi" => self.zoom_hi = num(key, v)?,
            "cases" => self.cases = num(key, v)?,
            "steps" => self.steps = num(key, v)?,
            "min_log2" => self.min_log2 = num(key, v)?,
            "max_log2" => self.max_log2 = num(key, v)?,
            "repetitions" => self.repetitions = num(key, v)?,
            "warmups" => self.warmups = num(key, v)?,
            other => return Err(FqnmError::Config(format!("unknown config key `{other}`"))),
        }
        Ok(())
    }

    /// Applies a config file body: `key=value` lines, `#` comments and
    /// blank lines ignored.
    pub fn apply_config(&mut self, text: &str) -> Result<()> {
        for (no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| FqnmError::Config(format!("line {}: expected key=value, got `{line}`", no + 1)))?;
            self.set(k, v)?;
        }
        Ok(())
    }

    pub fn parse(experiment: Experiment, text: &str) -> Result<Self> {
        let mut s = Self::defaults(experiment);
        s.apply_config(text)?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(FqnmError::Config(m));
        if !(self.cfl.is_finite() && self.cfl > 0.0) {
            return bad(format!("cfl must be positive, got {}", self.cfl));
        }
        if !(self.t_final.is_finite() && self.t_final > 0.0) {
            return bad(format!("t_final must be positive, got {}", self.t_final));
        }
        if let Some(d) = self.delta {
            if !(d.is_finite() && d > 0.0) {
                return bad(format!("delta must be positive, got {d}"));
            }
        }
        match self.experiment {
            Experiment::Advect | Experiment::Burgers if self.cells < 8 => {
                bad(format!("need at least 8 cells, got {}", self.cells))
            }
            Experiment::Sod if self.cells < 8 || self.zoom_lo >= self.zoom_hi => {
                bad("the shock tube needs at least 8 cells and a non-empty zoom window".into())
            }
            Experiment::Equivalence if self.cells < 2 || self.cases == 0 => {
                bad("the equivalence study needs cells >= 2 and at least one case".into())
            }
            Experiment::Bench if self.min_log2 < 4 || self.min_log2 > self.max_log2 || self.max_log2 > 26 => {
                bad(format!("bench ladder 2^{}..2^{} is out of range", self.min_log2, self.max_log2))
            }
            Experiment::Bench if self.repetitions < crate::timing::MIN_REPETITIONS => bad(format!(
                "need at least {} repetitions",
                crate::timing::MIN_REPETITIONS
            )),
            Experiment::BandSweep if self.cells != 0 && self.cells < 8 => {
                bad(format!("band sweep grid needs at least 8 cells (or 0 for the standard grids), got {}", self.cells))
            }
            Experiment::Advect | Experiment::BandSweep if self.schemes.is_empty() => {
                bad("no schemes selected".into())
            }
            _ => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_round_trips_for_every_experiment() {
        for e in Experiment::ALL {
            let mut s = ExperimentSpec::defaults(e);
            s.seed = 99;
            s.delta = Some(0.125);
            let back = ExperimentSpec::parse(e, &s.to_config()).unwrap();
            assert_eq!(back, s);
        }
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let s = ExperimentSpec::parse(Experiment::Burgers, "# comment\n\ncells = 64\ndelta=auto\n").unwrap();
        assert_eq!(s.cells, 64);
        assert_eq!(s.delta, None);
    }

    #[test]
    fn bad_keys_and_values_are_config_errors() {
        for text in ["nope=1", "cells=abc", "cells", "schemes=fqnm,roe", "experiment=sod"] {
            assert!(ExperimentSpec::parse(Experiment::Burgers, text).is_err(), "{text}");
        }
    }

    #[test]
    fn validation_catches_bad_parameters() {
        let mut s = ExperimentSpec::defaults(Experiment::Bench);
        assert!(s.validate().is_ok());
        s.repetitions = 3;
        assert!(s.validate().is_err());
        let mut s = ExperimentSpec::defaults(Experiment::Burgers);
        s.cfl = -1.0;
        assert!(s.validate().is_err());
    }
}
