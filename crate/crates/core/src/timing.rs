//! Wall-clock harness: median of repeated timed blocks after warm-up runs.

use std::time::Instant;

use crate::error::{FqnmError, Result};
use crate::transfer::OpCounts;

/// Fewer repetitions than this make the median meaningless.
pub const MIN_REPETITIONS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TimingConfig {
    pub warmups: usize,
    pub repetitions: usize,
    /// Steps per timed block; the per-step time is the block time divided by this.
    pub steps_per_block: usize,
}

impl TimingConfig {
    pub fn validate(&self) -> Result<()> {
        if self.repetitions < MIN_REPETITIONS {
            return Err(FqnmError::Config(format!(
                "need at least {MIN_REPETITIONS} timing repetitions, got {}",
                self.repetitions
            )));
        }
        if self.steps_per_block == 0 {
            return Err(FqnmError::Config("steps per timed block must be positive".into()));
        }
        Ok(())
    }
}

pub fn median(samples: &[f64]) -> f64 {
    if samples.is_empty() {
        return f64::NAN;
    }
    let mut s = samples.to_vec();
    s.sort_by(f64::total_cmp);
    let m = s.len() / 2;
    if s.len() % 2 == 1 {
        s[m]
    } else {
        0.5 * (s[m - 1] + s[m])
    }
}

/// Seconds per call of `step`, one sample per repetition.
pub fn time_per_step(config: &TimingConfig, mut step: impl FnMut()) -> Result<Vec<f64>> {
    config.validate()?;
    for _ in 0..config.warmups {
        for _ in 0..config.steps_per_block {
            step();
        }
    }
    Ok((0..config.repetitions)
        .map(|_| {
            let t = Instant::now();
            for _ in 0..config.steps_per_block {
                step();
            }
            t.elapsed().as_secs_f64() / config.steps_per_block as f64
        })
        .collect())
}

/// Least-squares fit of `t = c N` through the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    /// `1 - SS_res / SS_tot` with the total sum of squares about the mean.
    pub r_squared: f64,
}

pub fn fit_through_origin(n: &[f64], t: &[f64]) -> LinearFit {
    let sxy: f64 = n.iter().zip(t).map(|(x, y)| x * y).sum();
    let sxx: f64 = n.iter().map(|x| x * x).sum();
    let slope = sxy / sxx;
    let mean = t.iter().sum::<f64>() / t.len() as f64;
    let ss_res: f64 = n.iter().zip(t).map(|(x, y)| (y - slope * x).powi(2)).sum();
    let ss_tot: f64 = t.iter().map(|y| (y - mean).powi(2)).sum();
    LinearFit {
        slope,
        r_squared: 1.0 - ss_res / ss_tot,
    }
}

/// Per-step timing of one scheme at one size.
#[derive(Debug, Clone, PartialEq)]
pub struct TimingReport {
    pub scheme: String,
    pub n_cells: usize,
    pub steps: usize,
    /// Seconds per step, one per repetition.
    pub samples: Vec<f64>,
    pub median: f64,
    /// Speedup of this scheme over the named baseline (`baseline / this`).
    pub speedup: Option<(String, f64)>,
    /// Operation classes of one step.
    pub ops: OpCounts,
}

impl TimingReport {
    pub fn new(scheme: impl Into<String>, n_cells: usize, config: &TimingConfig, samples: Vec<f64>, ops: OpCounts) -> Self {
        Self {
            scheme: scheme.into(),
            n_cells,
            steps: config.steps_per_block * config.repetitions,
            median: median(&samples),
            samples,
            speedup: None,
            ops,
        }
    }

    pub fn with_speedup_over(mut self, baseline: &TimingReport) -> Self {
        self.speedup = Some((baseline.scheme.clone(), baseline.median / self.median));
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_of_odd_and_even() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 3.0, 2.0]), 2.5);
        assert!(median(&[]).is_nan());
    }

    #[test]
    fn exact_line_fits_perfectly() {
        let n = [1.0, 2.0, 4.0, 8.0];
        let t: Vec<f64> = n.iter().map(|x| 3.0 * x).collect();
        let f = fit_through_origin(&n, &t);
        assert!((f.slope - 3.0).abs() < 1e-15);
        assert!((f.r_squared - 1.0).abs() < 1e-15);
    }

    #[test]
    fn fit_matches_closed_form() {
        let n = [1.0, 2.0, 3.0];
        let t = [1.0, 3.0, 2.0];
        let f = fit_through_origin(&n, &t);
        // c = (1 + 6 + 6) / 14
        assert!((f.slope - 13.0 / 14.0).abs() < 1e-15);
        let res: f64 = n.iter().zip(t).map(|(x, y)| (y - f.slope * x).powi(2)).sum();
        assert!((f.r_squared - (1.0 - res / 2.0)).abs() < 1e-15);
    }

    #[test]
    fn harness_counts_calls() {
        let cfg = TimingConfig {
            warmups: 2,
            repetitions: 5,
            steps_per_block: 3,
        };
        let mut calls = 0;
        let s = time_per_step(&cfg, || calls += 1).unwrap();
        assert_eq!(s.len(), 5);
        assert_eq!(calls, 21);
        let short = TimingConfig { repetitions: 4, ..cfg };
        assert!(time_per_step(&short, || ()).is_err());
    }
}
