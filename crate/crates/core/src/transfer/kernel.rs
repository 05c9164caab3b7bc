//! Table-driven step for split maps: array lookups and integer adds only.

use super::maps::SplitMaps;
use super::step::step_in_place;
use crate::error::{FqnmError, Result};

/// Tables and states inside these bounds cannot overflow in the update, so
/// the fast path skips checked arithmetic.
const STATE_BOUND: i64 = 1 << 61;
const FLUX_BOUND: i64 = 1 << 60;

/// Precomputed `phi±` over a contiguous range. A step whose states all lie
/// in the range is pure table lookups; otherwise it falls back to the
/// checked closed-form step.
#[derive(Debug, Clone)]
pub struct TabulatedStep {
    lo: i64,
    plus: Vec<i64>,
    minus: Vec<i64>,
    maps: SplitMaps,
}

impl TabulatedStep {
    pub fn new(maps: SplitMaps, lo: i64, hi: i64) -> Result<Self> {
        if lo > hi || lo <= -STATE_BOUND || hi >= STATE_BOUND {
            return Err(FqnmError::Config(format!("table range [{lo}, {hi}] is empty or too wide")));
        }
        let plus: Vec<i64> = (lo..=hi).map(|q| maps.plus.closed_form(q)).collect();
        let minus: Vec<i64> = (lo..=hi).map(|q| maps.minus.closed_form(q)).collect();
        if plus.iter().chain(&minus).any(|v| v.abs() >= FLUX_BOUND) {
            return Err(FqnmError::Config("transfer table values too large for the unchecked update".into()));
        }
        Ok(Self { lo, plus, minus, maps })
    }

    pub fn maps(&self) -> &SplitMaps {
        &self.maps
    }

    pub fn range(&self) -> (i64, i64) {
        (self.lo, self.lo + self.plus.len() as i64 - 1)
    }

    /// One periodic step in place; `flux` is scratch of the same length.
    pub fn step(&self, states: &mut [i64], flux: &mut [i64]) -> Result<()> {
        let n = states.len();
        if flux.len() != n {
            return Err(FqnmError::LengthMismatch {
                expected: n,
                actual: flux.len(),
            });
        }
        let len = self.plus.len() as u64;
        let lo = self.lo;
        if states.iter().any(|&q| q.wrapping_sub(lo) as u64 >= len) {
            return step_in_place(states, flux, &self.maps);
        }
        let (plus, minus) = (&self.plus[..], &self.minus[..]);
        let first_minus = minus[(states[0] - lo) as usize];
        for (f, w) in flux.iter_mut().zip(states.windows(2)) {
            *f = plus[(w[0] - lo) as usize] + minus[(w[1] - lo) as usize];
        }
        flux[n - 1] = plus[(states[n - 1] - lo) as usize] + first_minus;
        let mut left = flux[n - 1];
        for (q, &right) in states.iter_mut().zip(flux.iter()) {
            *q -= right - left;
            left = right;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flux::ScalarFlux;
    use crate::quantise::Resolution;
    use crate::transfer::{build_transfer_maps, lax_friedrichs_split, SchemeParams};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn burgers_maps() -> SplitMaps {
        let split = lax_friedrichs_split(ScalarFlux::Burgers, 1.65, -0.5, 1.5).unwrap();
        let p = SchemeParams::new(Resolution::new(0.01).unwrap(), 1.0 / 64.0, 0.8 / 64.0 / 1.65, 1.65).unwrap();
        build_transfer_maps(split, &p)
    }

    #[test]
    fn matches_generic_step_inside_and_outside_the_table() {
        let maps = burgers_maps();
        let k = TabulatedStep::new(maps.clone(), -20, 120).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for case in 0..50 {
            // every other case strays outside the table
            let hi = if case % 2 == 0 { 120 } else { 150 };
            let mut a: Vec<i64> = (0..40).map(|_| rng.gen_range(-20..=hi)).collect();
            let mut b = a.clone();
            let (mut fa, mut fb) = (vec![0; 40], vec![0; 40]);
            for _ in 0..20 {
                k.step(&mut a, &mut fa).unwrap();
                step_in_place(&mut b, &mut fb, &maps).unwrap();
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn rejects_bad_ranges() {
        assert!(TabulatedStep::new(burgers_maps(), 5, 4).is_err());
        assert!(TabulatedStep::new(burgers_maps(), i64::MIN, 0).is_err());
    }
}
