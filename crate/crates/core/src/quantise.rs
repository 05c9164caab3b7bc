//! Quantised states and the reconstruction operator.
//!
//! A physical field `u` is represented by integer states `q` at a fixed
//! resolution `delta`, with `u ≈ delta * q`. All evolution happens on the
//! integers; real values only appear when a field is reconstructed.

use crate::error::{FqnmError, Result};

/// Physical magnitude of one quantum.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Resolution(f64);

impl Resolution {
    pub fn new(delta: f64) -> Result<Self> {
        if delta.is_finite() && delta > 0.0 {
            Ok(Self(delta))
        } else {
            Err(FqnmError::InvalidResolution(delta))
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Boundary {
    #[default]
    Periodic,
}

/// Integer cell states on a periodic grid.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantisedField {
    states: Vec<i64>,
    resolution: Resolution,
    boundary: Boundary,
}

impl QuantisedField {
    pub fn new(states: Vec<i64>, resolution: Resolution) -> Result<Self> {
        if states.len() < 2 {
            return Err(FqnmError::Config(format!(
                "a quantised field needs at least 2 cells, got {}",
                states.len()
            )));
        }
        Ok(Self {
            states,
            resolution,
            boundary: Boundary::Periodic,
        })
    }

    #[inline]
    pub fn states(&self) -> &[i64] {
        &self.states
    }

    /// Mutable access to the states. The length cannot change through a slice.
    #[inline]
    pub fn states_mut(&mut self) -> &mut [i64] {
        &mut self.states
    }

    #[inline]
    pub fn resolution(&self) -> Resolution {
        self.resolution
    }

    #[inline]
    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.states.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn into_states(self) -> Vec<i64> {
        self.states
    }

    pub fn min_max(&self) -> (i64, i64) {
        min_max(&self.states)
    }
}

/// Real observables produced by [`reconstruct`].
#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructedField {
    pub values: Vec<f64>,
    pub resolution: Resolution,
}

/// Nearest integer, ties away from zero.
///
/// This is the single rounding convention used by every transfer map.
pub fn round_to_int(x: f64) -> Result<i64> {
    if !x.is_finite() {
        return Err(FqnmError::NonFinite { value: x });
    }
    let r = x.round();
    // i64::MAX is not representable as f64; 2^63 is the first value out of range.
    if r >= 9_223_372_036_854_775_808.0 || r < -9_223_372_036_854_775_808.0 {
        return Err(FqnmError::OutOfRange { value: x });
    }
    Ok(r as i64)
}

pub fn quantise(u: &[f64], delta: Resolution) -> Result<QuantisedField> {
    let d = delta.get();
    let states = u
        .iter()
        .map(|&x| round_to_int(x / d))
        .collect::<Result<Vec<_>>>()?;
    QuantisedField::new(states, delta)
}

pub fn reconstruct(q: &QuantisedField) -> ReconstructedField {
    let d = q.resolution.get();
    ReconstructedField {
        values: q.states.iter().map(|&s| d * s as f64).collect(),
        resolution: q.resolution,
    }
}

pub(crate) fn min_max(states: &[i64]) -> (i64, i64) {
    states
        .iter()
        .fold((i64::MAX, i64::MIN), |(lo, hi), &s| (lo.min(s), hi.max(s)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rounding_examples() {
        assert_eq!(round_to_int(2.4).unwrap(), 2);
        assert_eq!(round_to_int(2.5).unwrap(), 3);
        assert_eq!(round_to_int(-2.5).unwrap(), -3);
        assert_eq!(round_to_int(0.0).unwrap(), 0);
    }

    #[test]
    fn rounding_rejects_non_finite_and_huge() {
        assert!(matches!(round_to_int(f64::NAN), Err(FqnmError::NonFinite { .. })));
        assert!(matches!(round_to_int(f64::INFINITY), Err(FqnmError::NonFinite { .. })));
        assert!(matches!(round_to_int(1e300), Err(FqnmError::OutOfRange { .. })));
    }

    #[test]
    fn quantise_examples() {
        let q = quantise(&[0.0, 0.25, -0.25], Resolution::new(0.1).unwrap()).unwrap();
        assert_eq!(q.states(), &[0, 3, -3]);
        let q = quantise(&[1.0, 2.0], Resolution::new(1.0).unwrap()).unwrap();
        assert_eq!(q.states(), &[1, 2]);
    }

    #[test]
    fn resolution_must_be_positive() {
        assert!(Resolution::new(0.0).is_err());
        assert!(Resolution::new(-1e-3).is_err());
        assert!(Resolution::new(f64::NAN).is_err());
    }

    #[test]
    fn reconstruct_examples() {
        let d = Resolution::new(0.1).unwrap();
        let q = QuantisedField::new(vec![3, 0], d).unwrap();
        assert_eq!(reconstruct(&q).values[0], 0.1 * 3.0);
        let z = QuantisedField::new(vec![0, 0, 0], Resolution::new(7.5).unwrap()).unwrap();
        assert_eq!(reconstruct(&z).values, vec![0.0; 3]);
    }

    #[test]
    fn field_needs_two_cells() {
        assert!(QuantisedField::new(vec![1], Resolution::new(1.0).unwrap()).is_err());
    }

    proptest! {
        #[test]
        fn round_trip_is_exact(q in prop::collection::vec(-1_000_000i64..1_000_000, 2..64),
                               delta in 1e-6f64..10.0) {
            let d = Resolution::new(delta).unwrap();
            let field = QuantisedField::new(q.clone(), d).unwrap();
            let back = quantise(&reconstruct(&field).values, d).unwrap();
            prop_assert_eq!(back.states(), &q[..]);
        }

        #[test]
        fn error_bounded_by_half_quantum(u in prop::collection::vec(-100.0f64..100.0, 2..64),
                                         delta in 1e-3f64..1.0) {
            let d = Resolution::new(delta).unwrap();
            let q = quantise(&u, d).unwrap();
            for (x, s) in u.iter().zip(q.states()) {
                prop_assert!((x - delta * *s as f64).abs() <= delta / 2.0 * (1.0 + 1e-12));
            }
        }

        #[test]
        fn quantise_is_monotone(u in prop::collection::vec(-100.0f64..100.0, 2..32),
                                bump in prop::collection::vec(0.0f64..5.0, 32),
                                delta in 1e-3f64..1.0) {
            let d = Resolution::new(delta).unwrap();
            let v: Vec<f64> = u.iter().zip(&bump).map(|(a, b)| a + b).collect();
            let qu = quantise(&u, d).unwrap();
            let qv = quantise(&v, d).unwrap();
            for (a, b) in qu.states().iter().zip(qv.states()) {
                prop_assert!(a <= b);
            }
        }
    }
}
