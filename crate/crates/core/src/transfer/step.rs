//! Conservative integer update on a periodic 1D grid.

use std::collections::BTreeSet;

use super::maps::{InterfaceRule, SplitMaps};
use crate::error::{FqnmError, Result};
use crate::quantise::QuantisedField;

/// Fills `flux[i]` with the count flux across interface `i + 1/2`
/// (periodic, so the last interface couples cell `N-1` to cell `0`).
#[inline]
pub fn interface_fluxes<R: InterfaceRule + ?Sized>(states: &[i64], rule: &R, flux: &mut [i64]) {
    let n = states.len();
    debug_assert_eq!(flux.len(), n);
    for i in 0..n - 1 {
        flux[i] = rule.count_flux(states[i], states[i + 1]);
    }
    flux[n - 1] = rule.count_flux(states[n - 1], states[0]);
}

/// `q_i -= F_{i+1/2} - F_{i-1/2}` with checked arithmetic.
#[inline]
pub fn apply_flux_difference(states: &mut [i64], flux: &[i64]) -> Result<()> {
    let n = states.len();
    let mut left = flux[n - 1];
    for i in 0..n {
        let right = flux[i];
        let div = right.checked_sub(left).ok_or(FqnmError::Overflow { cell: i })?;
        states[i] = states[i].checked_sub(div).ok_or(FqnmError::Overflow { cell: i })?;
        left = right;
    }
    Ok(())
}

/// One conservative step in place; `flux` is scratch space of the same length.
pub fn step_in_place<R: InterfaceRule + ?Sized>(
    states: &mut [i64],
    flux: &mut [i64],
    rule: &R,
) -> Result<()> {
    if flux.len() != states.len() {
        return Err(FqnmError::LengthMismatch {
            expected: states.len(),
            actual: flux.len(),
        });
    }
    interface_fluxes(states, rule, flux);
    apply_flux_difference(states, flux)
}

pub fn step<R: InterfaceRule + ?Sized>(q: &QuantisedField, rule: &R) -> Result<QuantisedField> {
    let mut next = q.clone();
    let mut flux = vec![0; q.len()];
    step_in_place(next.states_mut(), &mut flux, rule)?;
    Ok(next)
}

/// Like [`step`], reporting every interface as `(interface, qL, qR, F)`.
pub fn step_observed<R, O>(q: &QuantisedField, rule: &R, mut observe: O) -> Result<QuantisedField>
where
    R: InterfaceRule + ?Sized,
    O: FnMut(usize, i64, i64, i64),
{
    let mut next = q.clone();
    let n = q.len();
    let states = q.states();
    let mut flux = vec![0; n];
    interface_fluxes(states, rule, &mut flux);
    for (i, &f) in flux.iter().enumerate() {
        observe(i, states[i], states[(i + 1) % n], f);
    }
    apply_flux_difference(next.states_mut(), &flux)?;
    Ok(next)
}

/// Set of `(qL, qR)` interface states met during a run.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VisitedPairs(BTreeSet<(i64, i64)>);

impl VisitedPairs {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn record(&mut self, ql: i64, qr: i64) {
        self.0.insert((ql, qr));
    }

    pub fn contains(&self, ql: i64, qr: i64) -> bool {
        self.0.contains(&(ql, qr))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        self.0.iter().copied()
    }
}

/// Runs `steps` updates from `q0`, recording every visited interface pair.
pub fn run_recording_visits<R: InterfaceRule + ?Sized>(
    q0: &QuantisedField,
    rule: &R,
    steps: usize,
) -> Result<(QuantisedField, VisitedPairs)> {
    let mut visited = VisitedPairs::new();
    let mut q = q0.clone();
    for _ in 0..steps {
        q = step_observed(&q, rule, |_, l, r, _| visited.record(l, r))?;
    }
    Ok((q, visited))
}

/// Operation-class tallies for one or more steps.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OpCounts {
    pub int_add: u64,
    pub int_sub: u64,
    pub map_evals: u64,
    pub real_flux_evals: u64,
    pub real_mul: u64,
    pub real_add: u64,
}

impl std::ops::AddAssign for OpCounts {
    fn add_assign(&mut self, o: Self) {
        self.int_add += o.int_add;
        self.int_sub += o.int_sub;
        self.map_evals += o.map_evals;
        self.real_flux_evals += o.real_flux_evals;
        self.real_mul += o.real_mul;
        self.real_add += o.real_add;
    }
}

/// Instrumented twin of [`step_in_place`] for split maps. Table hits count as
/// map evaluations; states outside a table fall back to the closed form and
/// count as real flux evaluations.
pub fn step_counted(states: &mut [i64], flux: &mut [i64], maps: &SplitMaps, ops: &mut OpCounts) -> Result<()> {
    let n = states.len();
    let eval = |map: &super::maps::TransferMap, q: i64, ops: &mut OpCounts| match map.lookup(q) {
        Some(v) => {
            ops.map_evals += 1;
            v
        }
        None => {
            // f(u), the ±alpha u term, then scaling and rounding
            ops.real_flux_evals += 1;
            ops.real_mul += 4;
            ops.real_add += 1;
            map.closed_form(q)
        }
    };
    for i in 0..n {
        let r = if i + 1 == n { 0 } else { i + 1 };
        flux[i] = eval(&maps.plus, states[i], ops) + eval(&maps.minus, states[r], ops);
        ops.int_add += 1;
    }
    apply_flux_difference(states, flux)?;
    ops.int_sub += 2 * n as u64;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flux::ScalarFlux;
    use crate::quantise::Resolution;
    use crate::transfer::maps::build_transfer_maps;
    use crate::transfer::params::SchemeParams;
    use crate::transfer::split::lax_friedrichs_split;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn field(q: Vec<i64>) -> QuantisedField {
        QuantisedField::new(q, Resolution::new(0.1).unwrap()).unwrap()
    }

    fn maps(flux: ScalarFlux, alpha: f64, ratio: f64) -> SplitMaps {
        let split = lax_friedrichs_split(flux, alpha, -alpha, alpha).unwrap();
        let p = SchemeParams::new(Resolution::new(0.1).unwrap(), 1.0, ratio, alpha).unwrap();
        build_transfer_maps(split, &p)
    }

    #[test]
    fn unit_cfl_advection_shifts_one_cell() {
        let m = maps(ScalarFlux::Advection { speed: 1.0 }, 1.0, 1.0);
        let q = step(&field(vec![0, 2, 0, 0]), &m).unwrap();
        assert_eq!(q.states(), &[0, 0, 2, 0]);
    }

    #[test]
    fn constant_state_is_fixed_point() {
        let m = maps(ScalarFlux::Burgers, 2.0, 0.4);
        let q0 = field(vec![13; 17]);
        assert_eq!(step(&q0, &m).unwrap(), q0);
    }

    #[test]
    fn burgers_fuzz_conserves_mass() {
        // alpha = 1.5 covers |u| <= 1.5, i.e. q in [-15, 15]
        let m = maps(ScalarFlux::Burgers, 1.5, 0.5).tabulated(-15, 15);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut q = field((0..64).map(|_| rng.gen_range(-5..=15)).collect());
        let mass: i64 = q.states().iter().sum();
        for _ in 0..100 {
            q = step(&q, &m).unwrap();
            assert_eq!(q.states().iter().sum::<i64>(), mass);
        }
    }

    #[test]
    fn overflow_names_the_cell() {
        struct Huge;
        impl InterfaceRule for Huge {
            fn count_flux(&self, ql: i64, _qr: i64) -> i64 {
                if ql == 1 { i64::MAX } else { 0 }
            }
        }
        let q = field(vec![0, 1, 5, 0]);
        match step(&q, &Huge) {
            Err(FqnmError::Overflow { cell }) => assert_eq!(cell, 2),
            other => panic!("expected overflow, got {other:?}"),
        }
    }

    #[test]
    fn observer_sees_every_interface() {
        let m = maps(ScalarFlux::Advection { speed: 1.0 }, 1.0, 0.5);
        let q = field(vec![1, 2, 3]);
        let mut seen = Vec::new();
        step_observed(&q, &m, |i, l, r, f| seen.push((i, l, r, f))).unwrap();
        assert_eq!(seen, vec![(0, 1, 2, 1), (1, 2, 3, 1), (2, 3, 1, 2)]);
    }

    #[test]
    fn counted_step_matches_plain_step() {
        let m = maps(ScalarFlux::Burgers, 2.0, 0.4).tabulated(-20, 20);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let q0: Vec<i64> = (0..50).map(|_| rng.gen_range(-20..=20)).collect();
        let expect = step(&field(q0.clone()), &m).unwrap();
        let mut s = q0;
        let mut f = vec![0; s.len()];
        let mut ops = OpCounts::default();
        step_counted(&mut s, &mut f, &m, &mut ops).unwrap();
        assert_eq!(s, expect.states());
        assert_eq!(ops.real_flux_evals, 0);
        assert_eq!(ops.map_evals, 100);
        assert_eq!(ops.int_sub, 100);
    }
}
