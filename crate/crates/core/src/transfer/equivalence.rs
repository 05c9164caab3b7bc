//! Comparing FQNM trajectories generated by two interface rules.

use super::maps::InterfaceRule;
use super::step::{apply_flux_difference, interface_fluxes, VisitedPairs};
use crate::error::Result;
use crate::quantise::QuantisedField;

/// Where two trajectories first part ways.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Divergence {
    /// Step whose result first differs (1 = after the first update).
    pub step: usize,
    /// First cell that differs after that step.
    pub cell: usize,
    /// First interface `i + 1/2` at which the two rules disagreed on the
    /// common state before that step.
    pub interface: usize,
    pub ql: i64,
    pub qr: i64,
    pub flux_first: i64,
    pub flux_second: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivalenceReport {
    pub identical: bool,
    pub steps: usize,
    pub divergence: Option<Divergence>,
}

/// Evolves `q0` under both rules and reports whether the states match
/// bitwise after every one of `steps` updates.
pub fn trajectories_identical<A, B>(
    first: &A,
    second: &B,
    q0: &QuantisedField,
    steps: usize,
) -> Result<EquivalenceReport>
where
    A: InterfaceRule + ?Sized,
    B: InterfaceRule + ?Sized,
{
    let n = q0.len();
    let mut a = q0.states().to_vec();
    let mut b = a.clone();
    let mut fa = vec![0; n];
    let mut fb = vec![0; n];
    for k in 1..=steps {
        // a == b here, so both flux arrays come from the same state
        interface_fluxes(&a, first, &mut fa);
        interface_fluxes(&b, second, &mut fb);
        let witness = fa.iter().zip(&fb).position(|(x, y)| x != y);
        let before = a.clone();
        apply_flux_difference(&mut a, &fa)?;
        apply_flux_difference(&mut b, &fb)?;
        if let Some(cell) = a.iter().zip(&b).position(|(x, y)| x != y) {
            // a cell can only change differently if some interface flux did
            let interface = witness.expect("states differ without a flux difference");
            return Ok(EquivalenceReport {
                identical: false,
                steps: k,
                divergence: Some(Divergence {
                    step: k,
                    cell,
                    interface,
                    ql: before[interface],
                    qr: before[(interface + 1) % n],
                    flux_first: fa[interface],
                    flux_second: fb[interface],
                }),
            });
        }
    }
    Ok(EquivalenceReport {
        identical: true,
        steps,
        divergence: None,
    })
}

/// First visited pair (in sorted order) on which the two rules disagree.
pub fn first_disagreement<A, B>(first: &A, second: &B, visited: &VisitedPairs) -> Option<(i64, i64)>
where
    A: InterfaceRule + ?Sized,
    B: InterfaceRule + ?Sized,
{
    visited
        .iter()
        .find(|&(l, r)| first.count_flux(l, r) != second.count_flux(l, r))
}

/// Every pair in `[lo, hi]^2` on which the rules disagree.
pub fn disagreement_set<A, B>(first: &A, second: &B, lo: i64, hi: i64) -> Vec<(i64, i64)>
where
    A: InterfaceRule + ?Sized,
    B: InterfaceRule + ?Sized,
{
    let mut out = Vec::new();
    for l in lo..=hi {
        for r in lo..=hi {
            if first.count_flux(l, r) != second.count_flux(l, r) {
                out.push((l, r));
            }
        }
    }
    out
}
