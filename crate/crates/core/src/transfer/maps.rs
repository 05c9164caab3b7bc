//! Integer transfer maps and interface count fluxes.

use super::params::SchemeParams;
use super::split::FluxSplit;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Plus,
    Minus,
}

/// Rule giving the integer number of quanta moved across one interface per
/// step, from the states on either side.
pub trait InterfaceRule {
    fn count_flux(&self, ql: i64, qr: i64) -> i64;
}

impl<R: InterfaceRule + ?Sized> InterfaceRule for &R {
    #[inline]
    fn count_flux(&self, ql: i64, qr: i64) -> i64 {
        (**self).count_flux(ql, qr)
    }
}

/// Nearest integer with ties away from zero; saturates at the `i64` range so
/// overflow is reported by the checked update rather than here.
#[inline]
fn round_saturating(x: f64) -> i64 {
    x.round() as i64
}

#[derive(Debug, Clone, PartialEq)]
struct Table {
    lo: i64,
    values: Vec<i64>,
}

/// One of the maps `phi±(q) = round(f±(delta q) dt/dx / delta)`.
///
/// The map is defined by the closed form. A table over a contiguous state
/// range can be attached; states outside it fall back to the closed form.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferMap {
    direction: Direction,
    split: FluxSplit,
    delta: f64,
    ratio: f64,
    table: Option<Table>,
}

impl TransferMap {
    pub fn new(direction: Direction, split: FluxSplit, params: &SchemeParams) -> Self {
        Self {
            direction,
            split,
            delta: params.delta.get(),
            ratio: params.ratio(),
            table: None,
        }
    }

    #[inline]
    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn split(&self) -> &FluxSplit {
        &self.split
    }

    /// Human-readable origin of the map.
    pub fn provenance(&self) -> String {
        format!(
            "{:?} map of {:?} split (alpha = {}), delta = {}, dt/dx = {}",
            self.direction,
            self.split.flux(),
            self.split.alpha(),
            self.delta,
            self.ratio
        )
    }

    /// Real-valued moved count before rounding.
    #[inline]
    pub fn unrounded(&self, q: i64) -> f64 {
        let u = self.delta * q as f64;
        let f = match self.direction {
            Direction::Plus => self.split.plus(u),
            Direction::Minus => self.split.minus(u),
        };
        f * self.ratio / self.delta
    }

    #[inline]
    pub fn closed_form(&self, q: i64) -> i64 {
        round_saturating(self.unrounded(q))
    }

    /// Table value, if `q` is inside the tabulated range.
    #[inline]
    pub fn lookup(&self, q: i64) -> Option<i64> {
        let t = self.table.as_ref()?;
        let idx = q.checked_sub(t.lo)?;
        usize::try_from(idx).ok().and_then(|i| t.values.get(i).copied())
    }

    #[inline]
    pub fn eval(&self, q: i64) -> i64 {
        match self.lookup(q) {
            Some(v) => v,
            None => self.closed_form(q),
        }
    }

    /// Memoises the map over `lo..=hi`.
    pub fn tabulated(mut self, lo: i64, hi: i64) -> Self {
        if hi >= lo {
            let values = (lo..=hi).map(|q| self.closed_form(q)).collect();
            self.table = Some(Table { lo, values });
        }
        self
    }

    pub fn table_range(&self) -> Option<(i64, i64)> {
        self.table
            .as_ref()
            .map(|t| (t.lo, t.lo + t.values.len() as i64 - 1))
    }

    /// First `q` in `lo..hi` where the map steps against its direction.
    pub fn first_monotonicity_violation(&self, lo: i64, hi: i64) -> Option<i64> {
        let mut prev = self.eval(lo);
        for q in lo + 1..=hi {
            let v = self.eval(q);
            let bad = match self.direction {
                Direction::Plus => v < prev,
                Direction::Minus => v > prev,
            };
            if bad {
                return Some(q);
            }
            prev = v;
        }
        None
    }
}

/// The pair `(phi+, phi-)`; its count flux is `phi+(qL) + phi-(qR)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitMaps {
    pub plus: TransferMap,
    pub minus: TransferMap,
}

impl SplitMaps {
    pub fn tabulated(self, lo: i64, hi: i64) -> Self {
        Self {
            plus: self.plus.tabulated(lo, hi),
            minus: self.minus.tabulated(lo, hi),
        }
    }

    pub fn split(&self) -> &FluxSplit {
        self.plus.split()
    }
}

impl InterfaceRule for SplitMaps {
    #[inline]
    fn count_flux(&self, ql: i64, qr: i64) -> i64 {
        interface_flux(&self.plus, &self.minus, ql, qr)
    }
}

pub fn build_transfer_maps(split: FluxSplit, params: &SchemeParams) -> SplitMaps {
    SplitMaps {
        plus: TransferMap::new(Direction::Plus, split, params),
        minus: TransferMap::new(Direction::Minus, split, params),
    }
}

/// `F(qL, qR) = phi+(qL) + phi-(qR)`.
#[inline]
pub fn interface_flux(phi_plus: &TransferMap, phi_minus: &TransferMap, ql: i64, qr: i64) -> i64 {
    phi_plus.eval(ql).saturating_add(phi_minus.eval(qr))
}

/// Interface rule induced by quantising a classical two-point flux:
/// `Phi(qL, qR) = round(F(delta qL, delta qR) dt/dx / delta)`.
#[derive(Clone)]
pub struct QuantisedTwoPointFlux<F> {
    flux: F,
    delta: f64,
    ratio: f64,
}

impl<F: Fn(f64, f64) -> f64> QuantisedTwoPointFlux<F> {
    pub fn new(flux: F, params: &SchemeParams) -> Self {
        Self {
            flux,
            delta: params.delta.get(),
            ratio: params.ratio(),
        }
    }
}

impl<F: Fn(f64, f64) -> f64> InterfaceRule for QuantisedTwoPointFlux<F> {
    #[inline]
    fn count_flux(&self, ql: i64, qr: i64) -> i64 {
        let f = (self.flux)(self.delta * ql as f64, self.delta * qr as f64);
        round_saturating(f * self.ratio / self.delta)
    }
}

pub fn quantised_two_point_flux<F: Fn(f64, f64) -> f64>(
    flux: F,
    params: &SchemeParams,
) -> QuantisedTwoPointFlux<F> {
    QuantisedTwoPointFlux::new(flux, params)
}
