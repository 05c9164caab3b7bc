//! Cartesian extension of the transfer update.

use super::maps::InterfaceRule;
use crate::error::{FqnmError, Result};
use crate::quantise::Resolution;

/// Integer states on a periodic Cartesian grid, row-major (last axis fastest).
#[derive(Debug, Clone, PartialEq)]
pub struct GridNd {
    shape: Vec<usize>,
    states: Vec<i64>,
    resolution: Resolution,
}

impl GridNd {
    pub fn new(shape: Vec<usize>, states: Vec<i64>, resolution: Resolution) -> Result<Self> {
        if shape.is_empty() || shape.iter().any(|&n| n < 2) {
            return Err(FqnmError::Config(format!(
                "every axis needs at least 2 cells, got shape {shape:?}"
            )));
        }
        let cells: usize = shape.iter().product();
        if cells != states.len() {
            return Err(FqnmError::LengthMismatch {
                expected: cells,
                actual: states.len(),
            });
        }
        Ok(Self { shape, states, resolution })
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn states(&self) -> &[i64] {
        &self.states
    }

    pub fn resolution(&self) -> Resolution {
        self.resolution
    }

    pub fn dims(&self) -> usize {
        self.shape.len()
    }

    pub fn index(&self, coords: &[usize]) -> usize {
        coords
            .iter()
            .zip(&self.shape)
            .fold(0, |acc, (&c, &n)| acc * n + c)
    }

    fn stride(&self, axis: usize) -> usize {
        self.shape[axis + 1..].iter().product()
    }

    /// Index of the periodic neighbour of `i` one cell up along `axis`.
    #[inline]
    fn upper_neighbour(i: usize, stride: usize, extent: usize) -> usize {
        if (i / stride) % extent + 1 == extent {
            i + stride - extent * stride
        } else {
            i + stride
        }
    }

    fn check_rules(&self, rules: usize) -> Result<()> {
        if rules != self.dims() {
            return Err(FqnmError::LengthMismatch {
                expected: self.dims(),
                actual: rules,
            });
        }
        Ok(())
    }
}

/// Additive directional update: every axis sees the same old state and the
/// flux differences of all axes are summed before the cell is updated.
pub fn step_nd(grid: &GridNd, rules: &[&dyn InterfaceRule]) -> Result<GridNd> {
    grid.check_rules(rules.len())?;
    let n = grid.states.len();
    let mut div = vec![0i64; n];
    let mut flux = vec![0i64; n];
    for (axis, rule) in rules.iter().enumerate() {
        let stride = grid.stride(axis);
        let extent = grid.shape[axis];
        for i in 0..n {
            let j = GridNd::upper_neighbour(i, stride, extent);
            flux[i] = rule.count_flux(grid.states[i], grid.states[j]);
        }
        for i in 0..n {
            let j = GridNd::upper_neighbour(i, stride, extent);
            // flux[i] leaves i through its upper face and enters j through its lower face
            div[i] = div[i].checked_add(flux[i]).ok_or(FqnmError::Overflow { cell: i })?;
            div[j] = div[j].checked_sub(flux[i]).ok_or(FqnmError::Overflow { cell: j })?;
        }
    }
    let states = grid
        .states
        .iter()
        .zip(&div)
        .enumerate()
        .map(|(i, (&q, &d))| q.checked_sub(d).ok_or(FqnmError::Overflow { cell: i }))
        .collect::<Result<Vec<_>>>()?;
    Ok(GridNd {
        shape: grid.shape.clone(),
        states,
        resolution: grid.resolution,
    })
}

/// Sequential directional sweeps: the 1D update along axis 0, then axis 1
/// on the result, and so on.
pub fn step_nd_sequential(grid: &GridNd, rules: &[&dyn InterfaceRule]) -> Result<GridNd> {
    grid.check_rules(rules.len())?;
    let mut current = grid.clone();
    for (axis, rule) in rules.iter().enumerate() {
        let single: Vec<&dyn InterfaceRule> = (0..grid.dims())
            .map(|a| if a == axis { *rule } else { &NoTransfer as &dyn InterfaceRule })
            .collect();
        current = step_nd(&current, &single)?;
    }
    Ok(current)
}

struct NoTransfer;

impl InterfaceRule for NoTransfer {
    #[inline]
    fn count_flux(&self, _ql: i64, _qr: i64) -> i64 {
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flux::ScalarFlux;
    use crate::transfer::maps::{build_transfer_maps, SplitMaps};
    use crate::transfer::params::SchemeParams;
    use crate::transfer::split::lax_friedrichs_split;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn maps(flux: ScalarFlux, alpha: f64, ratio: f64) -> SplitMaps {
        let split = lax_friedrichs_split(flux, alpha, -2.0, 2.0).unwrap();
        let p = SchemeParams::new(Resolution::new(0.1).unwrap(), 1.0, ratio, alpha).unwrap();
        build_transfer_maps(split, &p)
    }

    fn d() -> Resolution {
        Resolution::new(0.1).unwrap()
    }

    #[test]
    fn sequential_unit_cfl_moves_diagonally() {
        let m = maps(ScalarFlux::Advection { speed: 1.0 }, 1.0, 1.0);
        let mut states = vec![0; 16];
        states[0] = 2;
        let mut g = GridNd::new(vec![4, 4], states, d()).unwrap();
        for k in 1..=5 {
            g = step_nd_sequential(&g, &[&m, &m]).unwrap();
            let at = g.index(&[k % 4, k % 4]);
            assert_eq!(g.states()[at], 2);
            assert_eq!(g.states().iter().filter(|&&s| s != 0).count(), 1);
        }
    }

    #[test]
    fn additive_update_sums_directional_fluxes() {
        // unit CFL along both axes at once: total CFL 2, so the source cell
        // goes negative while both neighbours receive the full content
        let m = maps(ScalarFlux::Advection { speed: 1.0 }, 1.0, 1.0);
        let mut states = vec![0; 16];
        states[0] = 2;
        let g = GridNd::new(vec![4, 4], states, d()).unwrap();
        let g1 = step_nd(&g, &[&m, &m]).unwrap();
        assert_eq!(g1.states()[g.index(&[0, 0])], -2);
        assert_eq!(g1.states()[g.index(&[1, 0])], 2);
        assert_eq!(g1.states()[g.index(&[0, 1])], 2);
        assert_eq!(g1.states().iter().sum::<i64>(), 2);
    }

    #[test]
    fn additive_half_cfl_matches_hand_computation() {
        // phi+(q) = round(q / 2) along each axis
        let m = maps(ScalarFlux::Advection { speed: 1.0 }, 1.0, 0.5);
        let mut states = vec![0; 9];
        states[4] = 4;
        let g = GridNd::new(vec![3, 3], states, d()).unwrap();
        let g1 = step_nd(&g, &[&m, &m]).unwrap();
        assert_eq!(g1.states()[4], 0);
        assert_eq!(g1.states()[g.index(&[2, 1])], 2);
        assert_eq!(g1.states()[g.index(&[1, 2])], 2);
    }

    #[test]
    fn constant_grid_is_fixed_point() {
        let m = maps(ScalarFlux::Burgers, 2.0, 0.2);
        let g = GridNd::new(vec![5, 3, 4], vec![7; 60], d()).unwrap();
        assert_eq!(step_nd(&g, &[&m, &m, &m]).unwrap(), g);
        assert_eq!(step_nd_sequential(&g, &[&m, &m, &m]).unwrap(), g);
    }

    #[test]
    fn random_grid_conserves_mass() {
        let m = maps(ScalarFlux::Burgers, 2.0, 0.2).tabulated(-20, 20);
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let states: Vec<i64> = (0..256).map(|_| rng.gen_range(-20..=20)).collect();
        let mass: i64 = states.iter().sum();
        let mut g = GridNd::new(vec![16, 16], states, d()).unwrap();
        let mut h = g.clone();
        for _ in 0..50 {
            g = step_nd(&g, &[&m, &m]).unwrap();
            h = step_nd_sequential(&h, &[&m, &m]).unwrap();
            assert_eq!(g.states().iter().sum::<i64>(), mass);
            assert_eq!(h.states().iter().sum::<i64>(), mass);
        }
    }

    #[test]
    fn one_dimensional_grid_matches_1d_step() {
        let m = maps(ScalarFlux::Burgers, 2.0, 0.4);
        let q: Vec<i64> = vec![3, -4, 10, 0, 7, 7, -12, 5];
        let g = GridNd::new(vec![8], q.clone(), d()).unwrap();
        let f = crate::quantise::QuantisedField::new(q, d()).unwrap();
        let a = step_nd(&g, &[&m]).unwrap();
        let b = crate::transfer::step::step(&f, &m).unwrap();
        assert_eq!(a.states(), b.states());
    }

    #[test]
    fn rule_count_must_match_dimension() {
        let m = maps(ScalarFlux::Burgers, 2.0, 0.4);
        let g = GridNd::new(vec![4, 4], vec![0; 16], d()).unwrap();
        assert!(step_nd(&g, &[&m]).is_err());
        assert!(GridNd::new(vec![4, 4], vec![0; 15], d()).is_err());
    }
}
