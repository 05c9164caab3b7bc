//! Conservation, variation and error metrics, the update-level consistency
//! residual, shock-structure measurements, and level-space entropy
//! diagnostics.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{FqnmError, Result};
use crate::quantise::QuantisedField;
use crate::transfer::{step, SchemeParams, SplitMaps};

pub fn total_mass(states: &[i64]) -> Result<i64> {
    states.iter().enumerate().try_fold(0i64, |acc, (i, &q)| {
        acc.checked_add(q).ok_or(FqnmError::Overflow { cell: i })
    })
}

/// Sums over consecutive blocks of `block` cells (the last block may be short).
pub fn block_aggregate(states: &[i64], block: usize) -> Vec<i64> {
    states.chunks(block.max(1)).map(|c| c.iter().sum()).collect()
}

/// Periodic total variation `sum |q_{i+1} - q_i|`.
pub fn total_variation(states: &[i64]) -> u64 {
    let n = states.len();
    (0..n)
        .map(|i| states[(i + 1) % n].abs_diff(states[i]))
        .fold(0u64, u64::saturating_add)
}

pub fn total_variation_real(values: &[f64]) -> f64 {
    let n = values.len();
    (0..n).map(|i| (values[(i + 1) % n] - values[i]).abs()).sum()
}

pub fn l1_distance(a: &[i64], b: &[i64]) -> u64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.abs_diff(*y))
        .fold(0u64, u64::saturating_add)
}

/// `||u - u_ref||_2 / ||u_ref||_2`.
pub fn relative_l2_error(u: &[f64], reference: &[f64]) -> f64 {
    let num: f64 = u.iter().zip(reference).map(|(a, b)| (a - b) * (a - b)).sum();
    let den: f64 = reference.iter().map(|b| b * b).sum();
    (num / den).sqrt()
}

/// Grid L1 norm `dx * sum |u - u_ref|`.
pub fn l1_error(u: &[f64], reference: &[f64], dx: f64) -> f64 {
    dx * u.iter().zip(reference).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

/// Per-cell `|delta (q'_i - q_i) - du_i|` where `du` is the real split
/// finite-volume increment at `u = delta q`. Four roundings of at most half
/// a quantum each bound this by `2 delta`.
pub fn consistency_residual(q: &QuantisedField, maps: &SplitMaps, params: &SchemeParams) -> Result<Vec<f64>> {
    let next = step(q, maps)?;
    let d = params.delta.get();
    let lambda = params.ratio();
    let split = maps.split();
    let s = q.states();
    let n = s.len();
    let u = |i: usize| d * s[i] as f64;
    Ok((0..n)
        .map(|i| {
            let (l, r) = ((i + n - 1) % n, (i + 1) % n);
            let classical = -lambda * (split.numerical_flux(u(i), u(r)) - split.numerical_flux(u(l), u(i)));
            let quantised = d * (next.states()[i] - s[i]) as f64;
            (quantised - classical).abs()
        })
        .collect())
}

/// A broken step-level invariant, with the states that exposed it.
#[derive(Debug, Clone, PartialEq)]
pub struct InvariantViolation {
    pub kind: ViolationKind,
    pub step: usize,
    pub detail: String,
    pub before: Vec<i64>,
    pub after: Vec<i64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    Mass,
    MaximumPrinciple,
    TotalVariation,
    L1Contraction,
}

impl fmt::Display for InvariantViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:?} violated at step {}: {}\n  before = {:?}\n  after  = {:?}",
            self.kind, self.step, self.detail, self.before, self.after
        )
    }
}

/// Checks mass, the discrete maximum principle and TVD between two
/// consecutive states.
pub fn check_step(step: usize, before: &[i64], after: &[i64]) -> Vec<InvariantViolation> {
    let mut out = Vec::new();
    let mut push = |kind, detail: String| {
        out.push(InvariantViolation {
            kind,
            step,
            detail,
            before: before.to_vec(),
            after: after.to_vec(),
        })
    };
    let (m0, m1) = (before.iter().map(|&x| x as i128).sum::<i128>(), after.iter().map(|&x| x as i128).sum::<i128>());
    if m0 != m1 {
        push(ViolationKind::Mass, format!("mass {m0} -> {m1}"));
    }
    let (lo, hi) = crate::quantise::min_max(before);
    if let Some((i, &v)) = after.iter().enumerate().find(|(_, &v)| v < lo || v > hi) {
        push(
            ViolationKind::MaximumPrinciple,
            format!("cell {i} = {v} outside [{lo}, {hi}]"),
        );
    }
    let (tv0, tv1) = (total_variation(before), total_variation(after));
    if tv1 > tv0 {
        push(ViolationKind::TotalVariation, format!("TV {tv0} -> {tv1}"));
    }
    out
}

/// Checks `||a' - b'||_1 <= ||a - b||_1` for two solutions advanced together.
pub fn check_l1_contraction(
    step: usize,
    before: (&[i64], &[i64]),
    after: (&[i64], &[i64]),
) -> Option<InvariantViolation> {
    let d0 = l1_distance(before.0, before.1);
    let d1 = l1_distance(after.0, after.1);
    (d1 > d0).then(|| InvariantViolation {
        kind: ViolationKind::L1Contraction,
        step,
        detail: format!("L1 distance {d0} -> {d1}; second solution before {:?} after {:?}", before.1, after.1),
        before: before.0.to_vec(),
        after: after.0.to_vec(),
    })
}

/// Index `i` of the steepest descent `u_{i+1} - u_i` (periodic); the first
/// one wins on ties.
pub fn steepest_descent_cell(values: &[f64]) -> usize {
    let n = values.len();
    let mut best = (0, f64::INFINITY);
    for i in 0..n {
        let g = values[(i + 1) % n] - values[i];
        if g < best.1 {
            best = (i, g);
        }
    }
    best.0
}

/// Number of cells in `window` whose value lies strictly inside the 10 %–90 %
/// band of the jump between `low` and `high`.
pub fn transition_width(values: &[f64], window: std::ops::Range<usize>, low: f64, high: f64) -> usize {
    let (a, b) = if low <= high { (low, high) } else { (high, low) };
    let (lo, hi) = (a + 0.1 * (b - a), a + 0.9 * (b - a));
    values[window].iter().filter(|&&v| v > lo && v < hi).count()
}

/// Periodic cell distance.
pub fn cell_distance(a: usize, b: usize, n: usize) -> usize {
    let d = a.abs_diff(b) % n;
    d.min(n - d)
}

/// Occupation counts of integer levels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelDistribution {
    counts: BTreeMap<i64, usize>,
    cells: usize,
}

impl LevelDistribution {
    pub fn counts(&self) -> &BTreeMap<i64, usize> {
        &self.counts
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn probability(&self, level: i64) -> f64 {
        self.counts.get(&level).map_or(0.0, |&c| c as f64 / self.cells as f64)
    }

    pub fn probabilities(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.counts.iter().map(|(&k, &c)| (k, c as f64 / self.cells as f64))
    }

    pub fn occupied(&self) -> usize {
        self.counts.len()
    }
}

pub fn level_distribution(states: &[i64]) -> LevelDistribution {
    let mut counts = BTreeMap::new();
    for &q in states {
        *counts.entry(q).or_insert(0) += 1;
    }
    LevelDistribution {
        counts,
        cells: states.len(),
    }
}

/// Shannon entropy `-sum p ln p` of a probability vector; zero entries are skipped.
pub fn entropy(p: &[f64]) -> f64 {
    -p.iter().filter(|&&x| x > 0.0).map(|&x| x * x.ln()).sum::<f64>()
}

pub fn discrete_entropy(p: &LevelDistribution) -> f64 {
    -p.probabilities().map(|(_, x)| x * x.ln()).sum::<f64>()
}

/// `exp(S)`.
pub fn effective_levels(p: &LevelDistribution) -> f64 {
    discrete_entropy(p).exp()
}

/// Empirical level-to-level transition frequencies between two snapshots.
/// Entry `(target, source)` is `N(target, source) / c(source)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelTransitionMatrix {
    transitions: BTreeMap<(i64, i64), usize>,
    source: LevelDistribution,
    target: LevelDistribution,
}

impl LevelTransitionMatrix {
    pub fn entry(&self, target: i64, source: i64) -> f64 {
        match (self.transitions.get(&(target, source)), self.source.counts.get(&source)) {
            (Some(&n), Some(&c)) => n as f64 / c as f64,
            _ => 0.0,
        }
    }

    pub fn source_levels(&self) -> impl Iterator<Item = i64> + '_ {
        self.source.counts.keys().copied()
    }

    pub fn target_levels(&self) -> impl Iterator<Item = i64> + '_ {
        self.target.counts.keys().copied()
    }

    pub fn source(&self) -> &LevelDistribution {
        &self.source
    }

    pub fn target(&self) -> &LevelDistribution {
        &self.target
    }

    pub fn column_sum(&self, source: i64) -> f64 {
        self.transitions
            .iter()
            .filter(|((_, s), _)| *s == source)
            .map(|(&(t, s), _)| self.entry(t, s))
            .sum()
    }

    pub fn row_sum(&self, target: i64) -> f64 {
        self.transitions
            .range((target, i64::MIN)..=(target, i64::MAX))
            .map(|(&(t, s), _)| self.entry(t, s))
            .sum()
    }

    /// `M p` for a distribution over source levels.
    pub fn apply(&self, p: &LevelDistribution) -> BTreeMap<i64, f64> {
        let mut out = BTreeMap::new();
        for &(t, s) in self.transitions.keys() {
            *out.entry(t).or_insert(0.0) += self.entry(t, s) * p.probability(s);
        }
        out
    }

    /// The counting identity behind `p^{n+1} = M p^n`: for every target
    /// level the transition counts add up to its occupation, exactly.
    pub fn propagates_exactly(&self) -> bool {
        let mut rows: BTreeMap<i64, usize> = BTreeMap::new();
        for (&(t, _), &n) in &self.transitions {
            *rows.entry(t).or_insert(0) += n;
        }
        rows == self.target.counts
    }
}

pub fn level_transition_matrix(before: &[i64], after: &[i64]) -> Result<LevelTransitionMatrix> {
    if before.len() != after.len() {
        return Err(FqnmError::LengthMismatch {
            expected: before.len(),
            actual: after.len(),
        });
    }
    let mut transitions = BTreeMap::new();
    for (&k, &kp) in before.iter().zip(after) {
        *transitions.entry((kp, k)).or_insert(0) += 1;
    }
    Ok(LevelTransitionMatrix {
        transitions,
        source: level_distribution(before),
        target: level_distribution(after),
    })
}

/// Largest deviation of a row sum from one, over occupied target levels.
pub fn bistochastic_defect(m: &LevelTransitionMatrix) -> f64 {
    m.target_levels()
        .map(|k| (m.row_sum(k) - 1.0).abs())
        .fold(0.0, f64::max)
}

pub fn entropy_rate(s_before: f64, s_after: f64, dt: f64) -> f64 {
    (s_after - s_before) / dt
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flux::ScalarFlux;
    use crate::quantise::Resolution;
    use crate::transfer::{build_transfer_maps, lax_friedrichs_split};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn mass_and_variation_examples() {
        assert_eq!(total_mass(&[0, 2, 0, 0]).unwrap(), 2);
        assert_eq!(total_mass(&[0; 5]).unwrap(), 0);
        assert!(total_mass(&[i64::MAX, 1]).is_err());
        assert_eq!(total_variation(&[0, 2, 0]), 4);
        assert_eq!(total_variation(&[9; 6]), 0);
        assert_eq!(block_aggregate(&[1, 2, 3, 4, 5], 2), vec![3, 7, 5]);
    }

    #[test]
    fn distance_examples() {
        assert_eq!(l1_distance(&[1, 2, 3], &[1, 2, 3]), 0);
        assert_eq!(l1_distance(&[1, 5, 3], &[1, 2, 3]), 3);
        assert_eq!(relative_l2_error(&[1.0, 2.0], &[1.0, 2.0]), 0.0);
        assert!((relative_l2_error(&[0.0, 0.0], &[3.0, 4.0]) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn residual_is_zero_for_unit_cfl_advection() {
        let split = lax_friedrichs_split(ScalarFlux::Advection { speed: 1.0 }, 1.0, -10.0, 10.0).unwrap();
        let p = SchemeParams::new(Resolution::new(0.01).unwrap(), 0.1, 0.1, 1.0).unwrap();
        let maps = build_transfer_maps(split, &p);
        let q = QuantisedField::new(vec![5, -3, 100, 7, 0], p.delta).unwrap();
        let r = consistency_residual(&q, &maps, &p).unwrap();
        assert!(r.iter().all(|&x| x < 1e-12), "{r:?}");
    }

    #[test]
    fn residual_bounded_by_two_quanta() {
        let d = 0.01;
        let split = lax_friedrichs_split(ScalarFlux::Burgers, 2.0, -2.0, 2.0).unwrap();
        let p = SchemeParams::new(Resolution::new(d).unwrap(), 0.01, 0.004, 2.0).unwrap();
        let maps = build_transfer_maps(split, &p);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let q = QuantisedField::new((0..16).map(|_| rng.gen_range(-200..=200)).collect(), p.delta).unwrap();
            let r = consistency_residual(&q, &maps, &p).unwrap();
            assert!(r.iter().all(|&x| x <= 2.0 * d));
        }
    }

    #[test]
    fn check_step_reports_violations() {
        assert!(check_step(0, &[0, 2, 0], &[0, 0, 2]).is_empty());
        let v = check_step(3, &[0, 2, 0], &[1, -1, 2]);
        let kinds: Vec<_> = v.iter().map(|x| x.kind).collect();
        assert_eq!(kinds, vec![ViolationKind::MaximumPrinciple, ViolationKind::TotalVariation]);
        assert!(v[0].to_string().contains("before = [0, 2, 0]"));
        assert_eq!(check_step(0, &[1, 1], &[1, 2])[0].kind, ViolationKind::Mass);
        assert!(check_l1_contraction(0, (&[0, 1], &[0, 0]), (&[1, 0], &[0, 0])).is_none());
        assert!(check_l1_contraction(0, (&[0, 1], &[0, 0]), (&[2, -1], &[0, 0])).is_some());
    }

    #[test]
    fn shock_measurements() {
        let u = [1.0, 1.0, 0.9, 0.5, 0.1, 0.0, 0.0, 0.5];
        assert_eq!(steepest_descent_cell(&u), 2);
        assert_eq!(transition_width(&u, 0..7, 0.0, 1.0), 1);
        assert_eq!(transition_width(&[1.0, 0.85, 0.5, 0.15, 0.0], 0..5, 1.0, 0.0), 3);
        assert_eq!(cell_distance(1, 126, 128), 3);
    }

    #[test]
    fn level_distribution_examples() {
        let p = level_distribution(&[1, 1, 2, 2]);
        assert_eq!(p.probability(1), 0.5);
        assert_eq!(p.probability(2), 0.5);
        assert_eq!(p.probability(3), 0.0);
        let c = level_distribution(&[4; 10]);
        assert_eq!(c.occupied(), 1);
        assert_eq!(discrete_entropy(&c), 0.0);
        assert_eq!(effective_levels(&c), 1.0);
        let u2 = level_distribution(&[0, 9]);
        assert!((discrete_entropy(&u2) - 2f64.ln()).abs() < 1e-15);
        assert!((effective_levels(&u2) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn effective_levels_between_one_and_support() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..500 {
            let n = rng.gen_range(2..200);
            let q: Vec<i64> = (0..n).map(|_| rng.gen_range(-5..=5)).collect();
            let p = level_distribution(&q);
            let total: f64 = p.probabilities().map(|(_, x)| x).sum();
            assert!((total - 1.0).abs() < 1e-12);
            let ne = effective_levels(&p);
            assert!(ne >= 1.0 - 1e-12 && ne <= p.occupied() as f64 + 1e-9);
        }
    }

    #[test]
    fn transition_matrix_example() {
        let m = level_transition_matrix(&[1, 1, 2], &[1, 2, 2]).unwrap();
        assert_eq!(m.entry(1, 1), 0.5);
        assert_eq!(m.entry(2, 1), 0.5);
        assert_eq!(m.entry(1, 2), 0.0);
        assert_eq!(m.entry(2, 2), 1.0);
        assert_eq!(m.column_sum(1), 1.0);
        assert_eq!(m.column_sum(2), 1.0);
        assert_eq!(bistochastic_defect(&m), 0.5);
        assert!(m.propagates_exactly());
        let next = m.apply(m.source());
        assert!((next[&1] - 1.0 / 3.0).abs() < 1e-15);
        assert!((next[&2] - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn identity_and_permutation_dynamics() {
        let q = [3, 1, 4, 1, 5];
        let m = level_transition_matrix(&q, &q).unwrap();
        for k in m.source_levels() {
            assert_eq!(m.entry(k, k), 1.0);
        }
        assert_eq!(bistochastic_defect(&m), 0.0);
        // relabelling levels one-to-one is a permutation in level space
        let shifted: Vec<i64> = q.iter().map(|x| x + 10).collect();
        let m = level_transition_matrix(&q, &shifted).unwrap();
        assert_eq!(bistochastic_defect(&m), 0.0);
        let s0 = discrete_entropy(m.source());
        let s1 = discrete_entropy(m.target());
        assert_eq!(entropy_rate(s0, s1, 0.1), 0.0);
        assert!(level_transition_matrix(&[1], &[1, 2]).is_err());
    }
}
