//! Exact symmetrization calculus for piecewise-constant boundary data:
//! distribution function, decreasing rearrangement, maximal function, and
//! the rearrangement pairing bound.
//!
//! Everything here is computed by sorting and exact partial sums; there is
//! no level-set sampling, so equimeasurability holds to the last bit.

use crate::mesh::BoundaryFunction;
use crate::{Error, Result};

/// A nonincreasing right-continuous step function on (0, T]: the value on
/// `(breakpoints[i], breakpoints[i+1]]` is `levels[i]`.
#[derive(Debug, Clone)]
pub struct StepProfile {
    /// Strictly increasing, starts at 0, ends at the total measure T.
    pub breakpoints: Vec<f64>,
    /// Nonincreasing, nonnegative levels, one per interval.
    pub levels: Vec<f64>,
}

impl StepProfile {
    pub fn new(breakpoints: Vec<f64>, levels: Vec<f64>) -> Result<Self> {
        if breakpoints.len() != levels.len() + 1 || levels.is_empty() {
            return Err(Error::InvalidParams(
                "step profile needs one more breakpoint than levels".into(),
            ));
        }
        if breakpoints[0] != 0.0 {
            return Err(Error::InvalidParams("breakpoints must start at 0".into()));
        }
        if breakpoints.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParams(
                "breakpoints must be strictly increasing".into(),
            ));
        }
        if levels.windows(2).any(|w| w[1] > w[0]) || levels.iter().any(|&v| v < 0.0) {
            return Err(Error::InvalidParams(
                "levels must be nonincreasing and nonnegative".into(),
            ));
        }
        Ok(StepProfile {
            breakpoints,
            levels,
        })
    }

    /// Total measure T.
    pub fn total(&self) -> f64 {
        *self.breakpoints.last().unwrap()
    }

    /// Value at t, for t in (0, T]. Values below the first breakpoint take
    /// the first level (right-continuity at 0+), values above T are 0.
    pub fn value(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return self.levels[0];
        }
        if t > self.total() {
            return 0.0;
        }
        // Value on (b[i], b[i+1]] is levels[i].
        match self
            .breakpoints
            .binary_search_by(|b| b.partial_cmp(&t).unwrap())
        {
            Ok(idx) => {
                if idx == 0 {
                    self.levels[0]
                } else {
                    self.levels[idx - 1]
                }
            }
            Err(idx) => self.levels[idx - 1],
        }
    }

    /// Measure of the superlevel set { t : value(t) > s }. Because levels are
    /// nonincreasing this is a prefix of the breakpoints and comes out as an
    /// exact partial sum.
    pub fn distribution(&self, s: f64) -> f64 {
        let k = self.levels.iter().take_while(|&&v| v > s).count();
        self.breakpoints[k]
    }

    /// Integral over (0, T], an exact finite sum.
    pub fn integral(&self) -> f64 {
        self.levels
            .iter()
            .zip(self.breakpoints.windows(2))
            .map(|(v, w)| v * (w[1] - w[0]))
            .sum()
    }

    /// Pointwise |.|^r power: rearrangement commutes with powers of the
    /// absolute value, so this is again a valid profile.
    pub fn pow(&self, r: f64) -> StepProfile {
        StepProfile {
            breakpoints: self.breakpoints.clone(),
            levels: self.levels.iter().map(|v| v.powf(r)).collect(),
        }
    }

    /// Scales the profile by |c|.
    pub fn scale(&self, c: f64) -> StepProfile {
        StepProfile {
            breakpoints: self.breakpoints.clone(),
            levels: self.levels.iter().map(|v| v * c.abs()).collect(),
        }
    }
}

/// Edge data sorted by descending absolute value; shared by the
/// distribution function and the rearrangement so both produce the same
/// partial sums bit for bit.
fn sorted_abs_pairs(f: &BoundaryFunction) -> Vec<(f64, f64)> {
    let mut pairs: Vec<(f64, f64)> = f
        .values
        .iter()
        .zip(&f.measures)
        .map(|(v, m)| (v.abs(), *m))
        .collect();
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    pairs
}

/// Distribution function: the measure of { |f| > s }.
pub fn distribution(f: &BoundaryFunction, s: f64) -> f64 {
    let mut acc = 0.0;
    for (v, m) in sorted_abs_pairs(f) {
        if v > s {
            acc += m;
        } else {
            break;
        }
    }
    acc
}

/// Decreasing rearrangement of |f| as an exact step profile. Equal values
/// are merged into a single step, and zero-valued edges are kept as a final
/// level-0 step so the total measure always equals the full boundary
/// measure.
pub fn rearrange(f: &BoundaryFunction) -> StepProfile {
    let pairs = sorted_abs_pairs(f);
    let mut breakpoints = vec![0.0];
    let mut levels = Vec::new();
    let mut acc = 0.0;
    for (v, m) in pairs {
        acc += m;
        match levels.last() {
            Some(&last) if last == v => {
                *breakpoints.last_mut().unwrap() = acc;
            }
            _ => {
                levels.push(v);
                breakpoints.push(acc);
            }
        }
    }
    StepProfile {
        breakpoints,
        levels,
    }
}

/// The running-average (maximal) function of a step profile, stored in
/// exact piecewise-rational form: on each step interval the value is
/// `(A_{i-1} + v_i (t - t_{i-1})) / t` with `A_i` the cumulative integral.
#[derive(Debug, Clone)]
pub struct MaximalProfile {
    pub breakpoints: Vec<f64>,
    pub levels: Vec<f64>,
    /// Cumulative integral of the profile at each breakpoint.
    pub cumulative: Vec<f64>,
}

impl MaximalProfile {
    pub fn total(&self) -> f64 {
        *self.breakpoints.last().unwrap()
    }

    /// Value of the running average at t in (0, T]. Continuous, with limit
    /// `levels[0]` at 0+.
    pub fn value(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return self.levels[0];
        }
        let t = t.min(self.total());
        let idx = match self
            .breakpoints
            .binary_search_by(|b| b.partial_cmp(&t).unwrap())
        {
            Ok(0) => 0,
            Ok(i) => i - 1,
            Err(i) => i - 1,
        };
        (self.cumulative[idx] + self.levels[idx] * (t - self.breakpoints[idx])) / t
    }
}

/// Builds the maximal function of a step profile.
pub fn maximal_function(p: &StepProfile) -> MaximalProfile {
    let mut cumulative = Vec::with_capacity(p.breakpoints.len());
    cumulative.push(0.0);
    let mut acc = 0.0;
    for (v, w) in p.levels.iter().zip(p.breakpoints.windows(2)) {
        acc += v * (w[1] - w[0]);
        cumulative.push(acc);
    }
    MaximalProfile {
        breakpoints: p.breakpoints.clone(),
        levels: p.levels.clone(),
        cumulative,
    }
}

/// Both sides of the rearrangement pairing bound for nonnegative data on a
/// common mesh: the boundary integral of the product, and the integral of
/// the product of the two rearrangements. The left side never exceeds the
/// right side (up to roundoff).
pub fn hardy_littlewood_pair(
    f: &BoundaryFunction,
    g: &BoundaryFunction,
) -> Result<(f64, f64)> {
    if !f.same_partition(g) {
        return Err(Error::MeshMismatch(
            "pairing requires both functions on the same mesh boundary".into(),
        ));
    }
    let lhs: f64 = f
        .values
        .iter()
        .zip(&g.values)
        .zip(&f.measures)
        .map(|((a, b), m)| a * b * m)
        .sum();
    let fs = rearrange(f);
    let gs = rearrange(g);
    let rhs = product_integral(&fs, &gs);
    Ok((lhs, rhs))
}

/// Exact integral over (0, T] of the product of two step profiles with a
/// common total measure.
pub fn product_integral(a: &StepProfile, b: &StepProfile) -> f64 {
    let mut total = 0.0;
    let mut t = 0.0;
    let (mut ia, mut ib) = (0usize, 0usize);
    let tmax = a.total().min(b.total());
    while t < tmax && ia < a.levels.len() && ib < b.levels.len() {
        let next = a.breakpoints[ia + 1].min(b.breakpoints[ib + 1]);
        total += a.levels[ia] * b.levels[ib] * (next - t);
        if a.breakpoints[ia + 1] <= next {
            ia += 1;
        }
        if b.breakpoints[ib + 1] <= next {
            ib += 1;
        }
        t = next;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::Mesh;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn bf(values: &[f64], measures: &[f64]) -> BoundaryFunction {
        BoundaryFunction::from_parts(values.to_vec(), measures.to_vec()).unwrap()
    }

    #[test]
    fn distribution_counts_exceeding_edges() {
        let f = bf(&[3.0, 1.0], &[1.0, 2.0]);
        assert_eq!(distribution(&f, 2.0), 1.0);
        assert_eq!(distribution(&f, 0.5), 3.0);
        assert_eq!(distribution(&f, 3.0), 0.0);
    }

    #[test]
    fn rearrangement_sorts_and_accumulates() {
        let f = bf(&[1.0, 3.0], &[2.0, 1.0]);
        let p = rearrange(&f);
        assert_eq!(p.breakpoints, vec![0.0, 1.0, 3.0]);
        assert_eq!(p.levels, vec![3.0, 1.0]);
    }

    #[test]
    fn constant_rearranges_to_single_step() {
        let mesh = Mesh::unit_square(3);
        let f = BoundaryFunction::constant(&mesh, -2.0);
        let p = rearrange(&f);
        assert_eq!(p.levels, vec![2.0]);
        assert_relative_eq!(p.total(), 4.0, max_relative = 1e-12);
    }

    #[test]
    fn zero_tail_keeps_total_measure() {
        let f = bf(&[2.0, 0.0, 0.0], &[1.0, 1.0, 2.0]);
        let p = rearrange(&f);
        assert_eq!(p.levels, vec![2.0, 0.0]);
        assert_eq!(p.total(), 4.0);
    }

    #[test]
    fn maximal_of_two_steps() {
        let p = StepProfile::new(vec![0.0, 1.0, 3.0], vec![3.0, 1.0]).unwrap();
        let m = maximal_function(&p);
        assert_relative_eq!(m.value(2.0), 2.0, max_relative = 1e-14);
        assert_relative_eq!(m.value(1.0), 3.0, max_relative = 1e-14);
        assert_relative_eq!(m.value(0.5), 3.0, max_relative = 1e-14);
    }

    #[test]
    fn maximal_of_constant_is_constant() {
        let p = StepProfile::new(vec![0.0, 5.0], vec![4.0]).unwrap();
        let m = maximal_function(&p);
        for &t in &[0.1, 1.0, 4.9, 5.0] {
            assert_relative_eq!(m.value(t), 4.0, max_relative = 1e-14);
        }
    }

    #[test]
    fn pairing_equal_single_blocks() {
        let f = bf(&[1.0, 0.0], &[0.7, 1.0]);
        let (lhs, rhs) = hardy_littlewood_pair(&f, &f).unwrap();
        assert_relative_eq!(lhs, 0.7, max_relative = 1e-14);
        assert_relative_eq!(rhs, 0.7, max_relative = 1e-14);
    }

    #[test]
    fn opposite_sorting_is_strict() {
        let f = bf(&[3.0, 1.0], &[1.0, 1.0]);
        let g = bf(&[1.0, 3.0], &[1.0, 1.0]);
        let (lhs, rhs) = hardy_littlewood_pair(&f, &g).unwrap();
        assert!(lhs < rhs);
        assert_relative_eq!(lhs, 6.0, max_relative = 1e-14);
        assert_relative_eq!(rhs, 10.0, max_relative = 1e-14);
    }

    #[test]
    fn mismatched_meshes_rejected() {
        let f = bf(&[1.0], &[1.0]);
        let g = bf(&[1.0, 1.0], &[0.5, 0.5]);
        assert!(hardy_littlewood_pair(&f, &g).is_err());
    }

    #[test]
    fn profile_integral_matches_l1_norm() {
        let f = bf(&[-2.0, 0.5, 3.0, 0.0], &[0.25, 1.5, 0.3, 1.0]);
        let p = rearrange(&f);
        let l1: f64 = f
            .values
            .iter()
            .zip(&f.measures)
            .map(|(v, m)| v.abs() * m)
            .sum();
        assert_relative_eq!(p.integral(), l1, max_relative = 1e-13);
    }

    proptest! {
        /// Equimeasurability: the distribution of the rearranged profile
        /// equals the distribution of the data, bit for bit.
        #[test]
        fn equimeasurable(values in proptest::collection::vec(-50.0f64..50.0, 1..24),
                          raw_measures in proptest::collection::vec(0.01f64..5.0, 24),
                          s in 0.001f64..60.0) {
            let measures = raw_measures[..values.len()].to_vec();
            let f = BoundaryFunction::from_parts(values, measures).unwrap();
            let p = rearrange(&f);
            prop_assert_eq!(distribution(&f, s), p.distribution(s));
        }

        /// Scaling: rearrangement of c f is |c| times the rearrangement of f.
        #[test]
        fn scaling(values in proptest::collection::vec(-10.0f64..10.0, 1..16),
                   raw_measures in proptest::collection::vec(0.01f64..2.0, 16),
                   c in -4.0f64..4.0) {
            let measures = raw_measures[..values.len()].to_vec();
            let f = BoundaryFunction::from_parts(values.clone(), measures.clone()).unwrap();
            let scaled_vals: Vec<f64> = values.iter().map(|v| c * v).collect();
            let fc = BoundaryFunction::from_parts(scaled_vals, measures).unwrap();
            let p = rearrange(&f).scale(c);
            let pc = rearrange(&fc);
            // Merged steps can differ when scaling by 0 collapses levels;
            // compare as functions instead of representations.
            for &t in &[0.01, 0.4, 1.3, p.total() * 0.99] {
                prop_assert!((p.value(*&t) - pc.value(*&t)).abs() <= 1e-12 * (1.0 + p.value(*&t).abs()));
            }
        }

        /// The maximal function dominates the profile and is nonincreasing.
        #[test]
        fn maximal_dominates(values in proptest::collection::vec(0.0f64..10.0, 1..16),
                             raw_measures in proptest::collection::vec(0.01f64..2.0, 16)) {
            let measures = raw_measures[..values.len()].to_vec();
            let f = BoundaryFunction::from_parts(values, measures).unwrap();
            let p = rearrange(&f);
            let m = maximal_function(&p);
            let total = p.total();
            let mut prev = f64::INFINITY;
            for i in 1..=64 {
                let t = total * (i as f64) / 64.0;
                let mv = m.value(t);
                prop_assert!(mv >= p.value(t) - 1e-12);
                prop_assert!(mv <= prev + 1e-12 * (1.0 + prev.abs()));
                prev = mv;
            }
        }
    }
}
