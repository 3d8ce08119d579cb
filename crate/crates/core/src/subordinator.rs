//! The multistable subordinator `D(t) = Σ_{t_i ≤ t} x_i` built from a
//! truncated point pattern, and the closed-form Laplace transform
//! `E e^{-θ D(t)} = exp{-∫₀ᵗ Γ(1-β(s)) θ^{β(s)} ds}`.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::numeric::{gamma, integrate, QUAD_TOLERANCE};
use crate::ppp::PointPattern;
use crate::stability::StabilityIndex;

pub use crate::numeric::gamma_fn;

/// A truncated sample path of D on `[0, horizon]`: a right-continuous step
/// function with jumps `sizes[i]` at `times[i]`.
///
/// Prefix sums are carried as unevaluated pairs `prefix[i] + residual[i]`.
/// A single huge jump can push D past the point where later small jumps
/// are below one ulp; the residual keeps those jumps visible, so the sums
/// stay strictly increasing and the inverse stays exact.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpPath {
    times: Vec<f64>,
    sizes: Vec<f64>,
    prefix: Vec<f64>,
    residual: Vec<f64>,
    horizon: f64,
}

/// Error-free `a + b = s + e`.
#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

impl JumpPath {
    /// Sorts the points by time and accumulates prefix sums in that order.
    /// Points sharing a time are merged into a single jump.
    pub fn from_pattern(pattern: &PointPattern) -> Self {
        let mut points = pattern.points().to_vec();
        points.sort_by(|a, b| a.time.total_cmp(&b.time));
        let mut times = Vec::with_capacity(points.len());
        let mut sizes: Vec<f64> = Vec::with_capacity(points.len());
        for p in points {
            match times.last() {
                Some(&last) if last == p.time => *sizes.last_mut().unwrap() += p.size,
                _ => {
                    times.push(p.time);
                    sizes.push(p.size);
                }
            }
        }
        let mut prefix = Vec::with_capacity(sizes.len());
        let mut residual = Vec::with_capacity(sizes.len());
        let (mut hi, mut lo) = (0.0, 0.0);
        for &x in &sizes {
            let (s, e) = two_sum(hi, x);
            (hi, lo) = two_sum(s, lo + e);
            prefix.push(hi);
            residual.push(lo);
        }
        Self {
            times,
            sizes,
            prefix,
            residual,
            horizon: pattern.horizon(),
        }
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn sizes(&self) -> &[f64] {
        &self.sizes
    }

    /// Prefix sums rounded to the nearest f64.
    pub fn prefix(&self) -> &[f64] {
        &self.prefix
    }

    /// Rounding residuals of the prefix sums.
    pub fn residual(&self) -> &[f64] {
        &self.residual
    }

    /// Largest f64 not above the exact prefix sum up to jump `i`. Rounding
    /// down keeps `E(D(t)) ≤ t` exact.
    pub fn prefix_floor(&self, i: usize) -> f64 {
        if self.residual[i] < 0.0 {
            self.prefix[i].next_down()
        } else {
            self.prefix[i]
        }
    }

    /// Compares the exact prefix sum up to jump `i` with `r`.
    pub fn cmp_prefix(&self, i: usize, r: f64) -> Ordering {
        self.prefix[i]
            .total_cmp(&r)
            .then(self.residual[i].total_cmp(&0.0))
    }

    /// Index of the first jump whose exact prefix sum is at least `r`.
    pub fn first_reaching(&self, r: f64) -> usize {
        let mut i = self.prefix.partition_point(|&p| p < r);
        while i < self.prefix.len() && self.cmp_prefix(i, r) == Ordering::Less {
            i += 1;
        }
        i
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// D(horizon).
    pub fn total(&self) -> f64 {
        self.prefix.len().checked_sub(1).map_or(0.0, |i| self.prefix_floor(i))
    }

    /// D(t), right-continuous: a jump at `t` is included. Rounded down to
    /// an f64 when the exact sum is not representable.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(0.0..=self.horizon).contains(&t) {
            return Err(Error::Domain {
                what: "t",
                value: t,
                domain: "[0, horizon]",
            });
        }
        let i = self.times.partition_point(|&s| s <= t);
        Ok(if i == 0 { 0.0 } else { self.prefix_floor(i - 1) })
    }

    /// D(t + h) - D(t).
    pub fn increment(&self, t: f64, h: f64) -> Result<f64> {
        if !(h > 0.0) {
            return Err(Error::Domain {
                what: "h",
                value: h,
                domain: "(0, inf)",
            });
        }
        Ok(self.eval(t + h)? - self.eval(t)?)
    }

    /// Times strictly increasing, sizes positive, exact prefix sums
    /// strictly increasing.
    pub fn is_strictly_increasing(&self) -> bool {
        let sums = || self.prefix.iter().zip(&self.residual);
        self.times.windows(2).all(|w| w[0] < w[1])
            && self.sizes.iter().all(|&s| s > 0.0)
            && sums().zip(sums().skip(1)).all(|(a, b)| a.0 < b.0 || (a.0 == b.0 && a.1 < b.1))
            && self.prefix.first().map_or(true, |&p| p > 0.0)
    }
}

pub fn build_path(pattern: &PointPattern) -> JumpPath {
    JumpPath::from_pattern(pattern)
}

/// `∫₀ᵗ Γ(1-β(s)) θ^{β(s)} ds`, the Laplace exponent of D(t).
pub fn laplace_exponent(idx: &StabilityIndex, theta: f64, t: f64) -> Result<f64> {
    if !(theta >= 0.0) || !theta.is_finite() {
        return Err(Error::Domain {
            what: "theta",
            value: theta,
            domain: "[0, inf)",
        });
    }
    if !(0.0..=idx.horizon()).contains(&t) {
        return Err(Error::Domain {
            what: "t",
            value: t,
            domain: "[0, horizon]",
        });
    }
    if theta == 0.0 {
        return Ok(0.0);
    }
    let integrand = |s: f64| {
        let b = idx.value(s);
        gamma(1.0 - b) * theta.powf(b)
    };
    if idx.is_constant() {
        return Ok(t * integrand(0.0));
    }
    Ok(integrate(integrand, 0.0, t, QUAD_TOLERANCE))
}

/// `E exp(-θ D(t))`.
pub fn laplace_transform(idx: &StabilityIndex, theta: f64, t: f64) -> Result<f64> {
    Ok((-laplace_exponent(idx, theta, t)?).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ppp::{sample_stationary, sample_threshold};
    use crate::rng::RngStream;
    use std::f64::consts::PI;

    fn pattern_of(points: &[(f64, f64)]) -> PointPattern {
        let points = points
            .iter()
            .map(|&(time, size)| crate::ppp::JumpPoint { time, size })
            .collect();
        PointPattern::from_points(points, 1.0, crate::ppp::Truncation::Threshold { eps: 0.5 })
            .unwrap()
    }

    fn example_path() -> JumpPath {
        build_path(&pattern_of(&[(0.5, 2.0), (0.2, 1.0)]))
    }

    #[test]
    fn build_sorts_and_accumulates() {
        let p = example_path();
        assert_eq!(p.times(), &[0.2, 0.5]);
        assert_eq!(p.prefix(), &[1.0, 3.0]);
        let empty = build_path(&pattern_of(&[]));
        assert!(empty.is_empty());
        assert_eq!(empty.eval(0.7).unwrap(), 0.0);
    }

    #[test]
    fn coincident_times_are_merged() {
        let p = build_path(&pattern_of(&[(0.3, 1.0), (0.3, 0.5), (0.1, 2.0)]));
        assert_eq!(p.times(), &[0.1, 0.3]);
        assert_eq!(p.sizes(), &[2.0, 1.5]);
        assert_eq!(p.prefix(), &[2.0, 3.5]);
        assert!(p.is_strictly_increasing());
    }

    #[test]
    fn eval_is_right_continuous() {
        let p = example_path();
        assert_eq!(p.eval(0.3).unwrap(), 1.0);
        assert_eq!(p.eval(0.2).unwrap(), 1.0);
        assert_eq!(p.eval(0.1).unwrap(), 0.0);
        assert!(matches!(p.eval(1.5), Err(Error::Domain { .. })));
    }

    #[test]
    fn increments() {
        let p = example_path();
        assert_eq!(p.increment(0.1, 0.3).unwrap(), 1.0);
        assert_eq!(p.increment(0.25, 0.1).unwrap(), 0.0);
        assert_eq!(p.increment(0.1, 0.45).unwrap(), 3.0);
        assert!(p.increment(0.9, 0.2).is_err());
    }

    #[test]
    fn large_path_prefix_matches_tree_resummation() {
        let idx = StabilityIndex::constant(0.5, 1.0).unwrap();
        let mut s = RngStream::split(9, 0);
        let pattern = sample_stationary(&mut s, 1.0, 100_000.0, &idx).unwrap();
        assert!(pattern.len() > 90_000);
        let path = build_path(&pattern);
        assert!(path.is_strictly_increasing());
        fn tree_sum(xs: &[f64]) -> f64 {
            match xs.len() {
                0 => 0.0,
                1 => xs[0],
                n => tree_sum(&xs[..n / 2]) + tree_sum(&xs[n / 2..]),
            }
        }
        let sizes: Vec<f64> = pattern.points().iter().map(|p| p.size).collect();
        let reference = tree_sum(&sizes);
        assert!((path.total() - reference).abs() <= 1e-12 * reference);
    }

    #[test]
    fn tiny_jumps_after_a_huge_one_stay_visible() {
        let p = build_path(&pattern_of(&[(0.1, 5e12), (0.2, 7e-6), (0.3, 7e-6)]));
        assert_eq!(p.prefix()[1], 5e12);
        assert!(p.is_strictly_increasing());
        assert_eq!(p.first_reaching(5e12), 0);
        assert_eq!(p.cmp_prefix(2, 5e12), Ordering::Greater);
        // the residual records the two small jumps
        assert!((p.residual()[2] - 1.4e-5).abs() < 1e-12);
    }

    #[test]
    fn laplace_examples() {
        let idx = StabilityIndex::constant(0.5, 1.0).unwrap();
        assert_eq!(laplace_transform(&idx, 0.0, 0.7).unwrap(), 1.0);
        let v = laplace_transform(&idx, 1.0, 1.0).unwrap();
        assert!((v - (-PI.sqrt()).exp()).abs() < 1e-14);
        assert!((v - 0.169_916).abs() < 1e-6);
        assert!(laplace_transform(&idx, -1.0, 1.0).is_err());
    }

    #[test]
    fn constant_beta_closed_form() {
        for beta in [0.2, 0.5, 0.8] {
            let idx = StabilityIndex::constant(beta, 3.0).unwrap();
            for (theta, t) in [(0.5, 0.5), (2.0, 1.0), (5.0, 3.0)] {
                let want = (-gamma_fn(1.0 - beta).unwrap() * t * f64::powf(theta, beta)).exp();
                let got = laplace_transform(&idx, theta, t).unwrap();
                assert!((got - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn affine_quadrature_agrees_with_piecewise_constant_limit() {
        // integrating the same exponent by a fine midpoint rule
        let idx = StabilityIndex::affine(0.4, 0.2, 1.0).unwrap();
        let (theta, t) = (2.0, 1.0);
        let n = 200_000;
        let h = t / n as f64;
        let midpoint: f64 = (0..n)
            .map(|i| {
                let b = 0.4 + 0.2 * (i as f64 + 0.5) * h;
                gamma_fn(1.0 - b).unwrap() * f64::powf(theta, b) * h
            })
            .sum();
        let got = laplace_exponent(&idx, theta, t).unwrap();
        assert!((got - midpoint).abs() < 1e-9);
    }

    #[test]
    fn threshold_paths_are_strictly_increasing() {
        let idx = StabilityIndex::affine(0.4, 0.2, 1.0).unwrap();
        let mut s = RngStream::split(4, 0);
        for _ in 0..100 {
            let path = build_path(&sample_threshold(&mut s, 1.0, 1e-3, &idx).unwrap());
            assert!(path.is_strictly_increasing());
        }
    }
}
