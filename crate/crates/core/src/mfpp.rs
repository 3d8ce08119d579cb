//! Right-continuous inverse `E(r) = inf{t : D(t) ≥ r}`, the rate-λ Poisson
//! clock N, and the multifractional Poisson process `X(t) = N(E(t))`.

use crate::error::{Error, Result};
use crate::ppp::{self, Truncation};
use crate::rng::RngStream;
use crate::stability::StabilityIndex;
use crate::subordinator::{build_path, JumpPath};

/// E(r) on a step path: the first jump time whose prefix sum reaches `r`.
pub fn inverse(path: &JumpPath, r: f64) -> Result<f64> {
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::Domain {
            what: "r",
            value: r,
            domain: "[0, inf)",
        });
    }
    if r == 0.0 {
        return Ok(0.0);
    }
    let i = path.first_reaching(r);
    if i == path.len() {
        return Err(Error::HorizonExceeded {
            level: r,
            reachable: path.total(),
        });
    }
    Ok(path.times()[i])
}

/// Checks the Galois-pair relations on a step path: every level in a jump
/// window `(D(τ-), D(τ)]` inverts to `τ`, and `E(D(t)) ≤ t` at each probe
/// time in `probes`. Windows are taken on the exact prefix sums, and the
/// levels tried are the representable values at both ends and the middle.
pub fn galois_pair_holds(path: &JumpPath, probes: &[f64]) -> bool {
    use std::cmp::Ordering;
    for (i, &tau) in path.times().iter().enumerate() {
        let top = path.prefix_floor(i);
        let bottom = if i == 0 {
            f64::MIN_POSITIVE
        } else {
            let (h, l) = (path.prefix()[i - 1], path.residual()[i - 1]);
            if l < 0.0 { h } else { h.next_up() }
        };
        for level in [bottom, 0.5 * (bottom + top), top] {
            let inside = (i == 0 || path.cmp_prefix(i - 1, level) == Ordering::Less)
                && path.cmp_prefix(i, level) != Ordering::Less
                && level > 0.0;
            if !inside {
                continue;
            }
            match inverse(path, level) {
                Ok(e) if e == tau => {}
                _ => return false,
            }
        }
    }
    probes.iter().all(|&t| match path.eval(t) {
        Ok(d) => matches!(inverse(path, d), Ok(e) if e <= t),
        Err(_) => false,
    })
}

/// Arrival times of a homogeneous Poisson process on `(0, horizon]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PoissonPath {
    arrivals: Vec<f64>,
    rate: f64,
    horizon: f64,
}

impl PoissonPath {
    pub fn arrivals(&self) -> &[f64] {
        &self.arrivals
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// N(s): arrivals at or before `s`.
    pub fn count_up_to(&self, s: f64) -> Result<u64> {
        if !(0.0..=self.horizon).contains(&s) {
            return Err(Error::OperationalHorizon {
                time: s,
                horizon: self.horizon,
            });
        }
        Ok(self.arrivals.partition_point(|&a| a <= s) as u64)
    }
}

/// Cumulative Exp(λ) gaps, truncated at `horizon`.
pub fn sample_poisson_path(stream: &mut RngStream, rate: f64, horizon: f64) -> Result<PoissonPath> {
    if !(rate > 0.0) || !rate.is_finite() {
        return Err(Error::Parameter(format!("Poisson rate must be positive, got {rate}")));
    }
    if !(horizon >= 0.0) || !horizon.is_finite() {
        return Err(Error::Parameter(format!(
            "Poisson horizon must be finite and non-negative, got {horizon}"
        )));
    }
    let mut arrivals = Vec::new();
    let mut t = 0.0;
    if horizon > 0.0 {
        loop {
            t += stream.exponential() / rate;
            if t > horizon {
                break;
            }
            arrivals.push(t);
        }
    }
    Ok(PoissonPath {
        arrivals,
        rate,
        horizon,
    })
}

/// One realization of `(D, N)` with independent randomness for each.
#[derive(Debug, Clone)]
pub struct MfppSample {
    d_path: JumpPath,
    n_path: PoissonPath,
}

impl MfppSample {
    pub fn new(d_path: JumpPath, n_path: PoissonPath) -> Self {
        Self { d_path, n_path }
    }

    /// Simulates D on `[0, horizon]` from `jumps` and N on the same
    /// horizon from `clock`. The two streams must differ.
    pub fn simulate(
        jumps: &mut RngStream,
        clock: &mut RngStream,
        idx: &StabilityIndex,
        horizon: f64,
        truncation: Truncation,
        rate: f64,
    ) -> Result<Self> {
        if jumps.lane_id() == clock.lane_id() && jumps.stream_id() == clock.stream_id()
            && jumps.master_seed() == clock.master_seed()
        {
            return Err(Error::Parameter(
                "D and N must be driven by distinct streams".into(),
            ));
        }
        let pattern = ppp::sample(jumps, horizon, truncation, idx)?;
        Ok(Self {
            d_path: build_path(&pattern),
            n_path: sample_poisson_path(clock, rate, horizon)?,
        })
    }

    pub fn d_path(&self) -> &JumpPath {
        &self.d_path
    }

    pub fn n_path(&self) -> &PoissonPath {
        &self.n_path
    }

    /// E(t).
    pub fn operational_time(&self, t: f64) -> Result<f64> {
        inverse(&self.d_path, t)
    }

    /// X(t) = N(E(t)).
    pub fn value(&self, t: f64) -> Result<u64> {
        let e = self.operational_time(t)?;
        self.n_path.count_up_to(e)
    }
}

pub fn mfpp_value(sample: &MfppSample, t: f64) -> Result<u64> {
    sample.value(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ppp::{JumpPoint, PointPattern};

    fn path(points: &[(f64, f64)]) -> JumpPath {
        let pts = points
            .iter()
            .map(|&(time, size)| JumpPoint { time, size })
            .collect();
        build_path(&PointPattern::from_points(pts, 1.0, Truncation::Threshold { eps: 0.1 }).unwrap())
    }

    fn example() -> JumpPath {
        path(&[(0.2, 1.0), (0.5, 2.0), (0.9, 0.5)])
    }

    fn poisson(arrivals: &[f64], horizon: f64) -> PoissonPath {
        PoissonPath {
            arrivals: arrivals.to_vec(),
            rate: 1.0,
            horizon,
        }
    }

    #[test]
    fn inverse_examples() {
        let p = example();
        assert_eq!(inverse(&p, 0.5).unwrap(), 0.2);
        assert_eq!(inverse(&p, 3.0).unwrap(), 0.5);
        assert_eq!(inverse(&p, 3.4).unwrap(), 0.9);
        assert!(matches!(inverse(&p, 4.0), Err(Error::HorizonExceeded { .. })));
        assert_eq!(inverse(&p, 0.0).unwrap(), 0.0);
        assert_eq!(inverse(&path(&[]), 0.0).unwrap(), 0.0);
        assert!(inverse(&p, -1.0).is_err());
    }

    #[test]
    fn galois_pair_on_example() {
        let probes: Vec<f64> = (0..=100).map(|i| i as f64 / 100.0).collect();
        assert!(galois_pair_holds(&example(), &probes));
    }

    #[test]
    fn mfpp_value_examples() {
        // D jumps to 0.5 at time 0.5, so E(t) = 0.5 for levels in (0, 0.5]
        let s = MfppSample::new(path(&[(0.5, 0.5), (0.8, 2.0)]), poisson(&[0.3, 0.8], 1.0));
        assert_eq!(s.value(0.4).unwrap(), 1);
        assert_eq!(s.value(0.0).unwrap(), 0);
        // level in (0.5, 2.5] reaches at time 0.8: arrival at 0.8 counts
        assert_eq!(s.value(1.0).unwrap(), 2);
        assert!(matches!(s.value(3.0), Err(Error::HorizonExceeded { .. })));
        let short = MfppSample::new(path(&[(0.9, 1.0)]), poisson(&[0.3], 0.5));
        assert!(matches!(short.value(0.5), Err(Error::OperationalHorizon { .. })));
    }

    #[test]
    fn poisson_path_basics() {
        let mut s = RngStream::split(1, 0);
        assert!(sample_poisson_path(&mut s, 3.0, 0.0).unwrap().arrivals().is_empty());
        assert!(sample_poisson_path(&mut s, 0.0, 1.0).is_err());
        let a = sample_poisson_path(&mut RngStream::split(5, 5), 3.0, 10.0).unwrap();
        let b = sample_poisson_path(&mut RngStream::split(5, 5), 3.0, 10.0).unwrap();
        assert_eq!(a, b);
        assert!(a.arrivals().windows(2).all(|w| w[0] < w[1]));
        assert!(a.arrivals().iter().all(|&x| x > 0.0 && x <= 10.0));
    }

    #[test]
    fn poisson_mean_count() {
        let reps = 10_000;
        let total: usize = (0..reps)
            .map(|r| {
                sample_poisson_path(&mut RngStream::split(8, r), 3.0, 1.0)
                    .unwrap()
                    .arrivals()
                    .len()
            })
            .sum();
        let mean = total as f64 / reps as f64;
        assert!((mean - 3.0).abs() < 3.0 * (3.0f64 / 1e4).sqrt(), "{mean}");
    }

    #[test]
    fn simulated_paths_are_monotone_and_inverse_consistent() {
        let idx = StabilityIndex::affine(0.4, 0.2, 2.0).unwrap();
        for r in 0..200 {
            let mut jumps = RngStream::with_lane(3, r, 0);
            let mut clock = RngStream::with_lane(3, r, 1);
            let s = MfppSample::simulate(
                &mut jumps,
                &mut clock,
                &idx,
                2.0,
                Truncation::Stationary { m: 200.0 },
                1.0,
            )
            .unwrap();
            let probes: Vec<f64> = (0..=50).map(|i| i as f64 * 0.04).collect();
            assert!(galois_pair_holds(s.d_path(), &probes));
            let mut last_e = 0.0;
            let mut last_x = 0;
            for i in 0..=40 {
                let level = i as f64 * 0.05;
                if let (Ok(e), Ok(x)) = (s.operational_time(level), s.value(level)) {
                    assert!(e >= last_e);
                    assert!(x >= last_x);
                    last_e = e;
                    last_x = x;
                }
            }
        }
    }

    #[test]
    fn same_stream_twice_is_rejected() {
        let idx = StabilityIndex::constant(0.5, 1.0).unwrap();
        let mut a = RngStream::split(1, 0);
        let mut b = RngStream::split(1, 0);
        assert!(MfppSample::simulate(&mut a, &mut b, &idx, 1.0, Truncation::Stationary { m: 10.0 }, 1.0).is_err());
    }
}
