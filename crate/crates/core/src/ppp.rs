//! Truncated samples of the Poisson point process with intensity
//! `ν(dt, dx) = β(t) x^{-β(t)-1} dt dx`.
//!
//! Two independent constructions are provided:
//!
//! * [`sample_stationary`] maps a unit-rate process on `[0,T] × (0,M]`
//!   through `(t, u) ↦ (t, u^{-1/β(t)})`, which keeps exactly the jumps
//!   `x ≥ M^{-1/β(t)}`.
//! * [`sample_threshold`] samples the jumps `x ≥ ε` directly: times by
//!   rejection from the density `∝ ε^{-β(t)}`, sizes from the conditional
//!   Pareto tail `(x/ε)^{-β(t)}`.
//!
//! Both drop the infinitely many small jumps; [`small_jump_mass`] gives the
//! expected total size of what was dropped.

use crate::error::{Error, Result};
use crate::numeric::{bisect, integrate, QUAD_TOLERANCE};
use crate::rng::RngStream;
use crate::stability::StabilityIndex;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Truncation {
    /// Keep the images of unit-rate points with `u ≤ m`.
    Stationary { m: f64 },
    /// Keep jumps of size at least `eps`.
    Threshold { eps: f64 },
}

impl Truncation {
    /// Smallest retained jump size at a time with index value `beta`.
    pub fn cutoff(&self, beta: f64) -> f64 {
        match *self {
            Truncation::Stationary { m } => m.powf(-1.0 / beta),
            Truncation::Threshold { eps } => eps,
        }
    }

    pub fn parameter(&self) -> f64 {
        match *self {
            Truncation::Stationary { m } => m,
            Truncation::Threshold { eps } => eps,
        }
    }

    pub fn mode_name(&self) -> &'static str {
        match self {
            Truncation::Stationary { .. } => "stationary",
            Truncation::Threshold { .. } => "threshold",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TruncationMode {
    Stationary,
    Threshold,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpPoint {
    pub time: f64,
    pub size: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointPattern {
    points: Vec<JumpPoint>,
    horizon: f64,
    truncation: Truncation,
}

impl PointPattern {
    /// Wraps explicit points. Times must lie in `[0, horizon]` and sizes be
    /// positive.
    pub fn from_points(points: Vec<JumpPoint>, horizon: f64, truncation: Truncation) -> Result<Self> {
        if points
            .iter()
            .any(|p| !(0.0..=horizon).contains(&p.time) || !(p.size > 0.0) || !p.size.is_finite())
        {
            return Err(Error::Parameter(
                "points need times in [0, horizon] and finite positive sizes".into(),
            ));
        }
        Ok(Self {
            points,
            horizon,
            truncation,
        })
    }

    pub fn points(&self) -> &[JumpPoint] {
        &self.points
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn truncation(&self) -> Truncation {
        self.truncation
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Number of points in `(a, b] × [c, d)`.
    pub fn count_in(&self, a: f64, b: f64, c: f64, d: f64) -> usize {
        self.points
            .iter()
            .filter(|p| p.time > a && p.time <= b && p.size >= c && p.size < d)
            .count()
    }

    /// Checks the type invariants: times in `[0,T]`, sizes positive and
    /// above the truncation cutoff.
    pub fn check_invariants(&self, idx: &StabilityIndex) -> bool {
        self.points.iter().all(|p| {
            (0.0..=self.horizon).contains(&p.time)
                && p.size > 0.0
                && p.size >= self.truncation.cutoff(idx.value(p.time))
        })
    }
}

fn check_horizon(horizon: f64, idx: &StabilityIndex) -> Result<()> {
    if !horizon.is_finite() || horizon < 0.0 {
        return Err(Error::Parameter(format!(
            "sampling horizon must be finite and non-negative, got {horizon}"
        )));
    }
    if horizon > idx.horizon() {
        return Err(Error::Parameter(format!(
            "sampling horizon {horizon} exceeds the stability index horizon {}",
            idx.horizon()
        )));
    }
    Ok(())
}

/// Sampler built on the stationary (Lebesgue-intensity) representation.
pub fn sample_stationary(
    stream: &mut RngStream,
    horizon: f64,
    m: f64,
    idx: &StabilityIndex,
) -> Result<PointPattern> {
    check_horizon(horizon, idx)?;
    if !m.is_finite() || m <= 0.0 {
        return Err(Error::Parameter(format!(
            "stationary truncation level must be finite and positive, got {m}"
        )));
    }
    let count = stream.poisson(horizon * m);
    let mut points = Vec::with_capacity(count as usize);
    for _ in 0..count {
        let time = horizon * stream.uniform();
        let u = m * stream.uniform();
        let size = u.powf(-1.0 / idx.value(time));
        points.push(JumpPoint { time, size });
    }
    Ok(PointPattern {
        points,
        horizon,
        truncation: Truncation::Stationary { m },
    })
}

/// Sampler for the jumps of size at least `eps`.
pub fn sample_threshold(
    stream: &mut RngStream,
    horizon: f64,
    eps: f64,
    idx: &StabilityIndex,
) -> Result<PointPattern> {
    check_horizon(horizon, idx)?;
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Parameter(format!(
            "threshold must lie in (0, 1), got {eps}"
        )));
    }
    let total = threshold_intensity(idx, horizon, eps)?;
    let count = stream.poisson(total);
    let beta_sup = idx.beta_sup();
    let mut points = Vec::with_capacity(count as usize);
    for _ in 0..count {
        // rejection against the constant envelope eps^{-β*}
        let (time, beta) = loop {
            let t = horizon * stream.uniform();
            let beta = idx.value(t);
            if stream.uniform() <= eps.powf(beta_sup - beta) {
                break (t, beta);
            }
        };
        let size = eps * stream.uniform().powf(-1.0 / beta);
        points.push(JumpPoint { time, size });
    }
    Ok(PointPattern {
        points,
        horizon,
        truncation: Truncation::Threshold { eps },
    })
}

/// Dispatches on the truncation mode.
pub fn sample(
    stream: &mut RngStream,
    horizon: f64,
    truncation: Truncation,
    idx: &StabilityIndex,
) -> Result<PointPattern> {
    match truncation {
        Truncation::Stationary { m } => sample_stationary(stream, horizon, m, idx),
        Truncation::Threshold { eps } => sample_threshold(stream, horizon, eps, idx),
    }
}

/// Expected number of jumps of size `≥ eps` on `[0, T]`: `∫₀ᵀ ε^{-β(s)} ds`.
pub fn threshold_intensity(idx: &StabilityIndex, horizon: f64, eps: f64) -> Result<f64> {
    check_horizon(horizon, idx)?;
    if idx.is_constant() {
        return Ok(horizon * eps.powf(-idx.beta_sup()));
    }
    Ok(integrate(
        |s| eps.powf(-idx.value(s)),
        0.0,
        horizon,
        QUAD_TOLERANCE,
    ))
}

/// Expected total size of the jumps excluded by `truncation` on `[0, T]`.
pub fn small_jump_mass(idx: &StabilityIndex, horizon: f64, truncation: Truncation) -> Result<f64> {
    check_horizon(horizon, idx)?;
    let integrand = |s: f64| {
        let b = idx.value(s);
        let scale = b / (1.0 - b);
        match truncation {
            Truncation::Threshold { eps } => scale * eps.powf(1.0 - b),
            Truncation::Stationary { m } => scale * m.powf(1.0 - 1.0 / b),
        }
    };
    if idx.is_constant() {
        return Ok(horizon * integrand(0.0));
    }
    Ok(integrate(integrand, 0.0, horizon, QUAD_TOLERANCE))
}

/// The loosest truncation of the given mode whose excluded mass on
/// `[0, T]` is at most `budget`.
pub fn truncation_for_mass(
    idx: &StabilityIndex,
    horizon: f64,
    budget: f64,
    mode: TruncationMode,
) -> Result<Truncation> {
    if !(budget > 0.0) {
        return Err(Error::Parameter(format!(
            "excluded-mass budget must be positive, got {budget}"
        )));
    }
    check_horizon(horizon, idx)?;
    if horizon == 0.0 {
        return Ok(match mode {
            TruncationMode::Stationary => Truncation::Stationary { m: 1.0 },
            TruncationMode::Threshold => Truncation::Threshold { eps: 0.5 },
        });
    }
    match mode {
        TruncationMode::Stationary => {
            let excess = |log_m: f64| {
                small_jump_mass(idx, horizon, Truncation::Stationary { m: log_m.exp() })
                    .map(|v| v - budget)
                    .unwrap_or(f64::NAN)
            };
            let mut hi = 0.0;
            while excess(hi) > 0.0 {
                hi += 2.0;
                if hi > 700.0 {
                    return Err(Error::Numeric("no stationary level reaches the budget".into()));
                }
            }
            if hi == 0.0 {
                return Ok(Truncation::Stationary { m: 1.0 });
            }
            let root = bisect(excess, hi - 2.0, hi, 1e-13)?;
            // step to the feasible side of the root
            let mut m = root.exp();
            while small_jump_mass(idx, horizon, Truncation::Stationary { m })? > budget {
                m *= 1.0 + 1e-9;
            }
            Ok(Truncation::Stationary { m })
        }
        TruncationMode::Threshold => {
            let excess = |log_eps: f64| {
                small_jump_mass(idx, horizon, Truncation::Threshold { eps: log_eps.exp() })
                    .map(|v| v - budget)
                    .unwrap_or(f64::NAN)
            };
            let start = 0.5f64.ln();
            if excess(start) <= 0.0 {
                return Ok(Truncation::Threshold { eps: 0.5 });
            }
            let (mut lo, mut hi) = (start, start);
            while excess(lo) > 0.0 {
                hi = lo;
                lo -= 2.0;
                if lo < -700.0 {
                    return Err(Error::Numeric("no threshold reaches the budget".into()));
                }
            }
            let root = bisect(excess, lo, hi, 1e-13)?;
            let mut eps = root.exp();
            while small_jump_mass(idx, horizon, Truncation::Threshold { eps })? > budget {
                eps *= 1.0 - 1e-9;
            }
            Ok(Truncation::Threshold { eps })
        }
    }
}

/// Mean number of points of the untruncated process in
/// `(a, b] × [c, d)`: `∫ₐᵇ (c^{-β(s)} - d^{-β(s)}) ds`.
pub fn window_mean(idx: &StabilityIndex, a: f64, b: f64, c: f64, d: f64) -> f64 {
    integrate(
        |s| {
            let beta = idx.value(s);
            c.powf(-beta) - d.powf(-beta)
        },
        a,
        b,
        QUAD_TOLERANCE,
    )
}
