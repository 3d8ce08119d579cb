//! Time-varying stability index β(t).
//!
//! Every other module reads β through [`StabilityIndex`]. The index is
//! validated once at construction: its infimum and supremum over
//! `[0, horizon]` are computed exactly and must lie strictly inside `(0, 1)`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    Constant { value: f64 },
    /// `c0 + c1 * t`
    Affine { c0: f64, c1: f64 },
    /// `c0 + c1 * sin(2π c2 t)`
    Sinusoid { c0: f64, c1: f64, c2: f64 },
    /// Linear interpolation between `(t, β)` knots, flat beyond the first and last knot.
    Table { knots: Vec<(f64, f64)> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityIndex {
    family: Family,
    beta_inf: f64,
    beta_sup: f64,
    horizon: f64,
}

impl StabilityIndex {
    pub fn new(family: Family, horizon: f64) -> Result<Self> {
        if !horizon.is_finite() || horizon <= 0.0 {
            return Err(Error::Parameter(format!(
                "horizon must be finite and positive, got {horizon}"
            )));
        }
        check_family(&family)?;
        let (beta_inf, beta_sup) = family_bounds(&family, horizon);
        if !(beta_inf > 0.0 && beta_sup < 1.0) {
            return Err(Error::Parameter(format!(
                "stability index ranges over [{beta_inf}, {beta_sup}] on [0, {horizon}], must stay inside (0, 1)"
            )));
        }
        Ok(Self {
            family,
            beta_inf,
            beta_sup,
            horizon,
        })
    }

    pub fn constant(value: f64, horizon: f64) -> Result<Self> {
        Self::new(Family::Constant { value }, horizon)
    }

    pub fn affine(c0: f64, c1: f64, horizon: f64) -> Result<Self> {
        Self::new(Family::Affine { c0, c1 }, horizon)
    }

    pub fn sinusoid(c0: f64, c1: f64, c2: f64, horizon: f64) -> Result<Self> {
        Self::new(Family::Sinusoid { c0, c1, c2 }, horizon)
    }

    pub fn table(knots: Vec<(f64, f64)>, horizon: f64) -> Result<Self> {
        Self::new(Family::Table { knots }, horizon)
    }

    /// Parses `constant:0.5`, `affine:0.4,0.2`, `sin:0.5,0.3,1.0` or
    /// `table:t0,b0;t1,b1;...`.
    pub fn parse(spec: &str, horizon: f64) -> Result<Self> {
        Self::new(spec.parse()?, horizon)
    }

    /// β(t) for `t` in `[0, horizon]`.
    pub fn evaluate(&self, t: f64) -> Result<f64> {
        if !(0.0..=self.horizon).contains(&t) {
            return Err(Error::Domain {
                what: "t",
                value: t,
                domain: "[0, horizon]",
            });
        }
        Ok(self.value(t))
    }

    /// Unchecked evaluation for hot loops whose callers already validated
    /// the time range against the horizon.
    #[inline]
    pub(crate) fn value(&self, t: f64) -> f64 {
        family_value(&self.family, t)
    }

    /// `(β_*, β^*)` over `[0, horizon]`.
    pub fn bounds(&self) -> (f64, f64) {
        (self.beta_inf, self.beta_sup)
    }

    pub fn beta_inf(&self) -> f64 {
        self.beta_inf
    }

    pub fn beta_sup(&self) -> f64 {
        self.beta_sup
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn is_constant(&self) -> bool {
        self.beta_inf == self.beta_sup
    }

    /// Lipschitz constant of β on `[0, horizon]`.
    pub fn lipschitz(&self) -> f64 {
        match &self.family {
            Family::Constant { .. } => 0.0,
            Family::Affine { c1, .. } => c1.abs(),
            Family::Sinusoid { c1, c2, .. } => 2.0 * PI * (c1 * c2).abs(),
            Family::Table { knots } => knots
                .windows(2)
                .map(|w| ((w[1].1 - w[0].1) / (w[1].0 - w[0].0)).abs())
                .fold(0.0, f64::max),
        }
    }

    /// Same family and parameters on a different horizon.
    pub fn with_horizon(&self, horizon: f64) -> Result<Self> {
        Self::new(self.family.clone(), horizon)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Constant { value } => write!(f, "constant:{value}"),
            Family::Affine { c0, c1 } => write!(f, "affine:{c0},{c1}"),
            Family::Sinusoid { c0, c1, c2 } => write!(f, "sin:{c0},{c1},{c2}"),
            Family::Table { knots } => {
                write!(f, "table:")?;
                for (i, (t, b)) in knots.iter().enumerate() {
                    if i > 0 {
                        write!(f, ";")?;
                    }
                    write!(f, "{t},{b}")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for StabilityIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.family.fmt(f)
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(spec: &str) -> Result<Self> {
        let bad = |msg: &str| Error::Parameter(format!("beta spec `{spec}`: {msg}"));
        let (kind, args) = spec
            .trim()
            .split_once(':')
            .ok_or_else(|| bad("expected `<family>:<params>`"))?;
        let numbers = |s: &str| -> Result<Vec<f64>> {
            s.split(',')
                .map(|v| {
                    v.trim()
                        .parse::<f64>()
                        .map_err(|_| bad(&format!("`{v}` is not a number")))
                })
                .collect()
        };
        match kind.trim() {
            "constant" | "const" => match numbers(args)?.as_slice() {
                [value] => Ok(Family::Constant { value: *value }),
                _ => Err(bad("constant takes one parameter")),
            },
            "affine" => match numbers(args)?.as_slice() {
                [c0, c1] => Ok(Family::Affine { c0: *c0, c1: *c1 }),
                _ => Err(bad("affine takes two parameters")),
            },
            "sin" | "sinusoid" => match numbers(args)?.as_slice() {
                [c0, c1, c2] => Ok(Family::Sinusoid {
                    c0: *c0,
                    c1: *c1,
                    c2: *c2,
                }),
                _ => Err(bad("sin takes three parameters")),
            },
            "table" => {
                let knots = args
                    .split(';')
                    .filter(|k| !k.trim().is_empty())
                    .map(|k| match numbers(k)?.as_slice() {
                        [t, b] => Ok((*t, *b)),
                        _ => Err(bad("table knots are `t,b` pairs")),
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(Family::Table { knots })
            }
            other => Err(bad(&format!("unknown family `{other}`"))),
        }
    }
}

fn check_family(family: &Family) -> Result<()> {
    let finite = |xs: &[f64]| xs.iter().all(|x| x.is_finite());
    let ok = match family {
        Family::Constant { value } => finite(&[*value]),
        Family::Affine { c0, c1 } => finite(&[*c0, *c1]),
        Family::Sinusoid { c0, c1, c2 } => finite(&[*c0, *c1, *c2]),
        Family::Table { knots } => {
            if knots.is_empty() {
                return Err(Error::Parameter("table needs at least one knot".into()));
            }
            if knots.windows(2).any(|w| w[1].0 <= w[0].0) {
                return Err(Error::Parameter(
                    "table knot times must be strictly increasing".into(),
                ));
            }
            knots.iter().all(|(t, b)| t.is_finite() && b.is_finite())
        }
    };
    if ok {
        Ok(())
    } else {
        Err(Error::Parameter("stability index parameters must be finite".into()))
    }
}

fn family_value(family: &Family, t: f64) -> f64 {
    match family {
        Family::Constant { value } => *value,
        Family::Affine { c0, c1 } => c0 + c1 * t,
        Family::Sinusoid { c0, c1, c2 } => c0 + c1 * (2.0 * PI * c2 * t).sin(),
        Family::Table { knots } => interpolate(knots, t),
    }
}

fn interpolate(knots: &[(f64, f64)], t: f64) -> f64 {
    let first = knots[0];
    let last = knots[knots.len() - 1];
    if t <= first.0 {
        return first.1;
    }
    if t >= last.0 {
        return last.1;
    }
    // first knot with time > t; exists and is >= 1 by the checks above
    let j = knots.partition_point(|&(tk, _)| tk <= t);
    let (t0, b0) = knots[j - 1];
    let (t1, b1) = knots[j];
    b0 + (b1 - b0) * (t - t0) / (t1 - t0)
}

fn family_bounds(family: &Family, horizon: f64) -> (f64, f64) {
    match family {
        Family::Constant { value } => (*value, *value),
        Family::Affine { c0, c1 } => {
            let end = c0 + c1 * horizon;
            (c0.min(end), c0.max(end))
        }
        Family::Sinusoid { c0, c1, c2 } => {
            let phase_end = 2.0 * PI * c2 * horizon;
            let (lo, hi) = sin_range(phase_end.min(0.0), phase_end.max(0.0));
            let (a, b) = (c0 + c1 * lo, c0 + c1 * hi);
            (a.min(b), a.max(b))
        }
        Family::Table { knots } => {
            let mut lo = interpolate(knots, 0.0).min(interpolate(knots, horizon));
            let mut hi = interpolate(knots, 0.0).max(interpolate(knots, horizon));
            for &(t, b) in knots {
                if t > 0.0 && t < horizon {
                    lo = lo.min(b);
                    hi = hi.max(b);
                }
            }
            (lo, hi)
        }
    }
}

/// Range of `sin` over the phase interval `[a, b]`.
fn sin_range(a: f64, b: f64) -> (f64, f64) {
    let mut lo = a.sin().min(b.sin());
    let mut hi = a.sin().max(b.sin());
    // maxima at π/2 + 2πk, minima at 3π/2 + 2πk
    let contains = |offset: f64| {
        let k = ((a - offset) / (2.0 * PI)).ceil();
        offset + 2.0 * PI * k <= b
    };
    if contains(PI / 2.0) {
        hi = 1.0;
    }
    if contains(1.5 * PI) {
        lo = -1.0;
    }
    (lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn evaluate_examples() {
        let c = StabilityIndex::constant(0.5, 10.0).unwrap();
        assert_eq!(c.evaluate(7.3).unwrap(), 0.5);
        let a = StabilityIndex::affine(0.4, 0.2, 1.0).unwrap();
        assert!((a.evaluate(0.5).unwrap() - 0.5).abs() < 1e-15);
        let s = StabilityIndex::sinusoid(0.5, 0.3, 1.0, 1.0).unwrap();
        assert!((s.evaluate(0.25).unwrap() - 0.8).abs() < 1e-15);
    }

    #[test]
    fn bounds_examples() {
        assert_eq!(
            StabilityIndex::constant(0.5, 1.0).unwrap().bounds(),
            (0.5, 0.5)
        );
        let (lo, hi) = StabilityIndex::affine(0.4, 0.2, 1.0).unwrap().bounds();
        assert!((lo - 0.4).abs() < 1e-15 && (hi - 0.6).abs() < 1e-15);
        let (lo, hi) = StabilityIndex::sinusoid(0.5, 0.3, 1.0, 1.0)
            .unwrap()
            .bounds();
        assert!((lo - 0.2).abs() < 1e-15 && (hi - 0.8).abs() < 1e-15);
    }

    #[test]
    fn sinusoid_partial_period_bounds() {
        // phase covers [0, π/2] only: range [c0, c0 + c1]
        let s = StabilityIndex::sinusoid(0.5, 0.3, 1.0, 0.25).unwrap();
        let (lo, hi) = s.bounds();
        assert!((lo - 0.5).abs() < 1e-15);
        assert!((hi - 0.8).abs() < 1e-15);
        // negative amplitude flips the range
        let s = StabilityIndex::sinusoid(0.5, -0.3, 1.0, 0.25).unwrap();
        let (lo, hi) = s.bounds();
        assert!((lo - 0.2).abs() < 1e-15 && (hi - 0.5).abs() < 1e-15);
    }

    #[test]
    fn table_interpolates_and_bounds_over_knots() {
        let t = StabilityIndex::table(vec![(0.0, 0.3), (0.5, 0.7), (1.0, 0.5)], 1.0).unwrap();
        assert!((t.evaluate(0.25).unwrap() - 0.5).abs() < 1e-15);
        assert!((t.evaluate(0.75).unwrap() - 0.6).abs() < 1e-15);
        assert_eq!(t.bounds(), (0.3, 0.7));
        assert!((t.lipschitz() - 0.8).abs() < 1e-15);
        // knot beyond horizon does not count, the endpoint value does
        let t = StabilityIndex::table(vec![(0.0, 0.3), (2.0, 0.7)], 1.0).unwrap();
        let (lo, hi) = t.bounds();
        assert_eq!(lo, 0.3);
        assert!((hi - 0.5).abs() < 1e-15);
    }

    #[test]
    fn construction_rejects_out_of_range() {
        assert!(StabilityIndex::constant(1.0, 1.0).is_err());
        assert!(StabilityIndex::constant(0.0, 1.0).is_err());
        // affine leaves (0,1) before the horizon
        assert!(StabilityIndex::affine(0.4, 0.2, 3.0).is_err());
        assert!(StabilityIndex::affine(0.4, 0.2, 2.5).is_ok());
        assert!(StabilityIndex::sinusoid(0.5, 0.6, 1.0, 1.0).is_err());
        assert!(StabilityIndex::table(vec![(0.0, 0.5), (0.0, 0.6)], 1.0).is_err());
        assert!(StabilityIndex::constant(0.5, 0.0).is_err());
    }

    #[test]
    fn evaluate_outside_horizon_is_domain_error() {
        let c = StabilityIndex::constant(0.5, 1.0).unwrap();
        assert!(matches!(c.evaluate(1.5), Err(Error::Domain { .. })));
        assert!(matches!(c.evaluate(-0.1), Err(Error::Domain { .. })));
        assert!(c.evaluate(f64::NAN).is_err());
    }

    #[test]
    fn parse_round_trips_through_display() {
        for spec in [
            "constant:0.5",
            "affine:0.4,0.2",
            "sin:0.5,0.3,1",
            "table:0,0.3;0.5,0.7;1,0.5",
        ] {
            let idx = StabilityIndex::parse(spec, 1.0).unwrap();
            assert_eq!(idx.to_string(), spec);
        }
        assert!(StabilityIndex::parse("affine:0.4", 1.0).is_err());
        assert!(StabilityIndex::parse("cubic:1,2", 1.0).is_err());
        assert!(StabilityIndex::parse("constant:x", 1.0).is_err());
    }

    fn any_index() -> impl Strategy<Value = StabilityIndex> {
        prop_oneof![
            (0.05f64..0.95).prop_map(|c| StabilityIndex::constant(c, 2.0).unwrap()),
            (0.45f64..0.55, -0.2f64..0.2)
                .prop_map(|(c0, c1)| StabilityIndex::affine(c0, c1, 2.0).unwrap()),
            (0.4f64..0.6, 0.0f64..0.3, 0.1f64..3.0)
                .prop_map(|(c0, c1, c2)| StabilityIndex::sinusoid(c0, c1, c2, 2.0).unwrap()),
            proptest::collection::vec(0.05f64..0.95, 2..6).prop_map(|bs| {
                let knots = bs
                    .iter()
                    .enumerate()
                    .map(|(i, &b)| (i as f64 * 0.6, b))
                    .collect();
                StabilityIndex::table(knots, 2.0).unwrap()
            }),
        ]
    }

    proptest! {
        #[test]
        fn values_stay_within_bounds(idx in any_index(), u in 0.0f64..=1.0) {
            let t = u * idx.horizon();
            let v = idx.evaluate(t).unwrap();
            prop_assert!(v >= idx.beta_inf() - 1e-12 && v <= idx.beta_sup() + 1e-12);
        }

        #[test]
        fn lipschitz_continuity(idx in any_index(), u in 0.0f64..=1.0) {
            let delta = 1e-6;
            let t = u * (idx.horizon() - delta);
            let d = (idx.evaluate(t + delta).unwrap() - idx.evaluate(t).unwrap()).abs();
            prop_assert!(d <= idx.lipschitz() * delta + 1e-14);
        }
    }
}
