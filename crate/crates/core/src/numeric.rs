//! Shared numerical routines: adaptive Simpson quadrature, the gamma
//! function and compensated summation.

use crate::error::{Error, Result};

/// Absolute tolerance used by every integral in the crate.
pub const QUAD_TOLERANCE: f64 = 1e-10;

const MAX_DEPTH: u32 = 48;
const INITIAL_PANELS: usize = 16;

/// Adaptive composite Simpson rule on `[a, b]` with absolute tolerance `tol`.
///
/// The interval is first cut into a few panels so that a single unlucky
/// Simpson estimate cannot end the recursion early.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    if a > b {
        return -integrate(f, b, a, tol);
    }
    let width = (b - a) / INITIAL_PANELS as f64;
    let panel_tol = tol / INITIAL_PANELS as f64;
    let mut total = NeumaierSum::default();
    for i in 0..INITIAL_PANELS {
        let lo = a + width * i as f64;
        let hi = if i + 1 == INITIAL_PANELS {
            b
        } else {
            a + width * (i + 1) as f64
        };
        let (flo, fhi) = (f(lo), f(hi));
        let mid = 0.5 * (lo + hi);
        let fmid = f(mid);
        let whole = simpson(lo, hi, flo, fmid, fhi);
        total.add(refine(&f, lo, hi, flo, fmid, fhi, whole, panel_tol, MAX_DEPTH));
    }
    total.value()
}

#[inline]
fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn refine<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol || m <= a || m >= b {
        return left + right + delta / 15.0;
    }
    refine(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + refine(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Γ(z) for z > 0.
pub fn gamma_fn(z: f64) -> Result<f64> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::Domain {
            what: "z",
            value: z,
            domain: "(0, inf)",
        });
    }
    Ok(gamma(z))
}

pub(crate) use statrs::function::gamma::{gamma, ln_gamma};

/// Neumaier compensated summation.
#[derive(Debug, Default, Clone, Copy)]
pub struct NeumaierSum {
    sum: f64,
    compensation: f64,
}

impl NeumaierSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// Bisection for a root of `f` on `[lo, hi]` where `f(lo)` and `f(hi)` have
/// opposite signs. Stops once the bracket is narrower than
/// `tol * max(1, |x|)` or cannot be split further.
pub(crate) fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
    let (flo, fhi) = (f(lo), f(hi));
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() || flo.is_nan() || fhi.is_nan() {
        return Err(Error::Numeric(format!(
            "no sign change on [{lo}, {hi}]"
        )));
    }
    let lo_negative = flo < 0.0;
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= tol * mid.abs().max(1.0) {
            return Ok(mid);
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm < 0.0) == lo_negative {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn simpson_polynomials_and_transcendentals() {
        assert!((integrate(|x| x * x, 0.0, 3.0, 1e-12) - 9.0).abs() < 1e-12);
        assert!((integrate(f64::sin, 0.0, PI, 1e-12) - 2.0).abs() < 1e-11);
        assert!((integrate(f64::exp, 0.0, 1.0, 1e-12) - (1f64.exp() - 1.0)).abs() < 1e-11);
        // reversed bounds
        assert!((integrate(|x| x, 1.0, 0.0, 1e-12) + 0.5).abs() < 1e-12);
        assert_eq!(integrate(|x| x, 2.0, 2.0, 1e-12), 0.0);
    }

    #[test]
    fn simpson_handles_sharp_peak() {
        // Lorentzian of width 1e-3; exact value via arctan
        let w: f64 = 1e-3;
        let exact = 2.0 * (1.0 / w).atan() / w;
        let got = integrate(|x| 1.0 / (x * x + w * w), -1.0, 1.0, 1e-8);
        assert!((got - exact).abs() / exact < 1e-9);
    }

    #[test]
    fn gamma_reference_values() {
        assert!((gamma_fn(1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((gamma_fn(2.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((gamma_fn(0.5).unwrap() - PI.sqrt()).abs() < 1e-14);
        assert!((gamma_fn(0.5).unwrap() - 1.772_453_850_9).abs() < 1e-10);
        assert!(gamma_fn(0.0).is_err());
        assert!(gamma_fn(-1.0).is_err());
    }

    #[test]
    fn gamma_satisfies_recurrence_on_unit_interval() {
        // Γ(z+1) = zΓ(z) relates the reflection branch to the Lanczos branch
        for i in 1..200 {
            let z = 0.01 * i as f64;
            let lhs = gamma(z + 1.0);
            let rhs = z * gamma(z);
            assert!((lhs - rhs).abs() / lhs < 1e-13, "z = {z}");
        }
    }

    #[test]
    fn gamma_matches_independent_values() {
        // Γ(1/3), Γ(1/4), Γ(0.01), Γ(1.5) to 15+ digits
        let cases = [
            (1.0 / 3.0, 2.678_938_534_707_747_6),
            (0.25, 3.625_609_908_221_908_3),
            (0.01, 99.432_585_119_150_6),
            (1.5, 0.886_226_925_452_758),
        ];
        for (z, want) in cases {
            let got = gamma_fn(z).unwrap();
            assert!((got - want).abs() / want < 1e-10, "Γ({z}) = {got}");
            assert!((ln_gamma(z) - want.ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn neumaier_recovers_cancelled_terms() {
        let mut s = NeumaierSum::default();
        for x in [1.0, 1e100, 1.0, -1e100] {
            s.add(x);
        }
        assert_eq!(s.value(), 2.0);
    }

    #[test]
    fn bisection_finds_root() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-15).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-14);
        assert!(bisect(|x| x * x + 1.0, 0.0, 2.0, 1e-12).is_err());
    }
}
