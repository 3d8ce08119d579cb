//! Estimators and analytic oracles: Monte Carlo means, empirical Laplace
//! transforms, two-sample Kolmogorov-Smirnov, the Mittag-Leffler function
//! and chi-square on Poisson counts.

use std::f64::consts::PI;

use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::numeric::{gamma, integrate, ln_gamma, NeumaierSum};
use crate::subordinator::JumpPath;

/// A Monte Carlo mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub se: f64,
    pub n: usize,
}

impl McEstimate {
    /// Sample mean and `sd/√n`, with the unbiased variance.
    pub fn from_samples(xs: &[f64]) -> Result<Self> {
        let n = xs.len();
        if n < 2 {
            return Err(Error::InsufficientSamples { needed: 2, got: n });
        }
        let mut sum = NeumaierSum::default();
        xs.iter().for_each(|&x| sum.add(x));
        let mean = sum.value() / n as f64;
        let mut ss = NeumaierSum::default();
        xs.iter().for_each(|&x| ss.add((x - mean) * (x - mean)));
        let var = ss.value() / (n - 1) as f64;
        Ok(Self {
            mean,
            se: (var / n as f64).sqrt(),
            n,
        })
    }
}

/// Mean and SE of `exp(-θ s)` over the samples.
pub fn empirical_laplace(samples: &[f64], theta: f64) -> Result<McEstimate> {
    if !(theta >= 0.0) {
        return Err(Error::Domain {
            what: "theta",
            value: theta,
            domain: "[0, inf)",
        });
    }
    let values: Vec<f64> = samples.iter().map(|&s| (-theta * s).exp()).collect();
    McEstimate::from_samples(&values)
}

/// Proportion `k/n` with binomial standard error `√(p(1-p)/n)`.
pub fn binomial_proportion(successes: usize, n: usize) -> Result<McEstimate> {
    if n < 2 {
        return Err(Error::InsufficientSamples { needed: 2, got: n });
    }
    let p = successes as f64 / n as f64;
    Ok(McEstimate {
        mean: p,
        se: (p * (1.0 - p) / n as f64).sqrt(),
        n,
    })
}

/// Sup distance between the empirical CDFs of `xs` and `ys`.
///
/// Ties across the samples are handled by stepping both ECDFs past each
/// distinct value before comparing. Infinite values are allowed (they are
/// used for censored observations); NaN is rejected.
pub fn ks_two_sample(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.is_empty() || ys.is_empty() {
        return Err(Error::InsufficientSamples {
            needed: 1,
            got: xs.len().min(ys.len()),
        });
    }
    if xs.iter().chain(ys).any(|v| v.is_nan()) {
        return Err(Error::Numeric("NaN in KS sample".into()));
    }
    let mut a = xs.to_vec();
    let mut b = ys.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (m, n) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0f64;
    while i < a.len() && j < b.len() {
        let v = if a[i] <= b[j] { a[i] } else { b[j] };
        while i < a.len() && a[i] == v {
            i += 1;
        }
        while j < b.len() && b[j] == v {
            j += 1;
        }
        d = d.max((i as f64 / m - j as f64 / n).abs());
    }
    // one sample exhausted: the remaining gap closes monotonically
    d = d.max((i as f64 / m - j as f64 / n).abs());
    Ok(d)
}

/// Asymptotic two-sample KS critical value `c(α) √((m+n)/(mn))`, with the
/// tabulated `c(0.01) = 1.63` and `c(0.05) = 1.36` and `√(-ln(α/2)/2)`
/// otherwise.
pub fn ks_critical_value(alpha: f64, m: usize, n: usize) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain {
            what: "alpha",
            value: alpha,
            domain: "(0, 1)",
        });
    }
    if m == 0 || n == 0 {
        return Err(Error::InsufficientSamples { needed: 1, got: 0 });
    }
    let c = if alpha == 0.01 {
        1.63
    } else if alpha == 0.05 {
        1.36
    } else {
        (-(alpha / 2.0).ln() / 2.0).sqrt()
    };
    let (m, n) = (m as f64, n as f64);
    Ok(c * ((m + n) / (m * n)).sqrt())
}

/// Largest term magnitude the power series may reach before cancellation
/// eats into the 1e-8 budget.
const SERIES_PEAK_LIMIT: f64 = 1e3;
const SERIES_RADIUS: f64 = 5.0;

/// `E_β(z) = Σ_k z^k / Γ(βk + 1)` for `β ∈ (0, 1]` and `z ≤ 0`.
///
/// Small arguments use the power series with compensated summation. Once the
/// alternating terms grow large enough to cancel badly, the value comes from
/// the integral representation
/// `E_β(-x) = sin(βπ)/(βπ) ∫₀^∞ exp(-(xw)^{1/β}) / (w² + 2w cos βπ + 1) dw`.
pub fn mittag_leffler(beta: f64, z: f64) -> Result<f64> {
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::Domain {
            what: "beta",
            value: beta,
            domain: "(0, 1]",
        });
    }
    if !(z <= 0.0) || z.is_infinite() {
        return Err(Error::Domain {
            what: "z",
            value: z,
            domain: "(-inf, 0]",
        });
    }
    if z == 0.0 {
        return Ok(1.0);
    }
    if beta == 1.0 {
        return Ok(z.exp());
    }
    let x = -z;
    if x <= SERIES_RADIUS && series_peak(beta, x) <= SERIES_PEAK_LIMIT {
        Ok(ml_series(beta, z))
    } else {
        Ok(ml_integral(beta, x))
    }
}

/// Largest `x^k / Γ(βk + 1)`, or the first term above the series limit.
fn series_peak(beta: f64, x: f64) -> f64 {
    let limit = SERIES_PEAK_LIMIT.ln();
    let mut peak = 0.0f64;
    let mut k = 1u32;
    loop {
        let log_term = k as f64 * x.ln() - ln_gamma(beta * k as f64 + 1.0);
        if log_term > limit {
            return log_term.exp();
        }
        peak = peak.max(log_term);
        if log_term < peak - 40.0 {
            return peak.exp();
        }
        k += 1;
    }
}

fn ml_series(beta: f64, z: f64) -> f64 {
    let mut sum = NeumaierSum::default();
    sum.add(1.0);
    let x = -z;
    let mut k = 1u32;
    let mut seen_peak = false;
    loop {
        let arg = beta * k as f64 + 1.0;
        let magnitude = if arg < 170.0 {
            x.powi(k as i32) / gamma(arg)
        } else {
            (k as f64 * x.ln() - ln_gamma(arg)).exp()
        };
        let term = if k % 2 == 1 { -magnitude } else { magnitude };
        sum.add(term);
        let next = (k as f64 + 1.0) * x.ln() - ln_gamma(beta * (k as f64 + 1.0) + 1.0);
        seen_peak |= next < magnitude.ln();
        if seen_peak && magnitude < 1e-18 * sum.value().abs().max(1e-300) {
            return sum.value();
        }
        k += 1;
    }
}

fn ml_integral(beta: f64, x: f64) -> f64 {
    let c = (beta * PI).cos();
    let inv = 1.0 / beta;
    let scale = (beta * PI).sin() / (beta * PI);
    // near β = 1 the kernel peaks sharply at w = 1 while the prefactor
    // shrinks, so the tolerance is set on the final value
    let tol = 1e-13 / scale;
    let near = integrate(
        |w| (-(x * w).powf(inv)).exp() / (w * w + 2.0 * w * c + 1.0),
        0.0,
        1.0,
        tol,
    );
    let far = integrate(
        |v| {
            if v == 0.0 {
                0.0
            } else {
                (-(x / v).powf(inv)).exp() / (v * v + 2.0 * v * c + 1.0)
            }
        },
        0.0,
        1.0,
        tol,
    );
    scale * (near + far)
}

/// `P(N(E(t)) = k)` for constant β, where N has rate λ and E inverts a
/// stable subordinator with Laplace exponent `Γ(1-β) t θ^β`:
/// `Σ_{j ≥ k} C(j, k) (-1)^{j-k} z^j / Γ(βj + 1)` with `z = λ t^β / Γ(1-β)`.
///
/// `k = 0` reduces to `E_β(-z)`. For `k ≥ 1` only the series is available
/// and a numeric error is returned where it would lose accuracy.
pub fn fractional_poisson_pmf(beta: f64, lambda: f64, t: f64, k: u64) -> Result<f64> {
    if !(lambda > 0.0) || !(t >= 0.0) {
        return Err(Error::Parameter(format!(
            "fractional Poisson law needs lambda > 0 and t >= 0, got {lambda}, {t}"
        )));
    }
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::Domain {
            what: "beta",
            value: beta,
            domain: "(0, 1)",
        });
    }
    let z = lambda * t.powf(beta) / gamma(1.0 - beta);
    if k == 0 {
        return mittag_leffler(beta, -z);
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    // terms C(j,k) z^j / Γ(βj+1) in log space
    let ln_z = z.ln();
    let ln_term = |j: u64| {
        ln_gamma(j as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((j - k) as f64 + 1.0)
            + j as f64 * ln_z
            - ln_gamma(beta * j as f64 + 1.0)
    };
    let mut sum = NeumaierSum::default();
    let mut peak = f64::NEG_INFINITY;
    let mut j = k;
    loop {
        let lt = ln_term(j);
        peak = peak.max(lt);
        let sign = if (j - k) % 2 == 0 { 1.0 } else { -1.0 };
        sum.add(sign * lt.exp());
        if lt < peak - 45.0 && j > k + 2 {
            break;
        }
        j += 1;
        if j > k + 100_000 {
            return Err(Error::Numeric("fractional Poisson series did not converge".into()));
        }
    }
    if peak.exp() > SERIES_PEAK_LIMIT {
        return Err(Error::Numeric(format!(
            "fractional Poisson series unstable at z = {z}, k = {k}"
        )));
    }
    Ok(sum.value())
}

/// Sample Pearson correlation; zero variance is reported as an error.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::Parameter(format!(
            "correlation needs paired samples, got {} and {}",
            xs.len(),
            ys.len()
        )));
    }
    let n = xs.len();
    if n < 2 {
        return Err(Error::InsufficientSamples { needed: 2, got: n });
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (&x, &y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::DegenerateSample("zero variance in correlation input"));
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Correlation of `D(b) - D(a)` with `D(d) - D(c)` across paths. The SE is
/// the null value `1/√n`.
pub fn increment_correlation(
    paths: &[JumpPath],
    window1: (f64, f64),
    window2: (f64, f64),
) -> Result<McEstimate> {
    let inc = |p: &JumpPath, (a, b): (f64, f64)| -> Result<f64> { Ok(p.eval(b)? - p.eval(a)?) };
    let xs = paths.iter().map(|p| inc(p, window1)).collect::<Result<Vec<_>>>()?;
    let ys = paths.iter().map(|p| inc(p, window2)).collect::<Result<Vec<_>>>()?;
    let r = pearson(&xs, &ys)?;
    Ok(McEstimate {
        mean: r,
        se: 1.0 / (paths.len() as f64).sqrt(),
        n: paths.len(),
    })
}

/// Result of a chi-square goodness-of-fit test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSquareOutcome {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Goodness of fit of integer counts to Poisson(`mean`).
///
/// Cells are pooled left to right until each holds expected frequency at
/// least 5; the last cell absorbs the whole upper tail.
pub fn chi_square_poisson(counts: &[u64], mean: f64) -> Result<ChiSquareOutcome> {
    if !(mean > 0.0) {
        return Err(Error::Parameter(format!("Poisson mean must be positive, got {mean}")));
    }
    if counts.len() < 2 {
        return Err(Error::InsufficientSamples {
            needed: 2,
            got: counts.len(),
        });
    }
    let total = counts.len() as f64;
    let max = *counts.iter().max().unwrap() as usize;
    let mut hist = vec![0u64; max + 1];
    counts.iter().for_each(|&c| hist[c as usize] += 1);
    let observed_above = |k: usize| -> u64 { hist.iter().skip(k + 1).sum() };

    let mut cells: Vec<(f64, f64)> = Vec::new();
    let (mut obs, mut exp) = (0.0, 0.0);
    let mut cdf = 0.0;
    let mut k = 0usize;
    loop {
        let pk = (k as f64 * mean.ln() - mean - ln_gamma(k as f64 + 1.0)).exp();
        obs += hist.get(k).copied().unwrap_or(0) as f64;
        exp += total * pk;
        cdf += pk;
        let tail = total * (1.0 - cdf).max(0.0);
        if tail < 5.0 {
            cells.push((obs + observed_above(k) as f64, exp + tail));
            break;
        }
        if exp >= 5.0 {
            cells.push((obs, exp));
            obs = 0.0;
            exp = 0.0;
        }
        k += 1;
    }
    // a short trailing cell is merged into its neighbour
    if cells.len() >= 2 && cells.last().unwrap().1 < 5.0 {
        let (o, e) = cells.pop().unwrap();
        let last = cells.last_mut().unwrap();
        last.0 += o;
        last.1 += e;
    }
    if cells.len() < 2 {
        return Err(Error::DegenerateSample("fewer than two chi-square cells"));
    }
    let statistic: f64 = cells.iter().map(|&(o, e)| (o - e) * (o - e) / e).sum();
    let dof = cells.len() - 1;
    let dist = ChiSquared::new(dof as f64).map_err(|e| Error::Numeric(e.to_string()))?;
    Ok(ChiSquareOutcome {
        statistic,
        dof,
        p_value: dist.sf(statistic),
    })
}
