//! Replicated experiments behind the CLI commands and the verification
//! suites.
//!
//! Replication `r` always draws from stream id `r` of the experiment's
//! master seed, with separate lanes for the independent ingredients (jumps,
//! Poisson clock, Bernoulli walk, second sampler). Replications run on the
//! current rayon pool and are collected in index order, so results never
//! depend on the number of workers.

use rayon::prelude::*;

use crate::ctrw::{BernoulliWalk, CtrwScheme, PnRule, SlowlyVarying};
use crate::error::{Error, Result};
use crate::mfpp::MfppSample;
use crate::numeric::NeumaierSum;
use crate::ppp::{self, PointPattern, Truncation, TruncationMode};
use crate::rng::{derive_seed, RngStream};
use crate::stability::StabilityIndex;
use crate::stats::{
    binomial_proportion, empirical_laplace, fractional_poisson_pmf, ks_critical_value,
    ks_two_sample, pearson, McEstimate,
};
use crate::subordinator::{build_path, laplace_transform};

/// Excluded small-jump mass on `[0, 1]` used whenever a truncation is not
/// given explicitly.
pub const EXCLUDED_MASS: f64 = 1e-3;

const LANE_JUMPS: u64 = 0;
const LANE_CLOCK: u64 = 1;
const LANE_WALK: u64 = 2;
const LANE_ALT: u64 = 3;

const MAX_HORIZON: f64 = 5.0;
const MAX_BETA: f64 = 0.9;

/// Largest horizon up to 5 on which the family stays at or below 0.9, so
/// that the subordinator can be simulated far enough for its inverse.
pub fn auto_horizon(spec: &str) -> Result<f64> {
    let fits = |h: f64| {
        StabilityIndex::parse(spec, h)
            .map(|idx| idx.beta_sup() <= MAX_BETA)
            .unwrap_or(false)
    };
    if fits(MAX_HORIZON) {
        return Ok(MAX_HORIZON);
    }
    // validate the spec itself on a short window first
    StabilityIndex::parse(spec, 1e-6)?;
    if !fits(1e-6) {
        return Err(Error::Parameter(format!(
            "`{spec}` starts above {MAX_BETA}; pass --horizon explicitly"
        )));
    }
    let (mut lo, mut hi) = (1e-6, MAX_HORIZON);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if fits(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-12 {
            break;
        }
    }
    Ok(lo)
}

/// Stationary truncation whose excluded mass on `[0, min(1, H)]` is at most
/// [`EXCLUDED_MASS`].
pub fn default_truncation(idx: &StabilityIndex) -> Result<Truncation> {
    ppp::truncation_for_mass(
        idx,
        idx.horizon().min(1.0),
        EXCLUDED_MASS,
        TruncationMode::Stationary,
    )
}

/// D at each of `ts`, summing the pattern's jumps in sampling order.
pub fn values_at(pattern: &PointPattern, ts: &[f64]) -> Vec<f64> {
    let mut sums = vec![NeumaierSum::default(); ts.len()];
    for p in pattern.points() {
        for (sum, &t) in sums.iter_mut().zip(ts) {
            if p.time <= t {
                sum.add(p.size);
            }
        }
    }
    sums.iter().map(NeumaierSum::value).collect()
}

fn replicate<T, F>(reps: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync + Send,
{
    (0..reps as u64).into_par_iter().map(f).collect()
}

fn check_times(ts: &[f64], idx: &StabilityIndex) -> Result<f64> {
    if ts.is_empty() {
        return Err(Error::Usage("at least one time is required".into()));
    }
    let tmax = ts.iter().copied().fold(0.0, f64::max);
    if ts.iter().any(|&t| !(t >= 0.0)) || tmax > idx.horizon() {
        return Err(Error::Usage(format!(
            "times must lie in [0, {}]",
            idx.horizon()
        )));
    }
    Ok(tmax)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LaplaceRow {
    pub theta: f64,
    pub t: f64,
    pub estimate: McEstimate,
    pub oracle: f64,
    pub bias_bound: f64,
    pub pass: bool,
}

/// Monte Carlo `E exp(-θ D(t))` against the closed form, for every pair in
/// `thetas × ts`. The pass rule allows 3 SE plus `θ` times the excluded mass.
pub fn laplace_experiment(
    idx: &StabilityIndex,
    thetas: &[f64],
    ts: &[f64],
    reps: usize,
    seed: u64,
    truncation: Truncation,
) -> Result<Vec<LaplaceRow>> {
    let tmax = check_times(ts, idx)?;
    let samples = replicate(reps, |r| {
        let mut s = RngStream::with_lane(seed, r, LANE_JUMPS);
        Ok(values_at(&ppp::sample(&mut s, tmax, truncation, idx)?, ts))
    })?;
    let mut rows = Vec::new();
    for &theta in thetas {
        for (j, &t) in ts.iter().enumerate() {
            let column: Vec<f64> = samples.iter().map(|v| v[j]).collect();
            let estimate = empirical_laplace(&column, theta)?;
            let oracle = laplace_transform(idx, theta, t)?;
            let bias_bound = theta * ppp::small_jump_mass(idx, t, truncation)?;
            let pass = (estimate.mean - oracle).abs() <= 3.0 * estimate.se + bias_bound;
            rows.push(LaplaceRow {
                theta,
                t,
                estimate,
                oracle,
                bias_bound,
                pass,
            });
        }
    }
    Ok(rows)
}

/// Per-replication values of D(t), E(t) and X(t) at one time `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MfppDraw {
    pub d: f64,
    /// `None` when D never reaches `t` within the horizon.
    pub e: Option<f64>,
    pub x: Option<u64>,
}

fn mfpp_draws(
    idx: &StabilityIndex,
    lambda: f64,
    ts: &[f64],
    reps: usize,
    seed: u64,
    truncation: Truncation,
) -> Result<Vec<Vec<MfppDraw>>> {
    let horizon = idx.horizon();
    replicate(reps, |r| {
        let mut jumps = RngStream::with_lane(seed, r, LANE_JUMPS);
        let mut clock = RngStream::with_lane(seed, r, LANE_CLOCK);
        let sample = MfppSample::simulate(&mut jumps, &mut clock, idx, horizon, truncation, lambda)?;
        ts.iter()
            .map(|&t| {
                let d = if t <= horizon { sample.d_path().eval(t)? } else { f64::NAN };
                let e = match sample.operational_time(t) {
                    Ok(e) => Some(e),
                    Err(Error::HorizonExceeded { .. }) => None,
                    Err(err) => return Err(err),
                };
                let x = match e {
                    Some(e) => Some(sample.n_path().count_up_to(e)?),
                    None => None,
                };
                Ok(MfppDraw { d, e, x })
            })
            .collect()
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MfppRow {
    pub t: f64,
    pub k: u64,
    pub estimate: McEstimate,
    /// Fractional Poisson probability, available for constant β only.
    pub oracle: Option<f64>,
    /// Replications excluded because E(t) lay beyond the horizon.
    pub horizon_exceeded: usize,
    /// `|estimate - oracle| ≤ 3 √(p(1-p)/R)` when an oracle exists.
    pub pass: Option<bool>,
}

/// Empirical law of X(t) for each `t`, with the fractional Poisson oracle
/// when β is constant. Rows run over `k = 0..=max(kmax, largest observed)`
/// capped at `kmax` when given.
pub fn mfpp_experiment(
    idx: &StabilityIndex,
    lambda: f64,
    ts: &[f64],
    reps: usize,
    seed: u64,
    truncation: Truncation,
    kmax: Option<u64>,
) -> Result<Vec<MfppRow>> {
    check_times(ts, idx)?;
    if !(lambda > 0.0) {
        return Err(Error::Usage(format!("lambda must be positive, got {lambda}")));
    }
    let draws = mfpp_draws(idx, lambda, ts, reps, seed, truncation)?;
    let mut rows = Vec::new();
    for (j, &t) in ts.iter().enumerate() {
        let values: Vec<u64> = draws.iter().filter_map(|d| d[j].x).collect();
        let exceeded = reps - values.len();
        let observed_max = values.iter().copied().max().unwrap_or(0);
        let top = kmax.unwrap_or(observed_max);
        for k in 0..=top {
            let hits = values.iter().filter(|&&v| v == k).count();
            let estimate = binomial_proportion(hits, values.len())?;
            let oracle = if idx.is_constant() {
                fractional_poisson_pmf(idx.beta_sup(), lambda, t, k).ok()
            } else {
                None
            };
            let pass = oracle.map(|p| {
                let se = (p * (1.0 - p) / values.len() as f64).sqrt();
                (estimate.mean - p).abs() <= 3.0 * se
            });
            rows.push(MfppRow {
                t,
                k,
                estimate,
                oracle,
                horizon_exceeded: exceeded,
                pass,
            });
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CtrwRow {
    pub n: u64,
    pub t: f64,
    pub ks_d: f64,
    pub ks_e: f64,
    pub ks_x: f64,
    pub critical_value: f64,
    /// All three distances below the critical value at this `n`.
    pub below_critical: bool,
    /// The whole sequence over `n` for this `t` passes: each distance is
    /// non-increasing in `n` up to one inversion and below the critical
    /// value at the largest `n`.
    pub pass: bool,
}

/// Settings of a CTRW convergence experiment.
#[derive(Debug, Clone)]
pub struct CtrwSetup {
    pub family: SlowlyVarying,
    pub ns: Vec<u64>,
    pub ts: Vec<f64>,
    pub reps: usize,
    pub pn_rule: PnRule,
    pub lambda: f64,
    pub truncation: Truncation,
    pub alpha: f64,
}

fn at_most_one_inversion(xs: &[f64]) -> bool {
    xs.windows(2).filter(|w| w[1] > w[0]).count() <= 1
}

fn censored(e: Option<f64>) -> f64 {
    e.unwrap_or(f64::INFINITY)
}

/// KS distances of `S_n(t)`, `E_n(t)` and the CTRW at `t` against `D(t)`,
/// `E(t)` and `X(t)`, for each `n`. Inverses beyond the horizon enter the
/// KS statistic as `+∞`; the corresponding counts are left out on both
/// sides.
pub fn ctrw_experiment(idx: &StabilityIndex, setup: &CtrwSetup, seed: u64) -> Result<Vec<CtrwRow>> {
    check_times(&setup.ts, idx)?;
    if setup.ns.is_empty() || setup.ns.contains(&0) {
        return Err(Error::Usage("n values must be positive".into()));
    }
    if !(setup.lambda > 0.0) {
        return Err(Error::Usage(format!("lambda must be positive, got {}", setup.lambda)));
    }
    let mut ns = setup.ns.clone();
    ns.sort_unstable();
    ns.dedup();
    let reference = mfpp_draws(idx, setup.lambda, &setup.ts, setup.reps, seed, setup.truncation)?;
    let critical = ks_critical_value(setup.alpha, setup.reps, setup.reps)?;
    let mut rows = Vec::new();
    for (j, &t) in setup.ts.iter().enumerate() {
        let ref_d: Vec<f64> = reference.iter().map(|d| d[j].d).collect();
        let ref_e: Vec<f64> = reference.iter().map(|d| censored(d[j].e)).collect();
        let ref_x: Vec<f64> = reference.iter().filter_map(|d| d[j].x.map(|x| x as f64)).collect();
        let mut block = Vec::new();
        for &n in &ns {
            let scheme = CtrwScheme::new(n, idx.horizon(), idx, setup.family)?;
            let p = setup.pn_rule.p(n);
            // the array for each n gets its own seed: a fresh triangular array per row
            let row_seed = derive_seed(seed, n);
            let draws = replicate(setup.reps, |r| {
                let mut jumps = RngStream::with_lane(row_seed, r, LANE_JUMPS);
                let (s, e) = scheme.sample_point(&mut jumps, t, t)?;
                let x = match e {
                    Some(e) => {
                        let walk = RngStream::with_lane(row_seed, r, LANE_WALK);
                        Some(BernoulliWalk::new(walk, p)?.value(setup.lambda * e / p)?)
                    }
                    None => None,
                };
                Ok((s, e, x))
            })?;
            let s: Vec<f64> = draws.iter().map(|d| d.0).collect();
            let e: Vec<f64> = draws.iter().map(|d| censored(d.1)).collect();
            let x: Vec<f64> = draws.iter().filter_map(|d| d.2.map(|x| x as f64)).collect();
            let ks_d = ks_two_sample(&s, &ref_d)?;
            let ks_e = ks_two_sample(&e, &ref_e)?;
            let ks_x = ks_two_sample(&x, &ref_x)?;
            block.push(CtrwRow {
                n,
                t,
                ks_d,
                ks_e,
                ks_x,
                critical_value: critical,
                below_critical: ks_d < critical && ks_e < critical && ks_x < critical,
                pass: false,
            });
        }
        let trend = |f: fn(&CtrwRow) -> f64| at_most_one_inversion(&block.iter().map(f).collect::<Vec<_>>());
        let pass = trend(|r| r.ks_d)
            && trend(|r| r.ks_e)
            && trend(|r| r.ks_x)
            && block.last().is_some_and(|r| r.below_critical);
        block.iter_mut().for_each(|r| r.pass = pass);
        rows.extend(block);
    }
    Ok(rows)
}

/// One line of the verification report.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub criterion: u8,
    pub suite: &'static str,
    pub case: String,
    pub value: f64,
    pub bound: f64,
    pub pass: bool,
}

/// Replication counts for the verification suites.
#[derive(Debug, Clone, PartialEq)]
pub struct Scale {
    pub laplace_reps: usize,
    pub cross_reps: usize,
    pub continuity_reps: usize,
    pub correlation_reps: usize,
    pub monotone_paths: usize,
    pub mfpp_reps: usize,
    pub tail_draws: usize,
    pub ctrw_ns: Vec<u64>,
    pub ctrw_reps: usize,
    pub ctrw_alpha: f64,
}

impl Scale {
    pub fn full() -> Self {
        Self {
            laplace_reps: 100_000,
            cross_reps: 10_000,
            continuity_reps: 10_000,
            correlation_reps: 10_000,
            monotone_paths: 1_000,
            mfpp_reps: 100_000,
            tail_draws: 1_000_000,
            ctrw_ns: vec![100, 1_000, 10_000],
            ctrw_reps: 10_000,
            ctrw_alpha: 0.01,
        }
    }

    pub fn quick() -> Self {
        Self {
            laplace_reps: 10_000,
            cross_reps: 2_000,
            continuity_reps: 2_000,
            correlation_reps: 2_000,
            monotone_paths: 200,
            mfpp_reps: 10_000,
            tail_draws: 100_000,
            ctrw_ns: vec![100, 1_000],
            ctrw_reps: 1_000,
            ctrw_alpha: 0.05,
        }
    }
}

pub const CONSTANT_SPEC: &str = "constant:0.5";
pub const AFFINE_SPEC: &str = "affine:0.4,0.2";

/// The two families exercised by the suites, each on its automatic horizon.
pub fn suite_families() -> Result<Vec<(&'static str, StabilityIndex)>> {
    [CONSTANT_SPEC, AFFINE_SPEC]
        .into_iter()
        .map(|spec| Ok((spec, StabilityIndex::parse(spec, auto_horizon(spec)?)?)))
        .collect()
}

pub const CRITERIA: [(u8, &str); 9] = [
    (1, "laplace-oracle"),
    (2, "sampler-cross-validation"),
    (3, "continuity-bound"),
    (4, "independent-increments"),
    (5, "monotone-paths"),
    (6, "mfpp-mittag-leffler"),
    (7, "tail-normalization"),
    (8, "ctrw-convergence"),
    (9, "determinism"),
];

fn suite_name(criterion: u8) -> &'static str {
    CRITERIA[(criterion - 1) as usize].1
}

/// Runs the statistical suite for criterion 1 to 8. Determinism (9) is a
/// property of the binary and is checked by running it twice.
pub fn run_criterion(criterion: u8, seed: u64, scale: &Scale) -> Result<Vec<Check>> {
    let seed = derive_seed(seed, criterion as u64);
    match criterion {
        1 => laplace_suite(seed, scale),
        2 => cross_validation_suite(seed, scale),
        3 => continuity_suite(seed, scale),
        4 => correlation_suite(seed, scale),
        5 => monotone_suite(seed, scale),
        6 => mfpp_suite(seed, scale),
        7 => tail_suite(seed, scale),
        8 => ctrw_suite(seed, scale),
        other => Err(Error::Usage(format!("no statistical suite for criterion {other}"))),
    }
}

/// All statistical suites in criterion order.
pub fn verify(seed: u64, scale: &Scale) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for criterion in 1..=8 {
        checks.extend(run_criterion(criterion, seed, scale)?);
    }
    Ok(checks)
}

fn check(criterion: u8, case: String, value: f64, bound: f64, pass: bool) -> Check {
    Check {
        criterion,
        suite: suite_name(criterion),
        case,
        value,
        bound,
        pass,
    }
}

fn laplace_suite(seed: u64, scale: &Scale) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for (i, (spec, idx)) in suite_families()?.into_iter().enumerate() {
        let rows = laplace_experiment(
            &idx,
            &[0.5, 1.0, 2.0],
            &[0.5, 1.0],
            scale.laplace_reps,
            derive_seed(seed, i as u64),
            default_truncation(&idx)?,
        )?;
        for row in rows {
            out.push(check(
                1,
                format!("{spec} theta={} t={}", row.theta, row.t),
                (row.estimate.mean - row.oracle).abs(),
                3.0 * row.estimate.se + row.bias_bound,
                row.pass,
            ));
        }
    }
    Ok(out)
}

fn cross_validation_suite(seed: u64, scale: &Scale) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for (i, (spec, idx)) in suite_families()?.into_iter().enumerate() {
        let seed = derive_seed(seed, i as u64);
        let stationary = ppp::truncation_for_mass(&idx, 1.0, EXCLUDED_MASS, TruncationMode::Stationary)?;
        let threshold = ppp::truncation_for_mass(&idx, 1.0, EXCLUDED_MASS, TruncationMode::Threshold)?;
        let totals = |trunc: Truncation, lane: u64| {
            replicate(scale.cross_reps, |r| {
                let mut s = RngStream::with_lane(seed, r, lane);
                Ok(values_at(&ppp::sample(&mut s, 1.0, trunc, &idx)?, &[1.0])[0])
            })
        };
        let a = totals(stationary, LANE_JUMPS)?;
        let b = totals(threshold, LANE_ALT)?;
        let d = ks_two_sample(&a, &b)?;
        let crit = ks_critical_value(0.01, a.len(), b.len())?;
        out.push(check(2, format!("{spec} D(1)"), d, crit, d < crit));
    }
    Ok(out)
}

/// `C_ε = 1 + 2β*/(ε(1-β*))`.
pub fn continuity_constant(beta_star: f64, eps: f64) -> f64 {
    1.0 + 2.0 * beta_star / (eps * (1.0 - beta_star))
}

fn continuity_suite(seed: u64, scale: &Scale) -> Result<Vec<Check>> {
    let eps = 0.1;
    let families = [
        (CONSTANT_SPEC, StabilityIndex::parse(CONSTANT_SPEC, 1.0)?),
        (AFFINE_SPEC, StabilityIndex::parse(AFFINE_SPEC, 1.0)?),
    ];
    let cases = [(0.0, 0.01), (0.0, 0.05), (0.0, 0.1), (0.4, 0.01), (0.4, 0.05), (0.4, 0.1)];
    let mut times: Vec<f64> = cases.iter().flat_map(|&(t, h)| [t, t + h]).collect();
    times.sort_by(f64::total_cmp);
    times.dedup();
    let pos = |x: f64| times.iter().position(|&v| v == x).unwrap();
    let mut out = Vec::new();
    for (i, (spec, idx)) in families.into_iter().enumerate() {
        let seed = derive_seed(seed, i as u64);
        let trunc = default_truncation(&idx)?;
        let c = continuity_constant(idx.beta_sup(), eps);
        let values = replicate(scale.continuity_reps, |r| {
            let mut s = RngStream::with_lane(seed, r, LANE_JUMPS);
            Ok(values_at(&ppp::sample(&mut s, 1.0, trunc, &idx)?, &times))
        })?;
        for &(t, h) in &cases {
            let (a, b) = (pos(t), pos(t + h));
            let hits = values.iter().filter(|v| v[b] - v[a] > eps).count();
            let est = binomial_proportion(hits, values.len())?;
            let bound = c * h + 3.0 * est.se;
            out.push(check(
                3,
                format!("{spec} C={c} t={t} h={h}"),
                est.mean,
                bound,
                est.mean <= bound,
            ));
        }
    }
    Ok(out)
}

fn correlation_suite(seed: u64, scale: &Scale) -> Result<Vec<Check>> {
    let bound = 3.0 / (scale.correlation_reps as f64).sqrt();
    let mut out = Vec::new();
    for (i, (spec, idx)) in suite_families()?.into_iter().enumerate() {
        let seed = derive_seed(seed, i as u64);
        let trunc = default_truncation(&idx)?;
        let values = replicate(scale.correlation_reps, |r| {
            let mut s = RngStream::with_lane(seed, r, LANE_JUMPS);
            Ok(values_at(&ppp::sample(&mut s, 1.0, trunc, &idx)?, &[0.5, 1.0]))
        })?;
        let first: Vec<f64> = values.iter().map(|v| v[0]).collect();
        let second: Vec<f64> = values.iter().map(|v| v[1] - v[0]).collect();
        let rho = pearson(&first, &second)?;
        out.push(check(
            4,
            format!("{spec} corr((0,0.5],(0.5,1])"),
            rho.abs(),
            bound,
            rho.abs() <= bound,
        ));
    }
    Ok(out)
}

fn monotone_suite(seed: u64, scale: &Scale) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for (i, (spec, idx)) in suite_families()?.into_iter().enumerate() {
        for mode in [TruncationMode::Stationary, TruncationMode::Threshold] {
            let seed = derive_seed(seed, 2 * i as u64 + mode as u64);
            let trunc = ppp::truncation_for_mass(&idx, 1.0, EXCLUDED_MASS, mode)?;
            let horizon = idx.horizon();
            let probes: Vec<f64> = (0..=200).map(|k| horizon * k as f64 / 200.0).collect();
            let failures: usize = replicate(scale.monotone_paths, |r| {
                let mut s = RngStream::with_lane(seed, r, LANE_JUMPS);
                let path = build_path(&ppp::sample(&mut s, horizon, trunc, &idx)?);
                let mut bad = usize::from(!path.is_strictly_increasing());
                bad += usize::from(!crate::mfpp::galois_pair_holds(&path, &probes));
                // E is non-decreasing over a grid of levels
                let top = path.total();
                let mut last = 0.0;
                for k in 0..=200 {
                    let e = crate::mfpp::inverse(&path, (top * k as f64 / 200.0).min(top))?;
                    bad += usize::from(e < last);
                    last = e;
                }
                Ok(bad)
            })?
            .into_iter()
            .sum();
            out.push(check(
                5,
                format!("{spec} {} paths={}", trunc.mode_name(), scale.monotone_paths),
                failures as f64,
                0.0,
                failures == 0,
            ));
        }
    }
    Ok(out)
}

fn mfpp_suite(seed: u64, scale: &Scale) -> Result<Vec<Check>> {
    let horizon = auto_horizon(CONSTANT_SPEC)?;
    let idx = StabilityIndex::parse(CONSTANT_SPEC, horizon)?;
    let rows = mfpp_experiment(&idx, 1.0, &[1.0], scale.mfpp_reps, seed, default_truncation(&idx)?, Some(0))?;
    let row = &rows[0];
    let oracle = row.oracle.ok_or_else(|| Error::Numeric("missing oracle".into()))?;
    let se = (oracle * (1.0 - oracle) / (row.estimate.n as f64)).sqrt();
    Ok(vec![check(
        6,
        format!(
            "P(X(1)=0) est={:.6} oracle={:.6} exceeded={}",
            row.estimate.mean, oracle, row.horizon_exceeded
        ),
        (row.estimate.mean - oracle).abs(),
        3.0 * se,
        row.pass == Some(true),
    )])
}

/// `n P(J/b > c)` estimated from `draws` summands at `k = 1`.
pub fn tail_identity(
    idx: &StabilityIndex,
    family: SlowlyVarying,
    n: u64,
    c: f64,
    draws: usize,
    seed: u64,
) -> Result<McEstimate> {
    let scheme = CtrwScheme::new(n, 1.0 / n as f64, idx, family)?;
    // chunks keep the per-task work large without changing the draws
    const CHUNK: usize = 10_000;
    let chunks = draws.div_ceil(CHUNK);
    let hits: usize = replicate(chunks, |r| {
        let mut s = RngStream::with_lane(seed, r, LANE_JUMPS);
        let len = CHUNK.min(draws - r as usize * CHUNK);
        let mut hits = 0usize;
        for _ in 0..len {
            hits += usize::from(scheme.summand(&mut s, 1)? > c);
        }
        Ok(hits)
    })?
    .into_iter()
    .sum();
    let p = binomial_proportion(hits, draws)?;
    Ok(McEstimate {
        mean: n as f64 * p.mean,
        se: n as f64 * p.se,
        n: draws,
    })
}

fn tail_suite(seed: u64, scale: &Scale) -> Result<Vec<Check>> {
    let idx = StabilityIndex::constant(0.5, 1.0)?;
    let est = tail_identity(&idx, SlowlyVarying::Unit, 100, 1.0, scale.tail_draws, seed)?;
    Ok(vec![check(
        7,
        format!("n=100 c=1 draws={} est={:.6}", scale.tail_draws, est.mean),
        (est.mean - 1.0).abs(),
        3.0 * est.se,
        (est.mean - 1.0).abs() <= 3.0 * est.se,
    )])
}

fn ctrw_suite(seed: u64, scale: &Scale) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for (i, (spec, idx)) in suite_families()?.into_iter().enumerate() {
        let setup = CtrwSetup {
            family: SlowlyVarying::Unit,
            ns: scale.ctrw_ns.clone(),
            ts: vec![1.0],
            reps: scale.ctrw_reps,
            pn_rule: PnRule::Sqrt,
            lambda: 1.0,
            truncation: default_truncation(&idx)?,
            alpha: scale.ctrw_alpha,
        };
        let rows = ctrw_experiment(&idx, &setup, derive_seed(seed, i as u64))?;
        let last = rows.last().expect("at least one n");
        for (name, f) in [
            ("S_n(1) vs D(1)", (|r: &CtrwRow| r.ks_d) as fn(&CtrwRow) -> f64),
            ("E_n(1) vs E(1)", |r: &CtrwRow| r.ks_e),
            ("CTRW(1) vs X(1)", |r: &CtrwRow| r.ks_x),
        ] {
            let seq: Vec<f64> = rows.iter().map(f).collect();
            let trend = at_most_one_inversion(&seq);
            let listing = rows
                .iter()
                .map(|r| format!("n={}:{:.5}", r.n, f(r)))
                .collect::<Vec<_>>()
                .join(" ");
            out.push(check(
                8,
                format!("{spec} {name} {listing} trend={}", if trend { "ok" } else { "broken" }),
                f(last),
                last.critical_value,
                trend && f(last) < last.critical_value,
            ));
        }
    }
    Ok(out)
}
