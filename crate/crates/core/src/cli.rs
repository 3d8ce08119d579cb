//! The `mssim` command line: argument parsing, validation into an
//! [`ExperimentConfig`], dispatch and report emission.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use crate::ctrw::{PnRule, SlowlyVarying};
use crate::error::{Error, Result};
use crate::experiments::{
    self, auto_horizon, default_truncation, CtrwSetup, Scale, CRITERIA,
};
use crate::mfpp::MfppSample;
use crate::ppp::Truncation;
use crate::report::{ExperimentReport, Value};
use crate::rng::RngStream;
use crate::stability::StabilityIndex;

#[derive(Debug, Parser)]
#[command(name = "mssim", version, about = "Multistable subordinator and multifractional Poisson simulator")]
pub struct Cli {
    /// Master seed; replication r uses stream r of this seed.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Number of replications (at least 2).
    #[arg(long, global = true)]
    pub reps: Option<usize>,
    /// Worker threads; never changes the output.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Report file (directory for `paths`); stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone)]
pub struct ModelArgs {
    /// Stability index: constant:b, affine:c0,c1, sin:c0,c1,c2 or table:t,b;t,b;...
    #[arg(long, default_value = "constant:0.5")]
    pub beta: String,
    /// Simulation horizon; the largest H ≤ 5 with β ≤ 0.9 on [0, H] by default.
    #[arg(long)]
    pub horizon: Option<f64>,
    /// Stationary truncation level M.
    #[arg(long, conflicts_with = "trunc_eps")]
    pub trunc_m: Option<f64>,
    /// Threshold truncation: keep jumps of size at least eps.
    #[arg(long)]
    pub trunc_eps: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Monte Carlo Laplace transform of D(t) against the closed form.
    Laplace {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_delimiter = ',', default_values_t = [0.5, 1.0, 2.0])]
        theta: Vec<f64>,
        #[arg(long = "t", value_delimiter = ',', default_values_t = [0.5, 1.0])]
        t: Vec<f64>,
    },
    /// Empirical law of X(t) = N(E(t)).
    Mfpp {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        #[arg(long = "t", value_delimiter = ',', default_values_t = [1.0])]
        t: Vec<f64>,
    },
    /// KS distances of the CTRW approximation from the limit processes.
    Ctrw {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value = "unit")]
        lfamily: String,
        #[arg(long, value_delimiter = ',', default_values_t = [100u64, 1_000, 10_000])]
        n: Vec<u64>,
        #[arg(long = "t", value_delimiter = ',', default_values_t = [1.0])]
        t: Vec<f64>,
        /// sqrt or const:<v>
        #[arg(long, default_value = "sqrt")]
        pn_rule: String,
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        /// Significance level of the KS critical value.
        #[arg(long, default_value_t = 0.01)]
        alpha: f64,
    },
    /// Sample paths of D, E and X on a uniform grid, one CSV per replication.
    Paths {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        /// Right end of the evaluation grid.
        #[arg(long = "t", default_value_t = 1.0)]
        t: f64,
        /// Number of grid intervals.
        #[arg(long, default_value_t = 200)]
        grid: usize,
    },
    /// Runs the statistical verification suites.
    Verify {
        /// Reduced replication counts.
        #[arg(long)]
        quick: bool,
    },
}

/// A model after validation.
#[derive(Debug, Clone)]
pub struct Model {
    pub beta_spec: String,
    pub idx: StabilityIndex,
    pub truncation: Truncation,
}

#[derive(Debug, Clone)]
pub enum CommandConfig {
    Laplace { model: Model, thetas: Vec<f64>, ts: Vec<f64> },
    Mfpp { model: Model, lambda: f64, ts: Vec<f64> },
    Ctrw { model: Model, setup: CtrwSetup },
    Paths { model: Model, lambda: f64, t: f64, grid: usize },
    Verify { quick: bool },
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub reps: usize,
    pub workers: Option<usize>,
    pub out: Option<PathBuf>,
    pub command: CommandConfig,
}

const DEFAULT_REPS: usize = 10_000;
const DEFAULT_PATH_REPS: usize = 3;

fn usage(msg: impl Into<String>) -> Error {
    Error::Usage(msg.into())
}

impl Model {
    fn resolve(args: &ModelArgs) -> Result<Self> {
        let horizon = match args.horizon {
            Some(h) => h,
            None => auto_horizon(&args.beta).map_err(|e| usage(format!("--beta: {e}")))?,
        };
        let idx = StabilityIndex::parse(&args.beta, horizon)
            .map_err(|e| usage(format!("--beta/--horizon: {e}")))?;
        let truncation = match (args.trunc_m, args.trunc_eps) {
            (Some(m), _) if m.is_finite() && m > 0.0 => Truncation::Stationary { m },
            (Some(m), _) => return Err(usage(format!("--trunc-m must be positive, got {m}"))),
            (None, Some(eps)) if eps > 0.0 && eps < 1.0 => Truncation::Threshold { eps },
            (None, Some(eps)) => return Err(usage(format!("--trunc-eps must lie in (0, 1), got {eps}"))),
            (None, None) => default_truncation(&idx)?,
        };
        Ok(Self {
            beta_spec: args.beta.clone(),
            idx,
            truncation,
        })
    }

    fn echo(&self, report: ExperimentReport) -> ExperimentReport {
        report
            .with_header("beta", &self.beta_spec)
            .with_header("horizon", format!("{:.16e}", self.idx.horizon()))
            .with_header("truncation", self.truncation.mode_name())
            .with_header("truncation_parameter", format!("{:.16e}", self.truncation.parameter()))
    }
}

fn check_times(ts: &[f64], model: &Model, flag: &str) -> Result<()> {
    if ts.is_empty() || ts.iter().any(|&t| !(t >= 0.0) || t > model.idx.horizon()) {
        return Err(usage(format!(
            "{flag} values must lie in [0, {}]",
            model.idx.horizon()
        )));
    }
    Ok(())
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda.is_finite() {
        Ok(())
    } else {
        Err(usage(format!("--lambda must be positive, got {lambda}")))
    }
}

impl ExperimentConfig {
    /// Parses and validates a full argument list (program name first).
    pub fn parse_from<I, T>(args: I) -> Result<Self>
    where
        I: IntoIterator<Item = T>,
        T: Into<std::ffi::OsString> + Clone,
    {
        let cli = Cli::try_parse_from(args).map_err(|e| usage(e.to_string()))?;
        Self::from_cli(cli)
    }

    pub fn from_cli(cli: Cli) -> Result<Self> {
        let default_reps = match cli.command {
            Command::Paths { .. } => DEFAULT_PATH_REPS,
            _ => DEFAULT_REPS,
        };
        let reps = cli.reps.unwrap_or(default_reps);
        if reps < 2 {
            return Err(usage(format!("--reps must be at least 2, got {reps}")));
        }
        if cli.workers == Some(0) {
            return Err(usage("--workers must be at least 1"));
        }
        let command = match cli.command {
            Command::Laplace { model, theta, t } => {
                let model = Model::resolve(&model)?;
                check_times(&t, &model, "--t")?;
                if theta.is_empty() || theta.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
                    return Err(usage("--theta values must be finite and non-negative"));
                }
                CommandConfig::Laplace { model, thetas: theta, ts: t }
            }
            Command::Mfpp { model, lambda, t } => {
                let model = Model::resolve(&model)?;
                check_times(&t, &model, "--t")?;
                check_lambda(lambda)?;
                CommandConfig::Mfpp { model, lambda, ts: t }
            }
            Command::Ctrw { model, lfamily, n, t, pn_rule, lambda, alpha } => {
                let model = Model::resolve(&model)?;
                check_times(&t, &model, "--t")?;
                check_lambda(lambda)?;
                let family: SlowlyVarying = lfamily.parse().map_err(|e| usage(format!("--lfamily: {e}")))?;
                let pn_rule: PnRule = pn_rule.parse().map_err(|e| usage(format!("--pn-rule: {e}")))?;
                if n.is_empty() || n.contains(&0) {
                    return Err(usage("--n values must be positive"));
                }
                if !(alpha > 0.0 && alpha < 1.0) {
                    return Err(usage(format!("--alpha must lie in (0, 1), got {alpha}")));
                }
                let setup = CtrwSetup {
                    family,
                    ns: n,
                    ts: t,
                    reps,
                    pn_rule,
                    lambda,
                    truncation: model.truncation,
                    alpha,
                };
                CommandConfig::Ctrw { model, setup }
            }
            Command::Paths { model, lambda, t, grid } => {
                let model = Model::resolve(&model)?;
                check_times(&[t], &model, "--t")?;
                check_lambda(lambda)?;
                if grid == 0 {
                    return Err(usage("--grid must be at least 1"));
                }
                if cli.out.is_none() {
                    return Err(usage("paths needs --out <directory>"));
                }
                CommandConfig::Paths { model, lambda, t, grid }
            }
            Command::Verify { quick } => CommandConfig::Verify { quick },
        };
        Ok(Self {
            seed: cli.seed,
            reps,
            workers: cli.workers,
            out: cli.out,
            command,
        })
    }
}

fn join<T: std::fmt::Display>(xs: &[T]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

/// Runs the configured experiment on the current rayon pool.
pub fn run(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let seed = config.seed;
    let reps = config.reps;
    match &config.command {
        CommandConfig::Laplace { model, thetas, ts } => {
            let mut report = model
                .echo(ExperimentReport::new(
                    "laplace",
                    &["beta_spec", "theta", "t", "mc_mean", "mc_se", "oracle", "bias_bound", "pass"],
                ))
                .with_header("seed", seed)
                .with_header("reps", reps)
                .with_header("theta", join(thetas))
                .with_header("t", join(ts));
            let rows = experiments::laplace_experiment(&model.idx, thetas, ts, reps, seed, model.truncation)?;
            for r in rows {
                report.push_row(vec![
                    model.beta_spec.as_str().into(),
                    r.theta.into(),
                    r.t.into(),
                    r.estimate.mean.into(),
                    r.estimate.se.into(),
                    r.oracle.into(),
                    r.bias_bound.into(),
                    r.pass.into(),
                ]);
            }
            Ok(report)
        }
        CommandConfig::Mfpp { model, lambda, ts } => {
            let mut report = model
                .echo(ExperimentReport::new(
                    "mfpp",
                    &["t", "k", "empirical", "se", "oracle", "horizon_exceeded", "pass"],
                ))
                .with_header("seed", seed)
                .with_header("reps", reps)
                .with_header("lambda", lambda)
                .with_header("t", join(ts));
            let rows = experiments::mfpp_experiment(&model.idx, *lambda, ts, reps, seed, model.truncation, None)?;
            for r in rows {
                report.push_row(vec![
                    r.t.into(),
                    r.k.into(),
                    r.estimate.mean.into(),
                    r.estimate.se.into(),
                    r.oracle.into(),
                    r.horizon_exceeded.into(),
                    r.pass.into(),
                ]);
            }
            Ok(report)
        }
        CommandConfig::Ctrw { model, setup } => {
            let mut report = model
                .echo(ExperimentReport::new(
                    "ctrw",
                    &["n", "t", "ks_vs_D", "ks_vs_E", "ks_vs_X", "critical_value", "below_critical", "pass"],
                ))
                .with_header("seed", seed)
                .with_header("reps", reps)
                .with_header("lfamily", setup.family)
                .with_header("n", join(&setup.ns))
                .with_header("t", join(&setup.ts))
                .with_header("pn_rule", setup.pn_rule)
                .with_header("lambda", setup.lambda)
                .with_header("alpha", setup.alpha);
            for r in experiments::ctrw_experiment(&model.idx, setup, seed)? {
                report.push_row(vec![
                    r.n.into(),
                    r.t.into(),
                    r.ks_d.into(),
                    r.ks_e.into(),
                    r.ks_x.into(),
                    r.critical_value.into(),
                    r.below_critical.into(),
                    r.pass.into(),
                ]);
            }
            Ok(report)
        }
        CommandConfig::Paths { model, lambda, t, grid } => {
            let dir = config.out.as_deref().ok_or_else(|| usage("paths needs --out"))?;
            emit_paths(model, *lambda, *t, *grid, reps, seed, dir)
        }
        CommandConfig::Verify { quick } => {
            let scale = if *quick { Scale::quick() } else { Scale::full() };
            let mut report = ExperimentReport::new(
                "verify",
                &["criterion", "suite", "case", "value", "bound", "pass"],
            )
            .with_header("seed", seed)
            .with_header("quick", quick);
            for c in experiments::verify(seed, &scale)? {
                report.push_row(vec![
                    (c.criterion as u64).into(),
                    c.suite.into(),
                    c.case.into(),
                    c.value.into(),
                    c.bound.into(),
                    c.pass.into(),
                ]);
            }
            Ok(report)
        }
    }
}

/// Writes `path_<r>.csv` with columns `t, D, E, X` for each replication and
/// returns a summary of the monotonicity checks.
pub fn emit_paths(
    model: &Model,
    lambda: f64,
    t_end: f64,
    grid: usize,
    reps: usize,
    seed: u64,
    dir: &Path,
) -> Result<ExperimentReport> {
    if grid == 0 {
        return Err(usage("--grid must be at least 1"));
    }
    fs::create_dir_all(dir)?;
    let times: Vec<f64> = (0..=grid).map(|i| t_end * i as f64 / grid as f64).collect();
    let horizon = model.idx.horizon();
    let samples = (0..reps as u64)
        .into_par_iter()
        .map(|r| {
            let mut jumps = RngStream::with_lane(seed, r, 0);
            let mut clock = RngStream::with_lane(seed, r, 1);
            MfppSample::simulate(&mut jumps, &mut clock, &model.idx, horizon, model.truncation, lambda)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut report = model
        .echo(ExperimentReport::new(
            "paths",
            &["rep", "file", "jumps", "d_non_decreasing", "x_non_decreasing", "pass"],
        ))
        .with_header("seed", seed)
        .with_header("reps", reps)
        .with_header("lambda", lambda)
        .with_header("t", t_end)
        .with_header("grid", grid);
    for (r, sample) in samples.iter().enumerate() {
        let name = format!("path_{r:05}.csv");
        let mut file = ExperimentReport::new("paths", &["t", "D", "E", "X"]);
        for (k, v) in report.header().iter().skip(2) {
            file = file.with_header(k, v);
        }
        file = file.with_header("rep", r);
        let (mut d_ok, mut x_ok) = (true, true);
        let (mut last_d, mut last_x) = (0.0, 0u64);
        for &t in &times {
            let d = sample.d_path().eval(t)?;
            let e = sample.operational_time(t).ok();
            let x = match e {
                Some(_) => sample.value(t).ok(),
                None => None,
            };
            d_ok &= d >= last_d;
            last_d = d;
            if let Some(x) = x {
                x_ok &= x >= last_x;
                last_x = x;
            }
            file.push_row(vec![t.into(), d.into(), e.into(), x.into()]);
        }
        let mut out = fs::File::create(dir.join(&name))?;
        file.write_to(&mut out)?;
        out.flush()?;
        report.push_row(vec![
            r.into(),
            name.into(),
            sample.d_path().len().into(),
            d_ok.into(),
            x_ok.into(),
            (d_ok && x_ok).into(),
        ]);
    }
    Ok(report)
}

fn run_in_pool(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = config.workers {
        builder = builder.num_threads(w);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Numeric(format!("worker pool: {e}")))?;
    pool.install(|| run(config))
}

/// Entry point of the binary. Exit codes: 0 when every pass flag holds,
/// 1 when some check fails, 2 on usage errors, 3 on runtime errors.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let config = match ExperimentConfig::from_cli(cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("mssim: {e}");
            return ExitCode::from(2);
        }
    };
    let report = match run_in_pool(&config) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("mssim: {e}");
            return ExitCode::from(3);
        }
    };
    let written = match (&config.command, &config.out) {
        (CommandConfig::Paths { .. }, _) | (_, None) => report.write_to(std::io::stdout().lock()),
        (_, Some(path)) => fs::File::create(path)
            .map_err(Error::from)
            .and_then(|f| report.write_to(f)),
    };
    if let Err(e) = written {
        eprintln!("mssim: {e}");
        return ExitCode::from(3);
    }
    if let CommandConfig::Verify { .. } = config.command {
        for (criterion, name) in CRITERIA.iter().take(8) {
            let ok = report
                .rows()
                .iter()
                .filter(|r| r[0] == Value::Int(*criterion as u64))
                .all(|r| r[5] == Value::Bool(true));
            eprintln!("{} {criterion} {name}", if ok { "PASS" } else { "FAIL" });
        }
    }
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Result<ExperimentConfig> {
        ExperimentConfig::parse_from(std::iter::once("mssim").chain(args.iter().copied()))
    }

    #[test]
    fn reps_below_two_is_usage_error() {
        assert!(matches!(parse(&["laplace", "--reps", "1"]), Err(Error::Usage(_))));
        assert!(parse(&["laplace", "--reps", "2"]).is_ok());
    }

    #[test]
    fn grid_zero_is_usage_error() {
        assert!(matches!(
            parse(&["paths", "--grid", "0", "--out", "/tmp/x"]),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn bad_fields_are_named() {
        let msg = |args: &[&str]| match parse(args) {
            Err(Error::Usage(m)) => m,
            other => panic!("expected usage error, got {other:?}"),
        };
        assert!(msg(&["mfpp", "--lambda", "0"]).contains("--lambda"));
        assert!(msg(&["ctrw", "--lfamily", "cubic"]).contains("--lfamily"));
        assert!(msg(&["ctrw", "--pn-rule", "const:3"]).contains("--pn-rule"));
        assert!(msg(&["laplace", "--t", "9"]).contains("--t"));
        assert!(msg(&["laplace", "--beta", "affine:0.4"]).contains("--beta"));
    }

    #[test]
    fn defaults_resolve() {
        let c = parse(&["ctrw", "--beta", "affine:0.4,0.2"]).unwrap();
        match c.command {
            CommandConfig::Ctrw { model, setup } => {
                assert!((model.idx.horizon() - 2.5).abs() < 1e-9);
                assert_eq!(setup.ns, vec![100, 1_000, 10_000]);
                assert!(matches!(model.truncation, Truncation::Stationary { .. }));
            }
            other => panic!("{other:?}"),
        }
        let c = parse(&["laplace", "--trunc-eps", "0.001"]).unwrap();
        match c.command {
            CommandConfig::Laplace { model, .. } => {
                assert_eq!(model.truncation, Truncation::Threshold { eps: 0.001 })
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn identical_configs_give_identical_reports() {
        let c = parse(&["laplace", "--reps", "50", "--trunc-m", "100", "--seed", "9"]).unwrap();
        let a = run(&c).unwrap().to_bytes().unwrap();
        let b = run(&c).unwrap().to_bytes().unwrap();
        assert_eq!(a, b);
    }
}
