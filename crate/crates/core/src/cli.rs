//! The `tiltbench` command line.
//!
//! Every subcommand resolves its settings in three layers: built-in
//! defaults, then an optional `--config FILE` (see [`crate::config`]), then
//! explicit flags. The resolved settings are written to
//! `OUT/config.resolved` before any work starts; passing that file back via
//! `--config` reproduces the run. The output directory itself is not part of
//! the resolved file, so repeated runs into different directories produce
//! byte-identical outputs.
//!
//! Exit codes: 0 on success, 1 for data and runtime errors, 2 for usage
//! errors (bad flags, bad config files, bad `TILTBENCH_THREADS`).

use std::ffi::OsString;
use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::classifier::ClassifierConfig;
use crate::config::Settings;
use crate::dataset::{load_csv_with, Validation};
use crate::error::TiltError;
use crate::estimators::{estimate_with_ci, weight_diagnostics, Estimand, MeanFunctional, Method};
use crate::features::FeatureMap;
use crate::fmt::{g17, r4};
use crate::synthetic::{self, DesignKind, MonteCarloConfig, MonteCarloResult, TiltFitter};
use crate::tilt::{ElConfig, TiltFitConfig};
use crate::transfer::{self, ShiftDesign, TransferConfig};

/// Sections a config file may contain. A command ignores the sections it
/// does not use.
pub const SECTIONS: [&str; 7] = ["run", "simulate", "estimate", "transfer", "el", "tilt", "classifier"];

pub const THREADS_ENV: &str = "TILTBENCH_THREADS";

#[derive(Debug, Parser)]
#[command(name = "tiltbench", version, about = "Exponential-tilt estimation for outcomes missing not at random")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Monte Carlo study on the Gaussian designs.
    Simulate(SimulateArgs),
    /// Estimate a mean functional on a CSV dataset with a split-sample interval.
    Estimate(EstimateArgs),
    /// Subpopulation-shift transfer benchmark.
    TransferBench(TransferArgs),
    /// Monte Carlo comparison of the two tilt fitters.
    ElCompare(ElCompareArgs),
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// Key-value config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Args)]
struct TiltArgs {
    /// Constraint relaxation.
    #[arg(long)]
    eps: Option<f64>,
    /// Convergence threshold.
    #[arg(long)]
    tol: Option<f64>,
    /// Bound on the multiplier difference.
    #[arg(long)]
    bound: Option<f64>,
    #[arg(long)]
    lr: Option<f64>,
    /// Dual step size (`auto` uses --lr).
    #[arg(long)]
    dual_lr: Option<String>,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long)]
    reg: Option<f64>,
}

#[derive(Debug, Args)]
struct ClassifierArgs {
    /// Polynomial degree of the outcome classifier.
    #[arg(long)]
    degree: Option<usize>,
    /// Ridge strength of the outcome classifier.
    #[arg(long)]
    classifier_lambda: Option<f64>,
}

#[derive(Debug, Args)]
struct DesignArgs {
    /// `well`, `miss` or `both`.
    #[arg(long)]
    kind: Option<String>,
    /// Comma-separated list of sigma1 values.
    #[arg(long)]
    sigma1: Option<String>,
    #[arg(long)]
    reps: Option<usize>,
    /// Estimation sample size per replication.
    #[arg(long)]
    n: Option<usize>,
    /// Observed-arm sample size for the outcome classifier.
    #[arg(long)]
    classifier_n: Option<usize>,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    design: DesignArgs,
    #[command(flatten)]
    tilt: TiltArgs,
    #[command(flatten)]
    classifier: ClassifierArgs,
}

#[derive(Debug, Args)]
struct EstimateArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// CSV with columns x1..xd,y,r.
    #[arg(long)]
    data: Option<PathBuf>,
    /// `y`, `1-y`, `const:C`, `xJ` or `y*xJ`.
    #[arg(long)]
    tau: Option<String>,
    /// `iw`, `ipw`, `dr` or `or`.
    #[arg(long)]
    method: Option<String>,
    /// `mu` or `mu0`.
    #[arg(long)]
    estimand: Option<String>,
    /// Fraction of rows used to fit the nuisances.
    #[arg(long)]
    split: Option<f64>,
    /// Zero outcomes recorded on rows with r = 0 instead of rejecting the file.
    #[arg(long)]
    lenient: bool,
    /// Write the solver trace to trace.csv.
    #[arg(long)]
    trace: bool,
    #[command(flatten)]
    tilt: TiltArgs,
    #[command(flatten)]
    classifier: ClassifierArgs,
}

#[derive(Debug, Args)]
struct TransferArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long)]
    repeats: Option<usize>,
    /// Covariate dimension.
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    n_source: Option<usize>,
    #[arg(long)]
    n_target: Option<usize>,
    #[arg(long)]
    label_shift: Option<f64>,
    #[arg(long)]
    spurious_shift: Option<f64>,
    /// Ridge strength of the trained models.
    #[arg(long)]
    lambda: Option<f64>,
    #[command(flatten)]
    tilt: TiltArgs,
    #[command(flatten)]
    classifier: ClassifierArgs,
}

#[derive(Debug, Args)]
struct ElCompareArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    design: DesignArgs,
    /// Gradient threshold of the empirical-likelihood fit.
    #[arg(long)]
    el_tol: Option<f64>,
    #[arg(long)]
    el_max_iter: Option<usize>,
    #[command(flatten)]
    tilt: TiltArgs,
    #[command(flatten)]
    classifier: ClassifierArgs,
}

enum CliError {
    Usage(String),
    Runtime(TiltError),
}

impl From<TiltError> for CliError {
    fn from(e: TiltError) -> Self {
        CliError::Runtime(e)
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn usage(e: impl Display) -> CliError {
    CliError::Usage(e.to_string())
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let outcome = thread_pool().and_then(|pool| match pool {
        Some(p) => p.install(|| dispatch(cli.command)),
        None => dispatch(cli.command),
    });
    match outcome {
        Ok(()) => 0,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            eprintln!("run `tiltbench --help` for usage");
            2
        }
        Err(CliError::Runtime(e)) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn thread_pool() -> CliResult<Option<rayon::ThreadPool>> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(None);
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| usage(format!("{THREADS_ENV} must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build()
        .map(Some)
        .map_err(|e| CliError::Runtime(TiltError::InvalidArgument(e.to_string())))
}

fn dispatch(cmd: Command) -> CliResult<()> {
    match cmd {
        Command::Simulate(a) => cmd_simulate(a),
        Command::Estimate(a) => cmd_estimate(a),
        Command::TransferBench(a) => cmd_transfer_bench(a),
        Command::ElCompare(a) => cmd_el_compare(a),
    }
}

// ---------------------------------------------------------------------------
// Settings plumbing

fn put<T: Display>(s: &mut Settings, section: &str, key: &str, v: &Option<T>) {
    if let Some(v) = v {
        s.set(section, key, v.to_string());
    }
}

fn get<T: std::str::FromStr>(s: &Settings, section: &str, key: &str) -> CliResult<T>
where
    T::Err: Display,
{
    s.get(section, key).map_err(usage)
}

fn tilt_defaults(s: &mut Settings, d: &TiltFitConfig) {
    s.set("tilt", "eps", d.eps.to_string());
    s.set("tilt", "tol", d.tol.to_string());
    s.set("tilt", "bound", d.bound.to_string());
    s.set("tilt", "lr", d.lr.to_string());
    s.set("tilt", "dual_lr", d.dual_lr.map_or("auto".to_string(), |v| v.to_string()));
    s.set("tilt", "max_iter", d.max_iter.to_string());
    s.set("tilt", "reg", d.reg.to_string());
}

fn tilt_flags(s: &mut Settings, a: &TiltArgs) {
    put(s, "tilt", "eps", &a.eps);
    put(s, "tilt", "tol", &a.tol);
    put(s, "tilt", "bound", &a.bound);
    put(s, "tilt", "lr", &a.lr);
    put(s, "tilt", "dual_lr", &a.dual_lr);
    put(s, "tilt", "max_iter", &a.max_iter);
    put(s, "tilt", "reg", &a.reg);
}

fn tilt_config(s: &Settings) -> CliResult<TiltFitConfig> {
    let dual_lr = match s.get_str("tilt", "dual_lr") {
        None | Some("auto") => None,
        Some(_) => Some(get(s, "tilt", "dual_lr")?),
    };
    let cfg = TiltFitConfig {
        eps: get(s, "tilt", "eps")?,
        tol: get(s, "tilt", "tol")?,
        bound: get(s, "tilt", "bound")?,
        lr: get(s, "tilt", "lr")?,
        dual_lr,
        max_iter: get(s, "tilt", "max_iter")?,
        reg: get(s, "tilt", "reg")?,
        theta_init: None,
        record_trace: false,
    };
    cfg.validate().map_err(usage)?;
    Ok(cfg)
}

fn classifier_defaults(s: &mut Settings) {
    let d = ClassifierConfig::default();
    s.set("classifier", "degree", d.degree.to_string());
    s.set("classifier", "lambda", d.ridge_lambda.to_string());
}

fn classifier_flags(s: &mut Settings, a: &ClassifierArgs) {
    put(s, "classifier", "degree", &a.degree);
    put(s, "classifier", "lambda", &a.classifier_lambda);
}

fn classifier_config(s: &Settings) -> CliResult<ClassifierConfig> {
    let cfg = ClassifierConfig {
        degree: get(s, "classifier", "degree")?,
        ridge_lambda: get(s, "classifier", "lambda")?,
    };
    if cfg.degree == 0 || !(cfg.ridge_lambda >= 0.0) {
        return Err(usage("classifier degree must be >= 1 and lambda >= 0"));
    }
    Ok(cfg)
}

fn run_defaults(s: &mut Settings, out: &str) {
    s.set("run", "seed", "0");
    s.set("run", "out", out);
}

/// Applies the config file and the shared flags, returns the output
/// directory and the seed.
fn resolve_common(s: &mut Settings, c: &CommonArgs) -> CliResult<(PathBuf, u64)> {
    if let Some(path) = &c.config {
        let file = Settings::load(path).map_err(usage)?;
        s.overlay(&file, &SECTIONS).map_err(usage)?;
    }
    put(s, "run", "seed", &c.seed);
    if let Some(out) = &c.out {
        s.set("run", "out", out.to_string_lossy());
    }
    let out = PathBuf::from(s.get_str("run", "out").unwrap_or("."));
    Ok((out, get(s, "run", "seed")?))
}

fn design_defaults(s: &mut Settings, kind: &str, reps: usize) {
    let d = MonteCarloConfig::default();
    s.set("simulate", "kind", kind);
    let grid: Vec<String> = d.sigma1_grid.iter().map(|v| v.to_string()).collect();
    s.set("simulate", "sigma1", grid.join(","));
    s.set("simulate", "reps", reps.to_string());
    s.set("simulate", "n", d.n.to_string());
    s.set("simulate", "classifier_n", d.classifier_n.to_string());
}

fn design_flags(s: &mut Settings, a: &DesignArgs) {
    put(s, "simulate", "kind", &a.kind);
    put(s, "simulate", "sigma1", &a.sigma1);
    put(s, "simulate", "reps", &a.reps);
    put(s, "simulate", "n", &a.n);
    put(s, "simulate", "classifier_n", &a.classifier_n);
}

fn parse_kinds(raw: &str) -> CliResult<Vec<DesignKind>> {
    if raw.trim().eq_ignore_ascii_case("both") {
        return Ok(vec![DesignKind::WellSpecified, DesignKind::Misspecified]);
    }
    raw.split(',').map(|k| k.trim().parse().map_err(usage)).collect()
}

fn monte_carlo_config(s: &Settings, seed: u64, fitter: TiltFitter) -> CliResult<MonteCarloConfig> {
    let kinds = parse_kinds(s.get_str("simulate", "kind").unwrap_or_default())?;
    let sigma1_grid: Vec<f64> = s.get_list("simulate", "sigma1").map_err(usage)?;
    if sigma1_grid.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(usage("sigma1 values must be positive"));
    }
    let cfg = MonteCarloConfig {
        kinds,
        sigma1_grid,
        reps: get(s, "simulate", "reps")?,
        n: get(s, "simulate", "n")?,
        classifier_n: get(s, "simulate", "classifier_n")?,
        classifier: classifier_config(s)?,
        fitter,
        seed,
        ..Default::default()
    };
    if cfg.reps == 0 || cfg.n == 0 || cfg.classifier_n < 2 {
        return Err(usage("reps and n must be >= 1 and classifier_n >= 2"));
    }
    Ok(cfg)
}

/// Writes `config.resolved` (without the output directory) and creates the
/// directory.
fn prepare_out(out: &Path, s: &Settings) -> CliResult<()> {
    let mut shown = s.clone();
    shown.remove("run", "out");
    write_file(&out.join("config.resolved"), &shown.render())
}

fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    let io = |source| {
        CliError::Runtime(TiltError::Io {
            path: path.to_path_buf(),
            source,
        })
    };
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(io)?;
    }
    fs::write(path, contents).map_err(io)
}

fn csv_string<R: Serialize>(rows: &[R], header: &[&str]) -> CliResult<String> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    let csv_err = |e: csv::Error| CliError::Runtime(TiltError::InvalidArgument(e.to_string()));
    w.write_record(header).map_err(csv_err)?;
    for r in rows {
        w.serialize(r).map_err(csv_err)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::Runtime(TiltError::InvalidArgument(e.to_string())))?;
    Ok(String::from_utf8_lossy(&bytes).into_owned())
}

// ---------------------------------------------------------------------------
// simulate

fn reps_csv(result: &MonteCarloResult) -> CliResult<String> {
    let rows: Vec<(String, String, usize, String, String)> = result
        .reps
        .iter()
        .map(|r| {
            (
                r.kind.to_string(),
                g17(r.sigma1),
                r.rep,
                r.converged.map_or(String::new(), |c| (c as u8).to_string()),
                r.error.clone().unwrap_or_default(),
            )
        })
        .collect();
    csv_string(&rows, &["kind", "sigma1", "rep", "converged", "error"])
}

fn report_failures(result: &MonteCarloResult, label: &str) {
    let failed = result.failures().count();
    if failed > 0 {
        eprintln!("warning: {label}: {failed} of {} replications failed (see reps.csv)", result.reps.len());
    }
}

fn cmd_simulate(a: SimulateArgs) -> CliResult<()> {
    let mut s = Settings::new();
    run_defaults(&mut s, "simulate-out");
    design_defaults(&mut s, "both", MonteCarloConfig::default().reps);
    tilt_defaults(&mut s, &TiltFitConfig::default());
    classifier_defaults(&mut s);
    let (out, seed) = resolve_common(&mut s, &a.common)?;
    design_flags(&mut s, &a.design);
    tilt_flags(&mut s, &a.tilt);
    classifier_flags(&mut s, &a.classifier);
    let cfg = monte_carlo_config(&s, seed, TiltFitter::ExpGrad(tilt_config(&s)?))?;
    prepare_out(&out, &s)?;

    let result = synthetic::run_monte_carlo(&cfg)?;
    let cells = synthetic::summarize(&result);
    write_file(&out.join("estimates.csv"), &synthetic::rows_csv(&result))?;
    write_file(&out.join("summary.csv"), &synthetic::summary_csv(&cells))?;
    write_file(&out.join("reps.csv"), &reps_csv(&result)?)?;
    print!("{}", synthetic::summary_table(&cells));
    report_failures(&result, "simulate");
    Ok(())
}

// ---------------------------------------------------------------------------
// estimate

/// Parses a mean-functional description for data of dimension `dim`:
/// `y`, `1-y`, `const:C`, `xJ` (1-based covariate) or `y*xJ`.
pub fn parse_tau(spec: &str, dim: usize) -> crate::Result<MeanFunctional> {
    let spec = spec.trim();
    let bad = || TiltError::InvalidArgument(format!("unknown tau {spec:?} (use y, 1-y, const:C, xJ or y*xJ)"));
    let column = |name: &str| -> crate::Result<usize> {
        let j: usize = name.strip_prefix('x').and_then(|j| j.parse().ok()).ok_or_else(bad)?;
        if j == 0 || j > dim {
            return Err(TiltError::InvalidArgument(format!("tau column {name} out of range 1..={dim}")));
        }
        Ok(j - 1)
    };
    match spec {
        "y" => Ok(MeanFunctional::outcome()),
        "1-y" => Ok(MeanFunctional::new("1-y", |_| 1.0, |_| 0.0)),
        _ => {
            if let Some(c) = spec.strip_prefix("const:") {
                let c: f64 = c.trim().parse().map_err(|_| bad())?;
                return Ok(MeanFunctional::constant(c));
            }
            if let Some(col) = spec.strip_prefix("y*") {
                let j = column(col)?;
                return Ok(MeanFunctional::new(spec, |_| 0.0, move |x| x[j]));
            }
            let j = column(spec)?;
            Ok(MeanFunctional::new(spec, move |x| x[j], move |x| x[j]))
        }
    }
}

fn cmd_estimate(a: EstimateArgs) -> CliResult<()> {
    let mut s = Settings::new();
    run_defaults(&mut s, "estimate-out");
    s.set("estimate", "data", "");
    s.set("estimate", "tau", "y");
    s.set("estimate", "method", "dr");
    s.set("estimate", "estimand", "mu0");
    s.set("estimate", "split", "0.5");
    s.set("estimate", "lenient", "false");
    s.set("estimate", "trace", "false");
    tilt_defaults(&mut s, &TiltFitConfig::default());
    classifier_defaults(&mut s);
    let (out, seed) = resolve_common(&mut s, &a.common)?;
    if let Some(d) = &a.data {
        s.set("estimate", "data", d.to_string_lossy());
    }
    put(&mut s, "estimate", "tau", &a.tau);
    put(&mut s, "estimate", "method", &a.method);
    put(&mut s, "estimate", "estimand", &a.estimand);
    put(&mut s, "estimate", "split", &a.split);
    if a.lenient {
        s.set("estimate", "lenient", "true");
    }
    if a.trace {
        s.set("estimate", "trace", "true");
    }
    tilt_flags(&mut s, &a.tilt);
    classifier_flags(&mut s, &a.classifier);

    let data = s.get_str("estimate", "data").unwrap_or_default().to_string();
    if data.is_empty() {
        return Err(usage("--data is required"));
    }
    let method: Method = get(&s, "estimate", "method")?;
    let estimand: Estimand = get(&s, "estimate", "estimand")?;
    let split: f64 = get(&s, "estimate", "split")?;
    if !(split > 0.0 && split < 1.0) {
        return Err(usage("split must lie in (0, 1)"));
    }
    let lenient: bool = get(&s, "estimate", "lenient")?;
    let trace: bool = get(&s, "estimate", "trace")?;
    let mut tilt = tilt_config(&s)?;
    tilt.record_trace = trace;
    let classifier = classifier_config(&s)?;
    let tau_spec: String = get(&s, "estimate", "tau")?;
    prepare_out(&out, &s)?;

    let validation = if lenient { Validation::Lenient } else { Validation::Strict };
    let (ds, warnings) = load_csv_with(&data, validation)?;
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    let tau = parse_tau(&tau_spec, ds.dim())?;
    let fm = FeatureMap::identity(ds.dim())?;
    let fit = estimate_with_ci(&ds, &fm, &tau, estimand, method, split, seed, &classifier, &tilt)?;
    if !fit.tilt.converged {
        eprintln!(
            "warning: tilt fit did not converge in {} iterations; the last iterate is used",
            fit.tilt.iterations
        );
    }
    let weights = weight_diagnostics(&ds, &fit.tilt.theta, &fm)?;
    let r = &fit.report;
    let json = serde_json::json!({
        "estimand": r.estimand,
        "method": r.method,
        "tau": tau.name,
        "point": r.point,
        "std_error": r.std_error,
        "ci95": r.ci95.map(|(lo, hi)| [lo, hi]),
        "n_used": r.n_used,
        "n_fit": fit.n_fit,
        "n": ds.len(),
        "seed": seed,
        "split": split,
        "tilt": fit.tilt,
        "weights": weights,
        "warnings": warnings,
    });
    let text = serde_json::to_string_pretty(&json).map_err(TiltError::from)? + "\n";
    write_file(&out.join("estimate.json"), &text)?;
    let (lo, hi) = r.ci95.unwrap_or((f64::NAN, f64::NAN));
    write_file(
        &out.join("estimates.csv"),
        &format!(
            "estimand,method,seed,point,std_error,ci_lo,ci_hi\n{},{},{},{},{},{},{}\n",
            r.estimand,
            r.method,
            seed,
            g17(r.point),
            g17(r.std_error.unwrap_or(f64::NAN)),
            g17(lo),
            g17(hi)
        ),
    )?;
    if trace {
        write_file(&out.join("trace.csv"), &fit.tilt.trace_csv())?;
    }
    print!("{text}");
    Ok(())
}

// ---------------------------------------------------------------------------
// transfer-bench

fn cmd_transfer_bench(a: TransferArgs) -> CliResult<()> {
    let d = TransferConfig::default();
    let mut s = Settings::new();
    run_defaults(&mut s, "transfer-out");
    s.set("transfer", "repeats", d.repeats.to_string());
    s.set("transfer", "d", d.design.d.to_string());
    s.set("transfer", "n_source", d.design.n_source.to_string());
    s.set("transfer", "n_target", d.design.n_target.to_string());
    s.set("transfer", "label_shift", d.design.label_shift.to_string());
    s.set("transfer", "spurious_shift", d.design.spurious_shift.to_string());
    s.set("transfer", "source_p_y1", d.design.source_p_y1.to_string());
    s.set("transfer", "source_p_aligned", d.design.source_p_aligned.to_string());
    s.set("transfer", "target_train_fraction", d.design.target_train_fraction.to_string());
    s.set("transfer", "lambda", d.lambda.to_string());
    tilt_defaults(&mut s, &d.tilt);
    classifier_defaults(&mut s);
    let (out, seed) = resolve_common(&mut s, &a.common)?;
    put(&mut s, "transfer", "repeats", &a.repeats);
    put(&mut s, "transfer", "d", &a.d);
    put(&mut s, "transfer", "n_source", &a.n_source);
    put(&mut s, "transfer", "n_target", &a.n_target);
    put(&mut s, "transfer", "label_shift", &a.label_shift);
    put(&mut s, "transfer", "spurious_shift", &a.spurious_shift);
    put(&mut s, "transfer", "lambda", &a.lambda);
    tilt_flags(&mut s, &a.tilt);
    classifier_flags(&mut s, &a.classifier);

    let cfg = TransferConfig {
        design: ShiftDesign {
            d: get(&s, "transfer", "d")?,
            label_shift: get(&s, "transfer", "label_shift")?,
            spurious_shift: get(&s, "transfer", "spurious_shift")?,
            source_p_y1: get(&s, "transfer", "source_p_y1")?,
            source_p_aligned: get(&s, "transfer", "source_p_aligned")?,
            n_source: get(&s, "transfer", "n_source")?,
            n_target: get(&s, "transfer", "n_target")?,
            target_train_fraction: get(&s, "transfer", "target_train_fraction")?,
            seed,
        },
        tilt: tilt_config(&s)?,
        classifier: classifier_config(&s)?,
        lambda: get(&s, "transfer", "lambda")?,
        repeats: get(&s, "transfer", "repeats")?,
    };
    cfg.design.validate().map_err(usage)?;
    if cfg.repeats == 0 || !(cfg.lambda >= 0.0) {
        return Err(usage("repeats must be >= 1 and lambda >= 0"));
    }
    prepare_out(&out, &s)?;

    let result = transfer::run_benchmark(&cfg)?;
    write_file(&out.join("accuracy.csv"), &result.accuracy_csv())?;
    write_file(&out.join("mcv.csv"), &result.mcv_csv())?;
    write_file(&out.join("summary.json"), &(result.summary_json()? + "\n"))?;
    println!("{:<14} {:>8} {:>8} {:>3}", "model", "mean", "sd", "n");
    for (name, m) in result.trainer_summary().iter().chain(result.mcv_summary().iter()) {
        println!("{:<14} {:>8} {:>8} {:>3}", name, r4(m.mean), r4(m.sd), m.n);
    }
    for f in &result.failures {
        eprintln!("warning: repeat {} {}: {}", f.repeat, f.stage, f.error);
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// el-compare

/// One cell of the fitter comparison.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitterComparison {
    pub kind: DesignKind,
    pub sigma1: f64,
    pub estimand: Estimand,
    pub method: Method,
    pub bias_expgrad: f64,
    pub rmse_expgrad: f64,
    pub bias_el: f64,
    pub rmse_el: f64,
    /// Both fitters produced a finite estimate in every replication.
    pub finite: bool,
}

/// Cell-by-cell comparison of two Monte Carlo runs on the same grid.
pub fn compare_fitters(expgrad: &MonteCarloResult, el: &MonteCarloResult, reps: usize) -> Vec<FitterComparison> {
    let b = synthetic::summarize(el);
    synthetic::summarize(expgrad)
        .into_iter()
        .map(|c| {
            let other = b
                .iter()
                .find(|o| o.kind == c.kind && o.sigma1 == c.sigma1 && o.estimand == c.estimand && o.method == c.method);
            let all_finite = |r: &MonteCarloResult| {
                let pts = r.points(c.kind, c.sigma1, c.estimand, c.method);
                pts.len() == reps && pts.iter().all(|p| p.is_finite())
            };
            FitterComparison {
                kind: c.kind,
                sigma1: c.sigma1,
                estimand: c.estimand,
                method: c.method,
                bias_expgrad: c.bias,
                rmse_expgrad: c.rmse,
                bias_el: other.map_or(f64::NAN, |o| o.bias),
                rmse_el: other.map_or(f64::NAN, |o| o.rmse),
                finite: all_finite(expgrad) && all_finite(el),
            }
        })
        .collect()
}

fn cmd_el_compare(a: ElCompareArgs) -> CliResult<()> {
    let el_default = ElConfig::default();
    let mut s = Settings::new();
    run_defaults(&mut s, "el-compare-out");
    design_defaults(&mut s, "well", MonteCarloConfig::default().reps);
    s.set("el", "tol", el_default.tol.to_string());
    s.set("el", "max_iter", el_default.max_iter.to_string());
    tilt_defaults(&mut s, &TiltFitConfig::default());
    classifier_defaults(&mut s);
    let (out, seed) = resolve_common(&mut s, &a.common)?;
    design_flags(&mut s, &a.design);
    put(&mut s, "el", "tol", &a.el_tol);
    put(&mut s, "el", "max_iter", &a.el_max_iter);
    tilt_flags(&mut s, &a.tilt);
    classifier_flags(&mut s, &a.classifier);

    let el = ElConfig {
        tol: get(&s, "el", "tol")?,
        max_iter: get(&s, "el", "max_iter")?,
        theta_init: None,
    };
    if !(el.tol > 0.0) || el.max_iter == 0 {
        return Err(usage("el tol must be > 0 and max_iter >= 1"));
    }
    let cfg_a = monte_carlo_config(&s, seed, TiltFitter::ExpGrad(tilt_config(&s)?))?;
    let cfg_b = MonteCarloConfig {
        fitter: TiltFitter::EmpiricalLikelihood(el),
        ..cfg_a.clone()
    };
    prepare_out(&out, &s)?;

    let ra = synthetic::run_monte_carlo(&cfg_a)?;
    let rb = synthetic::run_monte_carlo(&cfg_b)?;
    let mut long = String::from("fitter,kind,sigma1,rep,estimand,method,point\n");
    for (name, r) in [("expgrad", &ra), ("el", &rb)] {
        for line in synthetic::rows_csv(r).lines().skip(1) {
            long.push_str(&format!("{name},{line}\n"));
        }
    }
    write_file(&out.join("estimates.csv"), &long)?;
    let cmp = compare_fitters(&ra, &rb, cfg_a.reps);
    let mut csv = String::from("kind,sigma1,estimand,method,bias_expgrad,rmse_expgrad,bias_el,rmse_el,finite\n");
    for c in &cmp {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            c.kind,
            g17(c.sigma1),
            c.estimand,
            c.method,
            g17(c.bias_expgrad),
            g17(c.rmse_expgrad),
            g17(c.bias_el),
            g17(c.rmse_el),
            c.finite as u8
        ));
    }
    write_file(&out.join("el_compare.csv"), &csv)?;
    println!(
        "{:<5} {:>7} {:<4} {:<3} {:>9} {:>9} {:>9} {:>9} {:>6}",
        "kind", "sigma1", "est", "mth", "bias_eg", "rmse_eg", "bias_el", "rmse_el", "finite"
    );
    for c in &cmp {
        println!(
            "{:<5} {:>7} {:<4} {:<3} {:>9} {:>9} {:>9} {:>9} {:>6}",
            c.kind.to_string(),
            r4(c.sigma1),
            c.estimand.to_string(),
            c.method.to_string(),
            r4(c.bias_expgrad),
            r4(c.rmse_expgrad),
            r4(c.bias_el),
            r4(c.rmse_el),
            if c.finite { "yes" } else { "no" }
        );
    }
    report_failures(&ra, "expgrad");
    report_failures(&rb, "el");
    Ok(())
}
