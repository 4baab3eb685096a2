//! The `dcc` command line.
//!
//! Exit codes: 0 on success, 1 for usage errors (bad arguments, unknown
//! models or datasets, unreadable files), 2 for numerical failures.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use dcc_core::baselines::{ljung_box, Calibrator, TestKind};
use dcc_core::engine::calibrate_threshold;
use dcc_core::inference::{build_sampler, MaximumLikelihood};
use dcc_core::models::{BuiltinModel, KangarooSsm};
use dcc_core::{dcc, Dataset, DccConfig, Error, McmcSettings, Result, WeightMode};
use serde_json::json;

use crate::datasets::{embedded_dataset, DATASET_NAMES};
use crate::experiments::{run_experiment, Experiment, ExperimentSpec};
use crate::report::{BaselineRow, Report, ResultRow, SummaryRow};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERIC: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "dcc",
    version,
    about = "Monte Carlo consistency checks for statistical model classes"
)]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Runs the criterion for one model class on one dataset.
    Run(RunArgs),
    /// Runs one of the built-in experiments.
    Experiment(ExperimentArgs),
    /// Calibrates a rejection threshold by simulation.
    Calibrate(CalibrateArgs),
    /// Applies a classical goodness-of-fit test.
    Baseline(BaselineArgs),
}

#[derive(Debug, Args)]
struct DccArgs {
    /// Parameter draws N.
    #[arg(long)]
    n_theta: Option<usize>,
    /// Test replicates M per draw.
    #[arg(long)]
    m_test: Option<usize>,
    /// Moment-calibration replicates M′ per draw.
    #[arg(long)]
    m_cal: Option<usize>,
    /// point-mle, mh or pmmh.
    #[arg(long, value_parser = parse_weights)]
    weights: Option<WeightMode>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    mh_burnin: Option<usize>,
    #[arg(long)]
    mh_thin: Option<usize>,
    /// Multiplier on the automatic proposal scales.
    #[arg(long)]
    mh_scale: Option<f64>,
    #[arg(long)]
    pf_particles: Option<usize>,
}

impl DccArgs {
    fn mcmc(&self) -> McmcSettings {
        let d = McmcSettings::default();
        McmcSettings {
            burn_in: self.mh_burnin.unwrap_or(d.burn_in),
            thin: self.mh_thin.or(d.thin),
            scale: self.mh_scale.unwrap_or(d.scale),
            ..d
        }
    }

    fn config(&self, default_weights: WeightMode) -> DccConfig {
        let d = DccConfig::default();
        DccConfig {
            n_theta: self.n_theta.unwrap_or(d.n_theta),
            m_test: self.m_test.unwrap_or(d.m_test),
            m_cal: self.m_cal.unwrap_or(d.m_cal),
            seed: self.seed,
            weight_mode: self.weights.unwrap_or(default_weights),
            mcmc: self.mcmc(),
            particles: self.pf_particles.unwrap_or(d.particles),
            ..d
        }
    }
}

#[derive(Debug, Args)]
struct RunArgs {
    /// gaussian-fixed, gaussian, poisson, negbin, polyreg:k=<order>, ar1,
    /// kangaroo-ssm[:K=<particles>].
    #[arg(long)]
    model: String,
    /// CSV file or the name of a bundled dataset.
    #[arg(long)]
    data: String,
    #[command(flatten)]
    dcc: DccArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ExperimentArgs {
    /// earthquake, gaussian, rejection, regression, ar or kangaroo.
    name: String,
    #[command(flatten)]
    dcc: DccArgs,
    #[arg(long)]
    replications: Option<usize>,
    /// Comma-separated sample sizes (gaussian and ar experiments).
    #[arg(long, value_delimiter = ',')]
    sizes: Option<Vec<usize>>,
    /// Simulated datasets per calibrated criterion threshold.
    #[arg(long)]
    calibration_reps: Option<usize>,
    /// Null replications per classical-test threshold.
    #[arg(long)]
    baseline_reps: Option<usize>,
    /// Skip the per-size threshold calibration in the ar experiment.
    #[arg(long)]
    no_calibrate: bool,
    /// Pool simulated log-likelihoods across indices for iid classes
    /// (default: on for the gaussian and rejection experiments).
    #[arg(long)]
    pool_iid_moments: Option<bool>,
    /// Also writes each histogram as `<label>.csv` into this directory.
    #[arg(long)]
    histograms_csv: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CalibrateArgs {
    /// Calibrates a classical test instead of the criterion.
    #[arg(long)]
    test: Option<String>,
    /// Model class for criterion calibration.
    #[arg(long)]
    model: Option<String>,
    /// Template dataset; its maximum-likelihood fit is the null generator.
    #[arg(long)]
    data: Option<String>,
    /// Sample size for classical-test calibration.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 0.05)]
    level: f64,
    /// Simulated datasets.
    #[arg(long)]
    reps: Option<usize>,
    #[command(flatten)]
    dcc: DccArgs,
    /// CSV cache of classical-test thresholds.
    #[arg(long)]
    cache: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BaselineArgs {
    /// ks, lilliefors, ad, jb or ljungbox.
    #[arg(long)]
    test: String,
    #[arg(long, default_value_t = 0.05)]
    level: f64,
    #[arg(long)]
    data: String,
    /// Ljung–Box lag count (default round(ln n)).
    #[arg(long)]
    lags: Option<usize>,
    /// Ljung–Box parameter count subtracted from the degrees of freedom.
    #[arg(long, default_value_t = 2)]
    d_param: usize,
    /// Null replications for simulated thresholds.
    #[arg(long, default_value_t = Calibrator::DEFAULT_REPS)]
    reps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// CSV cache of classical-test thresholds.
    #[arg(long)]
    cache: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_weights(s: &str) -> std::result::Result<WeightMode, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Whether an error stems from the invocation rather than the numerics.
pub fn is_usage_error(e: &Error) -> bool {
    matches!(
        e,
        Error::InvalidConfig(_)
            | Error::UnknownModel(_)
            | Error::UnknownDataset(_)
            | Error::Io(_)
            | Error::Csv(_)
            | Error::MissingTimestamps
            | Error::DimensionMismatch { .. }
            | Error::NegativeCount(_)
            | Error::NonIntegerCount(_)
    )
}

/// Loads a CSV file, or a bundled dataset when `spec` names one and no such
/// file exists.
pub fn load_dataset(spec: &str) -> Result<Dataset> {
    if Path::new(spec).exists() || !DATASET_NAMES.contains(&spec) {
        Dataset::load(spec)
    } else {
        embedded_dataset(spec)
    }
}

/// Runs the command line with explicit arguments and output streams;
/// returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                stdout.write_all(text.as_bytes())
            } else {
                stderr.write_all(text.as_bytes())
            };
            return code;
        }
    };
    if let Some(t) = cli.threads {
        // Fails only if a pool was already installed, e.g. by an earlier call
        // in the same process; the existing pool is then used.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t.max(1)).build_global();
    }
    let start = Instant::now();
    let outcome = match cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Experiment(a) => cmd_experiment(a),
        Command::Calibrate(a) => cmd_calibrate(a),
        Command::Baseline(a) => cmd_baseline(a),
    };
    match outcome.and_then(|(report, out)| emit(&report, out.as_deref(), stdout)) {
        Ok(()) => {
            let _ = writeln!(stderr, "elapsed: {:.2}s", start.elapsed().as_secs_f64());
            EXIT_OK
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            if is_usage_error(&e) {
                EXIT_USAGE
            } else {
                EXIT_NUMERIC
            }
        }
    }
}

fn emit(report: &Report, out: Option<&Path>, stdout: &mut dyn Write) -> Result<()> {
    let text = report.to_json() + "\n";
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

type Outcome = Result<(Report, Option<PathBuf>)>;

fn cmd_run(a: RunArgs) -> Outcome {
    let data = load_dataset(&a.data)?;
    let model = BuiltinModel::parse(&a.model, &data)?;
    let default_weights = match model {
        BuiltinModel::Kangaroo(_) => WeightMode::Pmmh,
        _ => WeightMode::Mh,
    };
    let mut cfg = a.dcc.config(default_weights);
    // --pf-particles overrides the count in the model specification.
    let model = match model {
        BuiltinModel::Kangaroo(k) => {
            let (mean, var) = k.prior();
            let k = KangarooSsm::new(a.dcc.pf_particles.unwrap_or(k.particles()))?.with_prior(mean, var)?;
            cfg.particles = k.particles();
            BuiltinModel::Kangaroo(k)
        }
        m => m,
    };
    let sampler = build_sampler(&model, &data, &cfg)?;
    let res = dcc(&model, sampler.as_ref(), &data, &cfg)?;
    let mut report = Report::new(json!({ "command": "run", "model": a.model, "data": a.data, "dcc": cfg }));
    report.results.push(ResultRow::full(&res, &a.data));
    Ok((report, a.out))
}

fn cmd_experiment(a: ExperimentArgs) -> Outcome {
    let experiment: Experiment = a.name.parse()?;
    let mut spec = ExperimentSpec::new(experiment, a.dcc.seed);
    spec.n_theta = a.dcc.n_theta;
    spec.m_test = a.dcc.m_test;
    spec.m_cal = a.dcc.m_cal;
    spec.weights = a.dcc.weights;
    spec.replications = a.replications;
    spec.sizes = a.sizes;
    spec.particles = a.dcc.pf_particles;
    spec.mcmc = a.dcc.mcmc();
    spec.calibration_reps = a.calibration_reps;
    spec.baseline_reps = a.baseline_reps;
    spec.calibrate = !a.no_calibrate;
    spec.pool_iid_moments = a.pool_iid_moments;
    let report = run_experiment(&spec)?;
    if let Some(dir) = &a.histograms_csv {
        write_histograms(&report, dir)?;
    }
    Ok((report, a.out))
}

fn write_histograms(report: &Report, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    for h in &report.histograms {
        let name: String = h
            .label
            .chars()
            .map(|c| {
                if c.is_ascii_alphanumeric() || c == '.' || c == '-' {
                    c
                } else {
                    '_'
                }
            })
            .collect();
        std::fs::write(dir.join(format!("{name}.csv")), h.to_csv())?;
    }
    Ok(())
}

fn cmd_calibrate(a: CalibrateArgs) -> Outcome {
    match (&a.test, &a.model) {
        (Some(test), None) => {
            let kind: TestKind = test.parse()?;
            let n =
                a.n.ok_or_else(|| Error::InvalidConfig("--n is required with --test".into()))?;
            let mut cal = Calibrator::new(a.reps.unwrap_or(Calibrator::DEFAULT_REPS), a.dcc.seed);
            if let Some(p) = &a.cache {
                cal = cal.with_cache_file(p)?;
            }
            let threshold = cal.threshold(kind, n, a.level)?;
            let mut report = Report::new(json!({
                "command": "calibrate", "test": test, "n": n, "level": a.level,
                "reps": cal.reps, "seed": cal.seed,
            }));
            report
                .summary
                .push(SummaryRow::new("calibration", test.as_str()).with("threshold", threshold));
            Ok((report, a.out))
        }
        (None, Some(model_spec)) => {
            let data_spec = a
                .data
                .as_deref()
                .ok_or_else(|| Error::InvalidConfig("--data is required with --model".into()))?;
            let data = load_dataset(data_spec)?;
            let model = BuiltinModel::parse(model_spec, &data)?;
            let cfg = a.dcc.config(WeightMode::PointMle);
            let generator = model.mle(&data)?;
            let reps = a.reps.unwrap_or(crate::experiments::DEFAULT_CALIBRATION_REPS);
            let cal = calibrate_threshold(
                &model,
                &generator,
                &data,
                |d| build_sampler(&model, d, &cfg),
                a.level,
                reps,
                &cfg,
            )?;
            let mut report = Report::new(json!({
                "command": "calibrate", "model": model_spec, "data": data_spec,
                "level": a.level, "reps": reps, "generator": generator.values(), "dcc": cfg,
            }));
            report
                .summary
                .push(SummaryRow::new("calibration", model_spec.as_str()).with("threshold", cal.threshold));
            Ok((report, a.out))
        }
        _ => Err(Error::InvalidConfig("give exactly one of --test or --model".into())),
    }
}

fn cmd_baseline(a: BaselineArgs) -> Outcome {
    let kind: TestKind = a.test.parse()?;
    let data = load_dataset(&a.data)?;
    data.require_dim(1)?;
    let test = match kind {
        TestKind::LjungBox => ljung_box(data.values(), a.lags, a.d_param, a.level)?,
        _ => {
            let mut cal = Calibrator::new(a.reps, a.seed);
            if let Some(p) = &a.cache {
                cal = cal.with_cache_file(p)?;
            }
            cal.test(kind, &data, a.level)?
        }
    };
    let mut report = Report::new(json!({
        "command": "baseline", "test": a.test, "data": a.data, "level": a.level,
        "lags": a.lags, "d_param": a.d_param, "reps": a.reps, "seed": a.seed,
    }));
    report.baselines.push(BaselineRow::from_report(&test, &a.data));
    Ok((report, a.out))
}
