//! Built-in experiments: earthquake counts, Gaussian uniformity and
//! rejection rates, polynomial regression, saturated AR(1) and the kangaroo
//! state-space model.
//!
//! Each experiment returns a [`Report`]. Replications run in parallel with
//! seeds derived from the master seed and the replicate index, and results
//! are assembled in index order, so reports do not depend on scheduling.

use std::str::FromStr;

use dcc_core::baselines::{default_lags, kolmogorov_pvalue, ks_uniform_statistic, ljung_box, Calibrator, TestKind};
use dcc_core::engine::{calibrate_threshold, rejects, threshold_exact};
use dcc_core::inference::{build_sampler, mle_ar1, MaximumLikelihood};
use dcc_core::models::{
    default_covariates, BuiltinModel, GaussianIid, KangarooSsm, LinearAr1, NegBinomialModel, PoissonModel,
    PolyRegression, SaturatedAr1Generator,
};
use dcc_core::{
    dcc, Dataset, DccConfig, DccResult, Error, McmcSettings, ModelClass, ParamVector, Result, Streams, WeightMode,
};
use rand_distr::{Distribution, Normal, Uniform};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::datasets::embedded_dataset;
use crate::histogram::histogram;
use crate::report::{BaselineRow, Report, ResultRow, SummaryRow};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Earthquake,
    Gaussian,
    Rejection,
    Regression,
    Ar,
    Kangaroo,
}

impl Experiment {
    pub const ALL: [Experiment; 6] = [
        Experiment::Earthquake,
        Experiment::Gaussian,
        Experiment::Rejection,
        Experiment::Regression,
        Experiment::Ar,
        Experiment::Kangaroo,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Earthquake => "earthquake",
            Experiment::Gaussian => "gaussian",
            Experiment::Rejection => "rejection",
            Experiment::Regression => "regression",
            Experiment::Ar => "ar",
            Experiment::Kangaroo => "kangaroo",
        }
    }

    /// `(N, M, M′)` used by the original study.
    pub fn default_counts(&self) -> (usize, usize, usize) {
        match self {
            Experiment::Earthquake | Experiment::Ar => (200, 200, 200),
            Experiment::Gaussian | Experiment::Rejection => (50, 100, 100),
            Experiment::Regression => (100, 100, 100),
            Experiment::Kangaroo => (1000, 200, 200),
        }
    }

    pub fn default_weights(&self) -> WeightMode {
        match self {
            Experiment::Earthquake => WeightMode::Mh,
            Experiment::Kangaroo => WeightMode::Pmmh,
            _ => WeightMode::PointMle,
        }
    }

    pub fn default_replications(&self) -> usize {
        match self {
            Experiment::Gaussian | Experiment::Rejection | Experiment::Ar => 1000,
            Experiment::Regression => 100,
            Experiment::Earthquake | Experiment::Kangaroo => 1,
        }
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown experiment `{s}`")))
    }
}

/// Overrides on top of an experiment's defaults. `None` keeps the default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub experiment: Experiment,
    pub seed: u64,
    pub n_theta: Option<usize>,
    pub m_test: Option<usize>,
    pub m_cal: Option<usize>,
    pub weights: Option<WeightMode>,
    pub replications: Option<usize>,
    /// Sample sizes for the Gaussian and AR experiments.
    pub sizes: Option<Vec<usize>>,
    pub particles: Option<usize>,
    pub mcmc: McmcSettings,
    /// Simulated datasets behind each calibrated criterion threshold.
    pub calibration_reps: Option<usize>,
    /// Null replications behind each classical-test threshold.
    pub baseline_reps: Option<usize>,
    /// Whether the AR experiment calibrates a criterion threshold per size.
    pub calibrate: bool,
    /// Pool the simulated log-likelihoods of iid classes across indices.
    /// `None` pools in the Gaussian experiments only.
    pub pool_iid_moments: Option<bool>,
}

impl ExperimentSpec {
    pub fn new(experiment: Experiment, seed: u64) -> Self {
        Self {
            experiment,
            seed,
            n_theta: None,
            m_test: None,
            m_cal: None,
            weights: None,
            replications: None,
            sizes: None,
            particles: None,
            mcmc: McmcSettings::default(),
            calibration_reps: None,
            baseline_reps: None,
            calibrate: true,
            pool_iid_moments: None,
        }
    }

    pub fn dcc_config(&self, seed: u64) -> DccConfig {
        let (n, m, mc) = self.experiment.default_counts();
        DccConfig {
            n_theta: self.n_theta.unwrap_or(n),
            m_test: self.m_test.unwrap_or(m),
            m_cal: self.m_cal.unwrap_or(mc),
            seed,
            weight_mode: self.weights.unwrap_or(self.experiment.default_weights()),
            mcmc: self.mcmc.clone(),
            particles: self.particles.unwrap_or(KangarooSsm::DEFAULT_PARTICLES),
            pool_iid_moments: self
                .pool_iid_moments
                .unwrap_or(matches!(self.experiment, Experiment::Gaussian | Experiment::Rejection)),
            ..DccConfig::default()
        }
    }

    pub fn replications(&self) -> usize {
        self.replications.unwrap_or(self.experiment.default_replications())
    }

    fn sizes(&self, default: &[usize]) -> Vec<usize> {
        self.sizes.clone().unwrap_or_else(|| default.to_vec())
    }

    fn calibration_reps(&self) -> usize {
        self.calibration_reps.unwrap_or(DEFAULT_CALIBRATION_REPS)
    }

    fn calibrator(&self) -> Calibrator {
        Calibrator::new(
            self.baseline_reps.unwrap_or(Calibrator::DEFAULT_REPS),
            self.seed ^ BASELINE_SEED_SALT,
        )
    }

    fn report(&self) -> Report {
        let mut config = serde_json::to_value(self).expect("spec serializes");
        let resolved = self.dcc_config(self.seed);
        config["resolved"] = serde_json::json!({
            "n_theta": resolved.n_theta,
            "m_test": resolved.m_test,
            "m_cal": resolved.m_cal,
            "weights": resolved.weight_mode,
            "replications": self.replications(),
            "pool_iid_moments": resolved.pool_iid_moments,
        });
        Report::new(config)
    }
}

/// Simulated datasets per calibrated criterion threshold.
pub const DEFAULT_CALIBRATION_REPS: usize = 2000;

const BASELINE_SEED_SALT: u64 = 0x5eed_ba5e;

pub fn run_experiment(spec: &ExperimentSpec) -> Result<Report> {
    if spec.replications() < 1 {
        return Err(Error::InvalidConfig("at least one replication is required".into()));
    }
    match spec.experiment {
        Experiment::Earthquake => earthquake(spec),
        Experiment::Gaussian => gaussian(spec),
        Experiment::Rejection => rejection(spec),
        Experiment::Regression => regression(spec),
        Experiment::Ar => ar(spec),
        Experiment::Kangaroo => kangaroo(spec),
    }
}

fn run_dcc(model: &BuiltinModel, data: &Dataset, config: &DccConfig) -> Result<DccResult> {
    let sampler = build_sampler(model, data, config)?;
    dcc(model, sampler.as_ref(), data, config)
}

fn fraction(flags: impl IntoIterator<Item = bool>) -> f64 {
    let (hit, total) = flags
        .into_iter()
        .fold((0usize, 0usize), |(h, t), f| (h + f as usize, t + 1));
    if total == 0 {
        f64::NAN
    } else {
        hit as f64 / total as f64
    }
}

// ---------------------------------------------------------------- earthquake

pub const EARTHQUAKE_DATASETS: [&str; 4] = ["earthquake-m8", "earthquake-m7", "earthquake-m6", "earthquake-m5"];

fn earthquake(spec: &ExperimentSpec) -> Result<Report> {
    let mut report = spec.report();
    let models = [
        ("poisson", BuiltinModel::Poisson(PoissonModel)),
        ("negbin", BuiltinModel::NegBinomial(NegBinomialModel)),
    ];
    for (label, model) in &models {
        let mut row = SummaryRow::new("earthquake", *label);
        for name in EARTHQUAKE_DATASETS {
            let data = embedded_dataset(name)?;
            let res = run_dcc(model, &data, &spec.dcc_config(spec.seed))?;
            row = row.with(name, res.pfa_star);
            report.results.push(ResultRow::full(&res, name));
        }
        report.summary.push(row);
    }
    Ok(report)
}

// ------------------------------------------------------------------ gaussian

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    StdNormal,
    StdUniform,
}

impl Source {
    pub fn name(&self) -> &'static str {
        match self {
            Source::StdNormal => "normal",
            Source::StdUniform => "uniform",
        }
    }

    pub fn sample(&self, n: usize, streams: Streams) -> Dataset {
        let mut rng = streams.rng();
        let y = match self {
            Source::StdNormal => {
                let d = Normal::new(0.0, 1.0).expect("valid normal");
                (0..n).map(|_| d.sample(&mut rng)).collect()
            }
            Source::StdUniform => {
                let d = Uniform::new(0.0, 1.0).expect("valid uniform");
                (0..n).map(|_| d.sample(&mut rng)).collect()
            }
        };
        Dataset::univariate(y).expect("finite samples")
    }
}

const GAUSSIAN_CLASSES: [(GaussianIid, &str); 2] = [(GaussianIid::Fixed, "fixed"), (GaussianIid::Free, "free")];
const SOURCES: [Source; 2] = [Source::StdNormal, Source::StdUniform];

/// Criterion values for `reps` datasets of size `n` drawn from `source`.
/// Both classes see the same datasets for a given `streams`.
fn gaussian_replicates(
    spec: &ExperimentSpec,
    class: GaussianIid,
    source: Source,
    n: usize,
    reps: usize,
    streams: Streams,
) -> Result<Vec<DccResult>> {
    let model = BuiltinModel::Gaussian(class);
    (0..reps)
        .into_par_iter()
        .map(|r| {
            let rep = streams.child(r as u64);
            let data = source.sample(n, rep.child(0));
            run_dcc(&model, &data, &spec.dcc_config(rep.child(1 + class as u64).seed()))
        })
        .collect()
}

/// One cell of the uniformity experiment: the criterion for every
/// replication of `class` on data of size `n` from `source`, exactly as the
/// full experiment computes it.
pub fn uniformity_cell(spec: &ExperimentSpec, class: GaussianIid, source: Source, n: usize) -> Result<Vec<DccResult>> {
    let streams = Streams::new(spec.seed)
        .child(Experiment::Gaussian as u64)
        .path(&[n as u64, source as u64]);
    gaussian_replicates(spec, class, source, n, spec.replications(), streams)
}

fn gaussian(spec: &ExperimentSpec) -> Result<Report> {
    let mut report = spec.report();
    for n in spec.sizes(&[10, 100, 1000]) {
        for source in SOURCES {
            for (class, cname) in GAUSSIAN_CLASSES {
                let results = uniformity_cell(spec, class, source, n)?;
                let tag = format!("{cname}/{}/n={n}", source.name());
                let pfa_star: Vec<f64> = results.iter().map(|r| r.pfa_star).collect();
                let pfa_u: Vec<f64> = results.iter().map(|r| r.pfa_u_star).collect();
                report
                    .histograms
                    .push(histogram(&pfa_star, 10, 0.0, 0.5)?.labeled(format!("pfa_star:{tag}")));
                report
                    .histograms
                    .push(histogram(&pfa_u, 20, 0.0, 1.0)?.labeled(format!("pfa_u:{tag}")));
                let d = ks_uniform_statistic(&pfa_u);
                report.summary.push(
                    SummaryRow::new("uniformity", &tag)
                        .with("ks_distance", d)
                        .with("ks_p_value", kolmogorov_pvalue(d, pfa_u.len()))
                        .with("mean_pfa_star", pfa_star.iter().sum::<f64>() / pfa_star.len() as f64),
                );
                for (i, r) in results.iter().enumerate() {
                    report.results.push(ResultRow::replicate(r, &tag, i));
                }
            }
        }
    }
    Ok(report)
}

// ----------------------------------------------------------------- rejection

/// Size of the datasets in the rejection-rate comparison.
pub const REJECTION_N: usize = 100;
pub const REJECTION_LEVELS: [f64; 2] = [0.10, 0.05];

/// Criterion threshold for the free Gaussian class at false-rejection
/// rate `rho`, calibrated on standard normal data of size `n`.
pub fn gaussian_free_threshold(spec: &ExperimentSpec, n: usize, rho: f64) -> Result<f64> {
    let model = BuiltinModel::Gaussian(GaussianIid::Free);
    let generator = ParamVector::new(&model.param_space(), vec![0.0, 1.0])?;
    let template = Dataset::univariate(vec![0.0; n])?;
    let cfg = spec.dcc_config(Streams::new(spec.seed).child(CALIBRATION_SALT).seed());
    let cal = calibrate_threshold(
        &model,
        &generator,
        &template,
        |d| build_sampler(&model, d, &cfg),
        rho,
        spec.calibration_reps(),
        &cfg,
    )?;
    Ok(cal.threshold)
}

const CALIBRATION_SALT: u64 = 0xca1;

fn rejection(spec: &ExperimentSpec) -> Result<Report> {
    let mut report = spec.report();
    let reps = spec.replications();
    let n = spec.sizes(&[REJECTION_N])[0];
    let root = Streams::new(spec.seed).child(Experiment::Rejection as u64);
    let calibrator = spec.calibrator();

    // Criterion values per (class, source); shared by both levels.
    let mut values = Vec::new();
    for source in SOURCES {
        for (class, cname) in GAUSSIAN_CLASSES {
            let streams = root.child(source as u64);
            let res = gaussian_replicates(spec, class, source, n, reps, streams)?;
            values.push((
                class,
                cname,
                source,
                res.iter().map(|r| r.pfa_star).collect::<Vec<f64>>(),
            ));
        }
    }
    // The classical tests see the same datasets as the criterion.
    let datasets: Vec<(Source, Vec<Dataset>)> = SOURCES
        .iter()
        .map(|&s| {
            let streams = root.child(s as u64);
            (
                s,
                (0..reps)
                    .map(|r| s.sample(n, streams.child(r as u64).child(0)))
                    .collect(),
            )
        })
        .collect();

    for level in REJECTION_LEVELS {
        let free_threshold = gaussian_free_threshold(spec, n, level)?;
        let mut row = SummaryRow::new(format!("rejection@{level}"), "dcc");
        for (class, cname, source, v) in &values {
            let threshold = match class {
                GaussianIid::Fixed => threshold_exact(level)?,
                GaussianIid::Free => free_threshold,
            };
            let rate = fraction(v.iter().map(|&p| rejects(p, threshold)));
            row = row.with(format!("{cname}/{}", source.name()), rate);
            report.baselines.push(
                BaselineRow::rate("dcc", format!("{cname}/{}", source.name()), n, level, rate)
                    .with_note(format!("threshold {threshold}")),
            );
        }
        report.summary.push(row.with("free_threshold", free_threshold));

        for kind in TestKind::NORMALITY {
            let cname = if kind == TestKind::Ks { "fixed" } else { "free" };
            let threshold = calibrator.threshold(kind, n, level)?;
            let mut row = SummaryRow::new(format!("rejection@{level}"), kind.short_name());
            for (source, data) in &datasets {
                let rate = data
                    .par_iter()
                    .map(|d| kind.statistic(d.values()).map(|s| s > threshold))
                    .collect::<Result<Vec<bool>>>()
                    .map(fraction)?;
                row = row.with(format!("{cname}/{}", source.name()), rate);
                report.baselines.push(
                    BaselineRow::rate(kind.short_name(), format!("{cname}/{}", source.name()), n, level, rate)
                        .with_note(format!("threshold {threshold}")),
                );
            }
            report.summary.push(row);
        }
    }
    Ok(report)
}

// ---------------------------------------------------------------- regression

/// Cubic used to synthesize regression data, lowest order first.
pub const REGRESSION_COEFFICIENTS: [f64; 4] = [0.5, 4.0, 0.5, -0.2];
pub const REGRESSION_NOISE_SD: f64 = 2.0;
pub const REGRESSION_POINTS: usize = 50;

pub fn regression_data(streams: Streams) -> Dataset {
    let x = default_covariates(REGRESSION_POINTS);
    let noise = Normal::new(0.0, REGRESSION_NOISE_SD).expect("valid normal");
    let mut rng = streams.rng();
    let y = x
        .iter()
        .map(|&x| REGRESSION_COEFFICIENTS.iter().rev().fold(0.0, |acc, b| acc * x + b) + noise.sample(&mut rng))
        .collect();
    Dataset::from_flat(y, 1, Some(x)).expect("finite regression data")
}

fn regression(spec: &ExperimentSpec) -> Result<Report> {
    let mut report = spec.report();
    let reps = spec.replications();
    let root = Streams::new(spec.seed).child(Experiment::Regression as u64);
    let per_rep = (0..reps)
        .into_par_iter()
        .map(|r| {
            let rep = root.child(r as u64);
            let data = regression_data(rep.child(0));
            (1..=3)
                .map(|k| {
                    let model = BuiltinModel::PolyRegression(PolyRegression::for_data(k, &data)?);
                    run_dcc(&model, &data, &spec.dcc_config(rep.child(k as u64).seed()))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    let mut row = SummaryRow::new("regression", "fractions");
    for k in 1..=3 {
        let v: Vec<f64> = per_rep.iter().map(|r| r[k - 1].pfa_star).collect();
        report
            .histograms
            .push(histogram(&v, 10, 0.0, 0.5)?.labeled(format!("pfa_star:order={k}")));
        row = row.with(format!("order{k}_le_0.05"), fraction(v.iter().map(|&p| p <= 0.05)));
        row = row.with(format!("order{k}_ge_0.15"), fraction(v.iter().map(|&p| p >= 0.15)));
    }
    let all = fraction(
        per_rep
            .iter()
            .map(|r| r[0].pfa_star <= 0.05 && r[1].pfa_star <= 0.05 && r[2].pfa_star >= 0.15),
    );
    report.summary.push(row.with("all_three_hold", all));
    for (i, r) in per_rep.iter().enumerate() {
        for (k, res) in r.iter().enumerate() {
            report
                .results
                .push(ResultRow::replicate(res, format!("cubic/order={}", k + 1), i));
        }
    }
    Ok(report)
}

// ------------------------------------------------------------------------ ar

/// Length of the series used to locate the linear AR(1) fit closest to the
/// saturated generator, which serves as the null for threshold calibration.
pub const AR_PSEUDO_TRUE_LENGTH: usize = 200_000;
pub const AR_LEVEL: f64 = 0.05;
/// Parameter dimension subtracted from the Ljung–Box degrees of freedom.
pub const AR_LJUNG_BOX_D: usize = 2;

/// Linear AR(1) parameters fitted to one long saturated series.
pub fn ar_pseudo_true(seed: u64) -> Result<ParamVector> {
    let g = SaturatedAr1Generator::default();
    let long = g.generate(AR_PSEUDO_TRUE_LENGTH, &mut Streams::new(seed).child(0xa1).rng());
    LinearAr1.mle(&long)
}

fn ar_residuals(data: &Dataset) -> Result<Vec<f64>> {
    let (a, _) = mle_ar1(data)?;
    Ok(data.values().windows(2).map(|w| w[1] - a * w[0]).collect())
}

#[derive(Debug, Clone)]
struct ArReplicate {
    result: DccResult,
    lb: std::result::Result<f64, Error>,
    lb_d1: std::result::Result<f64, Error>,
}

fn ar(spec: &ExperimentSpec) -> Result<Report> {
    let mut report = spec.report();
    let reps = spec.replications();
    let root = Streams::new(spec.seed).child(Experiment::Ar as u64);
    let g = SaturatedAr1Generator::default();
    let model = BuiltinModel::Ar1(LinearAr1);
    let null = ar_pseudo_true(spec.seed)?;

    for n in spec.sizes(&[10, 100, 1000]) {
        let streams = root.child(n as u64);
        let reps_out = (0..reps)
            .into_par_iter()
            .map(|r| {
                let rep = streams.child(r as u64);
                let data = g.generate(n, &mut rep.child(0).rng());
                let result = run_dcc(&model, &data, &spec.dcc_config(rep.child(1).seed()))?;
                let e = ar_residuals(&data)?;
                let lb = ljung_box(&e, None, AR_LJUNG_BOX_D, AR_LEVEL).map(|t| t.p_value.unwrap_or(f64::NAN));
                let lb_d1 = ljung_box(&e, None, 1, AR_LEVEL).map(|t| t.p_value.unwrap_or(f64::NAN));
                Ok(ArReplicate { result, lb, lb_d1 })
            })
            .collect::<Result<Vec<_>>>()?;

        let pfa: Vec<f64> = reps_out.iter().map(|r| r.result.pfa_star).collect();
        let tag = format!("saturated-ar/n={n}");
        report
            .histograms
            .push(histogram(&pfa, 10, 0.0, 0.5)?.labeled(format!("pfa_star:{tag}")));

        let mut row =
            SummaryRow::new("ar", &tag).with("dcc_raw_rejection", fraction(pfa.iter().map(|&p| rejects(p, AR_LEVEL))));
        if spec.calibrate {
            let template = g.generate(n, &mut streams.child(u64::MAX).rng());
            let cfg = spec.dcc_config(streams.child(CALIBRATION_SALT).seed());
            let threshold = calibrate_threshold(
                &model,
                &null,
                &template,
                |d| build_sampler(&model, d, &cfg),
                AR_LEVEL,
                spec.calibration_reps(),
                &cfg,
            )?
            .threshold;
            row = row.with("dcc_calibrated_threshold", threshold).with(
                "dcc_calibrated_rejection",
                fraction(pfa.iter().map(|&p| rejects(p, threshold))),
            );
        }

        // The d=1 variant is a sensitivity check for sizes where h <= d.
        for (d, label) in [(AR_LJUNG_BOX_D, "ljungbox"), (1, "ljungbox-d1-sensitivity")] {
            let p: Vec<std::result::Result<f64, Error>> = reps_out
                .iter()
                .map(|r| {
                    if d == AR_LJUNG_BOX_D {
                        r.lb.clone()
                    } else {
                        r.lb_d1.clone()
                    }
                })
                .collect();
            match p.iter().find_map(|x| x.as_ref().err()) {
                Some(err) => {
                    let mut b = BaselineRow::rate(label, &tag, n, AR_LEVEL, 0.0).with_note(format!("d={d}: {err}"));
                    b.rejection_rate = None;
                    report.baselines.push(b);
                }
                None => {
                    let p: Vec<f64> = p.into_iter().map(|x| x.expect("checked")).collect();
                    let rate = fraction(p.iter().map(|&v| v < AR_LEVEL));
                    report
                        .histograms
                        .push(histogram(&p, 10, 0.0, 1.0)?.labeled(format!("{label}_p:{tag}")));
                    report.baselines.push(
                        BaselineRow::rate(label, &tag, n, AR_LEVEL, rate)
                            .with_note(format!("h={}, d={d}", default_lags(n - 1))),
                    );
                    row = row.with(format!("{label}_rejection"), rate);
                }
            }
        }
        if reps_out.iter().all(|r| r.lb.is_ok()) {
            let both = reps_out
                .iter()
                .map(|r| rejects(r.result.pfa_star, AR_LEVEL) && matches!(r.lb, Ok(p) if p < AR_LEVEL));
            row = row.with("joint_rejection", fraction(both));
        }
        report.summary.push(row);
        for (i, r) in reps_out.iter().enumerate() {
            report.results.push(ResultRow::replicate(&r.result, &tag, i));
        }
    }
    Ok(report)
}

// ------------------------------------------------------------------ kangaroo

fn kangaroo(spec: &ExperimentSpec) -> Result<Report> {
    let mut report = spec.report();
    let cfg = spec.dcc_config(spec.seed);
    let data = embedded_dataset("kangaroo")?;
    let model = BuiltinModel::Kangaroo(KangarooSsm::new(cfg.particles)?);
    let res = run_dcc(&model, &data, &cfg)?;
    let mean = |j: usize| res.thetas.iter().map(|t| t[j]).sum::<f64>() / res.thetas.len() as f64;
    report.summary.push(
        SummaryRow::new("kangaroo", "posterior")
            .with("pfa_star", res.pfa_star)
            .with("sigma_mean", mean(0))
            .with("tau_mean", mean(1))
            .with("acceptance_rate", res.sampler.acceptance_rate.unwrap_or(f64::NAN)),
    );
    report.results.push(ResultRow::full(&res, "kangaroo"));
    Ok(report)
}
