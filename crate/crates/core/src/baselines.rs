//! Classical goodness-of-fit tests used for comparison: Kolmogorov–Smirnov
//! against `N(0, 1)`, Lilliefors, Anderson–Darling, Jarque–Bera, and
//! Ljung–Box.
//!
//! Rejection thresholds for the normality tests are calibrated by
//! simulating `N(0, 1)` samples of the same size; they are cached per
//! `(test, n, level, reps, seed)` and optionally persisted as CSV.

use std::collections::HashMap;
use std::fs::OpenOptions;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Mutex;

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::rng::Streams;
use crate::special::{chi2_sf, std_normal_cdf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TestKind {
    Ks,
    Lilliefors,
    AndersonDarling,
    JarqueBera,
    LjungBox,
}

impl TestKind {
    pub const NORMALITY: [TestKind; 4] = [
        TestKind::Ks,
        TestKind::Lilliefors,
        TestKind::AndersonDarling,
        TestKind::JarqueBera,
    ];

    pub fn short_name(&self) -> &'static str {
        match self {
            TestKind::Ks => "ks",
            TestKind::Lilliefors => "lilliefors",
            TestKind::AndersonDarling => "ad",
            TestKind::JarqueBera => "jb",
            TestKind::LjungBox => "ljungbox",
        }
    }

    fn min_n(&self) -> usize {
        match self {
            TestKind::Ks => 5,
            _ => 8,
        }
    }

    /// Statistic of a normality test on the raw sample.
    pub fn statistic(&self, y: &[f64]) -> Result<f64> {
        if y.len() < self.min_n() {
            return Err(Error::InsufficientData(format!(
                "{} needs at least {} points",
                self.short_name(),
                self.min_n()
            )));
        }
        match self {
            TestKind::Ks => Ok(ks_statistic(y)),
            TestKind::Lilliefors => lilliefors_statistic(y),
            TestKind::AndersonDarling => anderson_darling_statistic(y),
            TestKind::JarqueBera => jarque_bera_statistic(y),
            TestKind::LjungBox => Err(Error::InvalidConfig("Ljung-Box is not a normality test".into())),
        }
    }
}

impl FromStr for TestKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ks" => Ok(TestKind::Ks),
            "lilliefors" => Ok(TestKind::Lilliefors),
            "ad" => Ok(TestKind::AndersonDarling),
            "jb" => Ok(TestKind::JarqueBera),
            "ljungbox" => Ok(TestKind::LjungBox),
            other => Err(Error::InvalidConfig(format!("unknown test `{other}`"))),
        }
    }
}

/// How a test's rejection rule was obtained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Calibration {
    Analytic,
    Simulated { reps: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub test: TestKind,
    pub n: usize,
    pub statistic: f64,
    pub p_value: Option<f64>,
    /// The test rejects when the statistic is above this value.
    pub threshold: Option<f64>,
    pub level: f64,
    pub reject: bool,
    pub calibration: Calibration,
}

fn sorted(y: &[f64]) -> Vec<f64> {
    let mut v = y.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// Mean and standard deviation with the `n - 1` denominator.
fn mean_sd(y: &[f64]) -> Result<(f64, f64)> {
    let n = y.len() as f64;
    let m = y.iter().sum::<f64>() / n;
    let v = y.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    if !(v > 0.0) {
        return Err(Error::ZeroVariance);
    }
    Ok((m, v.sqrt()))
}

/// `sup_x |F_n(x) - Φ(x)|` evaluated at the jumps of `F_n`, for values
/// already sorted and standardized.
fn ks_sorted(z: &[f64]) -> f64 {
    let n = z.len() as f64;
    z.iter().enumerate().fold(0.0, |d, (i, &x)| {
        let f = std_normal_cdf(x);
        d.max((i + 1) as f64 / n - f).max(f - i as f64 / n)
    })
}

/// Kolmogorov–Smirnov distance to `N(0, 1)`.
pub fn ks_statistic(y: &[f64]) -> f64 {
    ks_sorted(&sorted(y))
}

/// `sup_x |F_n(x) - x|` for values in `[0, 1]`.
pub fn ks_uniform_statistic(u: &[f64]) -> f64 {
    let v = sorted(u);
    let n = v.len() as f64;
    v.iter()
        .enumerate()
        .fold(0.0, |d, (i, &x)| d.max((i + 1) as f64 / n - x).max(x - i as f64 / n))
}

/// Asymptotic p-value of a one-sample KS distance `d` on `n` points, with
/// Stephens' small-sample correction.
pub fn kolmogorov_pvalue(d: f64, n: usize) -> f64 {
    let sn = (n as f64).sqrt();
    let lambda = (sn + 0.12 + 0.11 / sn) * d;
    if lambda < 0.2 {
        return 1.0;
    }
    let mut p = 0.0;
    for k in 1..=100 {
        let term = (-2.0 * (k * k) as f64 * lambda * lambda).exp();
        p += if k % 2 == 1 { 2.0 * term } else { -2.0 * term };
        if term < 1e-16 {
            break;
        }
    }
    p.clamp(0.0, 1.0)
}

/// Kolmogorov–Smirnov distance to `N(μ̂, σ̂²)`.
pub fn lilliefors_statistic(y: &[f64]) -> Result<f64> {
    let (m, s) = mean_sd(y)?;
    let z: Vec<f64> = sorted(y).iter().map(|x| (x - m) / s).collect();
    Ok(ks_sorted(&z))
}

/// `A² = -n - (1/n) Σ (2i-1) [ln u_(i) + ln(1 - u_(n+1-i))]` with
/// `u = Φ((y - μ̂)/σ̂)`.
pub fn anderson_darling_statistic(y: &[f64]) -> Result<f64> {
    let (m, s) = mean_sd(y)?;
    let z: Vec<f64> = sorted(y).iter().map(|x| (x - m) / s).collect();
    let n = z.len();
    // ln(1 - Φ(x)) = ln Φ(-x), which keeps precision in the upper tail.
    let ln_cdf = |x: f64| std_normal_cdf(x).max(f64::MIN_POSITIVE).ln();
    let sum: f64 = (0..n)
        .map(|i| (2 * i + 1) as f64 * (ln_cdf(z[i]) + ln_cdf(-z[n - 1 - i])))
        .sum();
    Ok(-(n as f64) - sum / n as f64)
}

/// `(n/6)(S² + (K - 3)²/4)` with moment estimates of skewness and kurtosis.
pub fn jarque_bera_statistic(y: &[f64]) -> Result<f64> {
    let n = y.len() as f64;
    let m = y.iter().sum::<f64>() / n;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for x in y {
        let d = x - m;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    let (m2, m3, m4) = (m2 / n, m3 / n, m4 / n);
    if !(m2 > 0.0) {
        return Err(Error::ZeroVariance);
    }
    let skew = m3 / m2.powf(1.5);
    let kurt = m4 / (m2 * m2);
    Ok(n / 6.0 * (skew * skew + (kurt - 3.0).powi(2) / 4.0))
}

/// Lag-`k` sample autocorrelations for `k = 1..=h`, with the `1/n`
/// normalization.
pub fn autocorrelations(e: &[f64], h: usize) -> Result<Vec<f64>> {
    let n = e.len();
    let m = e.iter().sum::<f64>() / n as f64;
    let c: Vec<f64> = e.iter().map(|x| x - m).collect();
    let c0: f64 = c.iter().map(|x| x * x).sum();
    if !(c0 > 0.0) {
        return Err(Error::ZeroVariance);
    }
    Ok((1..=h)
        .map(|k| c[k..].iter().zip(&c[..n - k]).map(|(a, b)| a * b).sum::<f64>() / c0)
        .collect())
}

/// `Q = n(n+2) Σ_{k=1}^{h} r̂_k² / (n - k)`.
pub fn ljung_box_statistic(e: &[f64], h: usize) -> Result<f64> {
    let n = e.len();
    if h < 1 || n <= h {
        return Err(Error::InvalidConfig(format!(
            "Ljung-Box needs 1 <= h < n, got h={h}, n={n}"
        )));
    }
    let r = autocorrelations(e, h)?;
    let nf = n as f64;
    Ok(nf
        * (nf + 2.0)
        * r.iter()
            .enumerate()
            .map(|(i, rk)| rk * rk / (nf - (i + 1) as f64))
            .sum::<f64>())
}

/// Default lag count `round(ln n)`.
pub fn default_lags(n: usize) -> usize {
    (n as f64).ln().round() as usize
}

/// Ljung–Box test with `h - d_param` degrees of freedom. `h` defaults to
/// `round(ln n)`.
pub fn ljung_box(residuals: &[f64], h: Option<usize>, d_param: usize, level: f64) -> Result<TestReport> {
    let h = h.unwrap_or_else(|| default_lags(residuals.len()));
    if h <= d_param {
        return Err(Error::NonPositiveDof(h as i64 - d_param as i64));
    }
    let q = ljung_box_statistic(residuals, h)?;
    let p = chi2_sf(q, (h - d_param) as u32);
    Ok(TestReport {
        test: TestKind::LjungBox,
        n: residuals.len(),
        statistic: q,
        p_value: Some(p),
        threshold: None,
        level,
        reject: p < level,
        calibration: Calibration::Analytic,
    })
}

/// Statistic value above which a fraction `level` of `values` lies: the
/// midpoint of the order statistics around the `(1 - level)` quantile.
pub fn upper_threshold(values: &[f64], level: f64) -> Result<f64> {
    if values.is_empty() || !(0.0..=1.0).contains(&level) {
        return Err(Error::InvalidConfig("bad calibration input".into()));
    }
    let v = sorted(values);
    let k = ((1.0 - level) * v.len() as f64).round() as usize;
    Ok(if k == 0 {
        f64::NEG_INFINITY
    } else if k >= v.len() {
        v[v.len() - 1]
    } else {
        0.5 * (v[k - 1] + v[k])
    })
}

/// Simulated null distribution of a normality statistic for sample size `n`.
pub fn null_statistics(kind: TestKind, n: usize, reps: usize, seed: u64) -> Result<Vec<f64>> {
    let streams = Streams::new(seed).child(kind as u64).child(n as u64);
    (0..reps)
        .into_par_iter()
        .map(|r| {
            let mut rng = streams.child(r as u64).rng();
            let y: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
            kind.statistic(&y)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct CacheKey {
    test: TestKind,
    n: usize,
    level_bits: u64,
    reps: usize,
    seed: u64,
}

#[derive(Debug, Serialize, Deserialize)]
struct CacheRow {
    test: String,
    n: usize,
    level: f64,
    reps: usize,
    seed: u64,
    threshold: f64,
}

/// Simulation-based thresholds with an in-memory cache and optional CSV
/// persistence.
#[derive(Debug)]
pub struct Calibrator {
    pub reps: usize,
    pub seed: u64,
    path: Option<PathBuf>,
    cache: Mutex<HashMap<CacheKey, f64>>,
}

impl Calibrator {
    pub const DEFAULT_REPS: usize = 100_000;

    pub fn new(reps: usize, seed: u64) -> Self {
        Self {
            reps,
            seed,
            path: None,
            cache: Mutex::new(HashMap::new()),
        }
    }

    /// Loads thresholds from `path` if it exists and appends new ones to it.
    pub fn with_cache_file(mut self, path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        if path.exists() {
            let mut rdr = csv::Reader::from_path(&path)?;
            let mut cache = self.cache.lock().expect("cache lock");
            for row in rdr.deserialize::<CacheRow>() {
                let row = row?;
                let key = CacheKey {
                    test: row.test.parse()?,
                    n: row.n,
                    level_bits: row.level.to_bits(),
                    reps: row.reps,
                    seed: row.seed,
                };
                cache.insert(key, row.threshold);
            }
        }
        self.path = Some(path);
        Ok(self)
    }

    pub fn threshold(&self, kind: TestKind, n: usize, level: f64) -> Result<f64> {
        let key = CacheKey {
            test: kind,
            n,
            level_bits: level.to_bits(),
            reps: self.reps,
            seed: self.seed,
        };
        if let Some(&t) = self.cache.lock().expect("cache lock").get(&key) {
            return Ok(t);
        }
        let t = upper_threshold(&null_statistics(kind, n, self.reps, self.seed)?, level)?;
        let mut cache = self.cache.lock().expect("cache lock");
        if cache.insert(key, t).is_none() {
            if let Some(path) = &self.path {
                let fresh = !path.exists();
                let file = OpenOptions::new().create(true).append(true).open(path)?;
                let mut w = csv::WriterBuilder::new().has_headers(fresh).from_writer(file);
                w.serialize(CacheRow {
                    test: kind.short_name().into(),
                    n,
                    level,
                    reps: self.reps,
                    seed: self.seed,
                    threshold: t,
                })?;
                w.flush()?;
            }
        }
        Ok(t)
    }

    /// Runs a normality test on `data` at `level`.
    pub fn test(&self, kind: TestKind, data: &Dataset, level: f64) -> Result<TestReport> {
        data.require_dim(1)?;
        self.test_values(kind, data.values(), level)
    }

    pub fn test_values(&self, kind: TestKind, y: &[f64], level: f64) -> Result<TestReport> {
        let statistic = kind.statistic(y)?;
        let threshold = self.threshold(kind, y.len(), level)?;
        Ok(TestReport {
            test: kind,
            n: y.len(),
            statistic,
            p_value: None,
            threshold: Some(threshold),
            level,
            reject: statistic > threshold,
            calibration: Calibration::Simulated {
                reps: self.reps,
                seed: self.seed,
            },
        })
    }
}

pub fn ks_fixed(data: &Dataset, level: f64, cal: &Calibrator) -> Result<TestReport> {
    cal.test(TestKind::Ks, data, level)
}

pub fn lilliefors(data: &Dataset, level: f64, cal: &Calibrator) -> Result<TestReport> {
    cal.test(TestKind::Lilliefors, data, level)
}

pub fn anderson_darling(data: &Dataset, level: f64, cal: &Calibrator) -> Result<TestReport> {
    cal.test(TestKind::AndersonDarling, data, level)
}

pub fn jarque_bera(data: &Dataset, level: f64, cal: &Calibrator) -> Result<TestReport> {
    cal.test(TestKind::JarqueBera, data, level)
}
