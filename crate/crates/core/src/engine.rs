//! The Monte Carlo consistency criterion.
//!
//! For every parameter draw `θ^(j)` the engine simulates `M′` datasets to
//! estimate the per-index mean and variance of the incremental
//! log-likelihoods, then `M` further datasets to estimate the probability
//! that a simulated statistic `T̃` exceeds the observed `T̂`. Averaging over
//! draws gives `pfa_u*`, and the criterion is `min(pfa_u*, 1 - pfa_u*)`.
//!
//! Randomness is drawn from [`Streams`] keyed by `(seed, j, replicate)`, and
//! all reductions run in index order, so results are bit-identical for any
//! number of worker threads.

use std::time::Instant;

use rayon::prelude::*;

use crate::config::{DccConfig, DccResult, TailEvent};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::inference::WeightSampler;
use crate::model::ModelClass;
use crate::param::ParamVector;
use crate::rng::Streams;

/// Simulated log-likelihood variances below this are treated as a modeling
/// error rather than standardized by.
pub const VARIANCE_FLOOR: f64 = 1e-12;

// Stream layout below the master seed.
const WEIGHT_STREAM: u64 = 0;
const DRAW_STREAM: u64 = 1;
const CALIBRATION_STREAM: u64 = 2;
// Below a draw.
const MOMENT_STREAM: u64 = 0;
const TEST_STREAM: u64 = 1;
const OBSERVED_STREAM: u64 = 2;

/// Per-index sample moments of simulated incremental log-likelihoods.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentEstimates {
    pub means: Vec<f64>,
    pub variances: Vec<f64>,
    pub replicates: usize,
}

impl MomentEstimates {
    pub fn new(means: Vec<f64>, variances: Vec<f64>, replicates: usize) -> Result<Self> {
        if means.len() != variances.len() {
            return Err(Error::LengthMismatch {
                left: means.len(),
                right: variances.len(),
            });
        }
        Ok(Self {
            means,
            variances,
            replicates,
        })
    }

    pub fn len(&self) -> usize {
        self.means.len()
    }

    pub fn is_empty(&self) -> bool {
        self.means.is_empty()
    }

    /// Sample means and unbiased variances of the rows of `samples`, each
    /// row one replicate `(z_1, ..., z_n)`. With `pool`, every coordinate
    /// gets the moments of all `n · rows` values.
    pub fn from_samples(samples: &[Vec<f64>], pool: bool) -> Result<Self> {
        let reps = samples.len();
        if reps < 2 {
            return Err(Error::InvalidConfig(
                "moment estimation needs at least 2 replicates".into(),
            ));
        }
        let n = samples[0].len();
        if let Some(bad) = samples.iter().find(|z| z.len() != n) {
            return Err(Error::LengthMismatch {
                left: n,
                right: bad.len(),
            });
        }
        let (means, variances) = if pool {
            let count = (n * reps) as f64;
            let mean = samples.iter().flatten().sum::<f64>() / count;
            let var = samples.iter().flatten().map(|z| (z - mean).powi(2)).sum::<f64>() / (count - 1.0);
            (vec![mean; n], vec![var; n])
        } else {
            let mut means = vec![0.0; n];
            for z in samples {
                for (m, v) in means.iter_mut().zip(z) {
                    *m += v;
                }
            }
            means.iter_mut().for_each(|m| *m /= reps as f64);
            let mut vars = vec![0.0; n];
            for z in samples {
                for ((s, v), m) in vars.iter_mut().zip(z).zip(&means) {
                    *s += (v - m).powi(2);
                }
            }
            vars.iter_mut().for_each(|s| *s /= (reps - 1) as f64);
            (means, vars)
        };
        if let Some((index, &variance)) = variances.iter().enumerate().find(|(_, v)| !(**v >= VARIANCE_FLOOR)) {
            return Err(Error::DegenerateVariance { index, variance });
        }
        Ok(Self {
            means,
            variances,
            replicates: reps,
        })
    }
}

/// Simulates `count` datasets from `model` at `theta` and returns their
/// incremental log-likelihoods. Replicate `k` uses stream `streams.child(k)`.
pub fn simulated_logliks<M: ModelClass + ?Sized>(
    model: &M,
    theta: &ParamVector,
    template: &Dataset,
    count: usize,
    streams: Streams,
) -> Result<Vec<Vec<f64>>> {
    (0..count)
        .into_par_iter()
        .map(|k| {
            let mut rng = streams.child(k as u64).rng();
            let sim = model.simulate(theta, template, &mut rng)?;
            model.incremental_logliks(theta, &sim, &mut rng)
        })
        .collect()
}

/// Estimates `m̂_i` and `v̂_i` from `m_cal` simulated datasets.
pub fn estimate_moments<M: ModelClass + ?Sized>(
    model: &M,
    theta: &ParamVector,
    template: &Dataset,
    m_cal: usize,
    streams: Streams,
    pool_iid: bool,
) -> Result<MomentEstimates> {
    if m_cal < 2 {
        return Err(Error::InvalidConfig("M' must be at least 2".into()));
    }
    if pool_iid && !model.is_iid() {
        return Err(Error::InvalidConfig(format!(
            "moment pooling requested for non-iid model {}",
            model.name()
        )));
    }
    let z = simulated_logliks(model, theta, template, m_cal, streams)?;
    MomentEstimates::from_samples(&z, pool_iid)
}

/// `T = (1/n) Σ (z_i - m̂_i)² / v̂_i`.
pub fn statistic_t(z: &[f64], moments: &MomentEstimates) -> Result<f64> {
    if z.len() != moments.len() {
        return Err(Error::LengthMismatch {
            left: z.len(),
            right: moments.len(),
        });
    }
    let mut sum = 0.0;
    for (i, ((zi, m), v)) in z.iter().zip(&moments.means).zip(&moments.variances).enumerate() {
        if !(*v >= VARIANCE_FLOOR) {
            return Err(Error::DegenerateVariance { index: i, variance: *v });
        }
        sum += (zi - m).powi(2) / v;
    }
    Ok(sum / z.len() as f64)
}

/// Number of simulated statistics strictly greater than the observed one.
/// Ties count as not greater.
pub fn exceedance_count(simulated: &[f64], observed: f64) -> usize {
    simulated.iter().filter(|&&t| t > observed).count()
}

/// Fraction of simulated statistics strictly greater than the observed one.
pub fn exceedance_fraction(simulated: &[f64], observed: f64) -> f64 {
    exceedance_count(simulated, observed) as f64 / simulated.len() as f64
}

/// Everything computed for one parameter draw.
#[derive(Debug, Clone, PartialEq)]
pub struct DrawAssessment {
    pub pfa_u: f64,
    pub exceed: usize,
    pub m_test: usize,
    pub t_obs: f64,
    pub t_sim: Vec<f64>,
    pub moments: MomentEstimates,
}

/// Tuning knobs of [`assess_draw`] beyond the replicate counts.
#[derive(Debug, Clone, Copy, Default)]
pub struct DrawOptions {
    pub pool_iid_moments: bool,
    pub tail_event: TailEvent,
}

/// Estimates `pfa_u(θ)` for one parameter value. The `M′` calibration and
/// `M` test datasets come from disjoint streams below `streams`.
pub fn assess_draw<M: ModelClass + ?Sized>(
    model: &M,
    theta: &ParamVector,
    observed: &Dataset,
    m_test: usize,
    m_cal: usize,
    streams: Streams,
    opts: DrawOptions,
) -> Result<DrawAssessment> {
    if m_test < 1 {
        return Err(Error::InvalidConfig("M must be at least 1".into()));
    }
    let moments = estimate_moments(
        model,
        theta,
        observed,
        m_cal,
        streams.child(MOMENT_STREAM),
        opts.pool_iid_moments,
    )?;
    let z_obs = {
        let mut rng = streams.child(OBSERVED_STREAM).rng();
        model.incremental_logliks(theta, observed, &mut rng)?
    };
    let t_obs = statistic_t(&z_obs, &moments)?;
    let t_sim = simulated_logliks(model, theta, observed, m_test, streams.child(TEST_STREAM))?
        .iter()
        .map(|z| statistic_t(z, &moments))
        .collect::<Result<Vec<f64>>>()?;
    let exceed = match opts.tail_event {
        TailEvent::Exceeds => exceedance_count(&t_sim, t_obs),
        TailEvent::Complement => m_test - t_sim.iter().filter(|&&t| t <= t_obs).count(),
    };
    Ok(DrawAssessment {
        pfa_u: exceed as f64 / m_test as f64,
        exceed,
        m_test,
        t_obs,
        t_sim,
        moments,
    })
}

/// `pfa_u(θ)`: the probability, estimated from `M` simulations, that data
/// generated at `θ` yields a larger statistic than the observed data.
pub fn pfa_u_for_theta<M: ModelClass + ?Sized>(
    model: &M,
    theta: &ParamVector,
    observed: &Dataset,
    m_test: usize,
    m_cal: usize,
    streams: Streams,
) -> Result<f64> {
    assess_draw(model, theta, observed, m_test, m_cal, streams, DrawOptions::default()).map(|a| a.pfa_u)
}

/// Runs the full criterion: draws `N` parameters from `weights`, assesses
/// each, and averages.
pub fn dcc<M: ModelClass + ?Sized>(
    model: &M,
    weights: &dyn WeightSampler,
    observed: &Dataset,
    config: &DccConfig,
) -> Result<DccResult> {
    let start = Instant::now();
    config.validate()?;
    model.check_data(observed)?;
    let streams = Streams::new(config.seed);

    let draws = weights.draw(config.n_theta, &mut streams.child(WEIGHT_STREAM).rng())?;
    if draws.thetas.len() != config.n_theta {
        return Err(Error::WeightSamplerFailure(format!(
            "requested {} draws, sampler produced {}",
            config.n_theta,
            draws.thetas.len()
        )));
    }
    let space = model.param_space();
    for theta in &draws.thetas {
        space.check(theta.values())?;
    }

    let opts = DrawOptions {
        pool_iid_moments: config.pool_iid_moments,
        tail_event: config.tail_event,
    };
    let assessments = draws
        .thetas
        .par_iter()
        .enumerate()
        .map(|(j, theta)| {
            assess_draw(
                model,
                theta,
                observed,
                config.m_test,
                config.m_cal,
                streams.path(&[DRAW_STREAM, j as u64]),
                opts,
            )
        })
        .collect::<Result<Vec<_>>>()?;

    let exceed_counts: Vec<usize> = assessments.iter().map(|a| a.exceed).collect();
    let total = (config.n_theta * config.m_test) as u64;
    let exceeded: u64 = exceed_counts.iter().map(|&c| c as u64).sum();
    let pfa_u_star = exceeded as f64 / total as f64;
    // Both tails from integer counts so the result is symmetric bit for bit.
    let pfa_star = exceeded.min(total - exceeded) as f64 / total as f64;

    Ok(DccResult {
        model: model.name(),
        pfa_u_per_draw: assessments.iter().map(|a| a.pfa_u).collect(),
        pfa_u_star,
        pfa_star,
        t_obs_per_draw: assessments.iter().map(|a| a.t_obs).collect(),
        exceed_counts,
        thetas: draws.thetas.iter().map(|t| t.values().to_vec()).collect(),
        sampler: draws.diagnostics,
        config: config.clone(),
        elapsed_secs: start.elapsed().as_secs_f64(),
    })
}

/// Rejection threshold for a class with no free parameters: `ρ / 2`, since
/// `min(U, 1 - U)` is uniform on `[0, 1/2]` when `U` is uniform.
pub fn threshold_exact(rho: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::InvalidConfig(format!("level {rho} outside [0, 1]")));
    }
    Ok(rho / 2.0)
}

/// Whether a criterion value falls in the rejection region.
pub fn rejects(pfa_star: f64, threshold: f64) -> bool {
    pfa_star < threshold
}

/// Threshold such that the fraction of `values` strictly below it is as
/// close as possible to `rho`: the midpoint between the `k`-th and `k+1`-th
/// order statistics, `k = round(ρ·R)`.
pub fn empirical_threshold(values: &[f64], rho: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::InvalidConfig("no values to calibrate on".into()));
    }
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::InvalidConfig(format!("level {rho} outside [0, 1]")));
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let k = (rho * v.len() as f64).round() as usize;
    Ok(if k == 0 {
        v[0]
    } else if k >= v.len() {
        // everything rejected
        f64::INFINITY
    } else {
        0.5 * (v[k - 1] + v[k])
    })
}

/// Result of simulation-based threshold calibration.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdCalibration {
    pub threshold: f64,
    pub rho: f64,
    pub pfa_star_values: Vec<f64>,
}

/// Minimum number of simulated datasets for threshold calibration.
pub const MIN_CALIBRATION_REPS: usize = 100;

/// Calibrates a rejection threshold for `model` by simulating `reps`
/// datasets shaped like `template` at `generator`, running the criterion
/// on each, and taking the empirical `ρ`-quantile of the resulting values.
///
/// `weights_for` builds the weight sampler for each simulated dataset.
/// Replicate `r` runs with a seed derived from `(config.seed, r)`.
#[allow(clippy::too_many_arguments)]
pub fn calibrate_threshold<M, F>(
    model: &M,
    generator: &ParamVector,
    template: &Dataset,
    weights_for: F,
    rho: f64,
    reps: usize,
    config: &DccConfig,
) -> Result<ThresholdCalibration>
where
    M: ModelClass + ?Sized,
    F: Fn(&Dataset) -> Result<Box<dyn WeightSampler>> + Sync,
{
    if reps < MIN_CALIBRATION_REPS {
        return Err(Error::InvalidConfig(format!(
            "threshold calibration needs at least {MIN_CALIBRATION_REPS} replicates, got {reps}"
        )));
    }
    config.validate()?;
    model.param_space().check(generator.values())?;
    let streams = Streams::new(config.seed).child(CALIBRATION_STREAM);
    let values = (0..reps)
        .into_par_iter()
        .map(|r| {
            let rep = streams.child(r as u64);
            let data = model.simulate(generator, template, &mut rep.child(0).rng())?;
            let sampler = weights_for(&data)?;
            let cfg = DccConfig {
                seed: rep.child(1).seed(),
                ..config.clone()
            };
            dcc(model, sampler.as_ref(), &data, &cfg).map(|res| res.pfa_star)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(ThresholdCalibration {
        threshold: empirical_threshold(&values, rho)?,
        rho,
        pfa_star_values: values,
    })
}
