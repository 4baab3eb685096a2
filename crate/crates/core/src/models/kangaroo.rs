//! Latent geometric Brownian motion observed through overdispersed counts.
//!
//! ```text
//! ln x_1 ~ N(0, 5²)
//! dx_t / x_t = σ²/2 dt + σ dW_t         ⇒ ln x_{t+Δ} = ln x_t + σ √Δ ε
//! y_{j,t} | x_t ~ NB(mean x_t, variance x_t + τ x_t²),  j = 1..d, iid
//! ```
//!
//! The transition is the exact solution of the SDE, so irregular sampling
//! intervals need no discretization. With the mean/variance
//! parameterization the negative binomial size is `r = 1/τ` for every `x_t`
//! and the success probability is `p = 1/(1 + τ x_t)`.

use rand::Rng;
use rand_distr::{Distribution, Exp1, Gamma, StandardNormal};

use super::{check_count, sample_poisson};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::model::ModelClass;
use crate::param::{ParamSpace, ParamVector, Support};
use crate::rng::DccRng;
use crate::special::{ln_factorial, ln_gamma_ratio, softplus};

#[derive(Debug, Clone, PartialEq)]
pub struct KangarooSsm {
    particles: usize,
    prior_log_mean: f64,
    prior_log_var: f64,
}

impl KangarooSsm {
    pub const DEFAULT_PARTICLES: usize = 2000;
    pub const MIN_PARTICLES: usize = 100;
    pub const DEFAULT_PRIOR_LOG_MEAN: f64 = 0.0;
    pub const DEFAULT_PRIOR_LOG_SD: f64 = 5.0;

    pub fn new(particles: usize) -> Result<Self> {
        if particles < Self::MIN_PARTICLES {
            return Err(Error::InvalidConfig(format!(
                "particle filter needs at least {} particles, got {particles}",
                Self::MIN_PARTICLES
            )));
        }
        Ok(Self {
            particles,
            prior_log_mean: Self::DEFAULT_PRIOR_LOG_MEAN,
            prior_log_var: Self::DEFAULT_PRIOR_LOG_SD * Self::DEFAULT_PRIOR_LOG_SD,
        })
    }

    /// Overrides the log-normal prior on `x_1`, given as the mean and
    /// variance of `ln x_1`.
    pub fn with_prior(mut self, log_mean: f64, log_var: f64) -> Result<Self> {
        if !(log_var > 0.0) {
            return Err(Error::NonPositiveVariance(log_var));
        }
        self.prior_log_mean = log_mean;
        self.prior_log_var = log_var;
        Ok(self)
    }

    pub fn particles(&self) -> usize {
        self.particles
    }

    /// Mean and variance of `ln x_1`.
    pub fn prior(&self) -> (f64, f64) {
        (self.prior_log_mean, self.prior_log_var)
    }

    fn sample_prior<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let e: f64 = StandardNormal.sample(rng);
        self.prior_log_mean + self.prior_log_var.sqrt() * e
    }

    /// Simulates the latent log-state path at the given times.
    pub fn simulate_log_path<R: Rng + ?Sized>(&self, sigma: f64, times: &[f64], rng: &mut R) -> Vec<f64> {
        let mut path = Vec::with_capacity(times.len());
        let mut lx = self.sample_prior(rng);
        path.push(lx);
        for w in times.windows(2) {
            let e: f64 = StandardNormal.sample(rng);
            lx += sigma * (w[1] - w[0]).sqrt() * e;
            path.push(lx);
        }
        path
    }

    /// Bootstrap particle filter with multinomial resampling at every step.
    /// Returns `z_i = ln((1/K) Σ_k p(y_i | x_i^(k)))` for each time.
    pub fn particle_filter(&self, sigma: f64, tau: f64, data: &Dataset, rng: &mut DccRng) -> Result<Vec<f64>> {
        self.check_data(data)?;
        let times = data.timestamps().ok_or(Error::MissingTimestamps)?;
        let k = self.particles;
        let ln_k = (k as f64).ln();
        let r = 1.0 / tau;
        let ln_tau = tau.ln();

        let mut lx: Vec<f64> = (0..k).map(|_| self.sample_prior(rng)).collect();
        let mut next = vec![0.0; k];
        let mut logw = vec![0.0; k];
        let mut cum = vec![0.0; k];
        let mut z = Vec::with_capacity(data.n());

        for (i, y) in data.points().enumerate() {
            if i > 0 {
                let sd = sigma * (times[i] - times[i - 1]).sqrt();
                for v in lx.iter_mut() {
                    let e: f64 = StandardNormal.sample(rng);
                    *v += sd * e;
                }
            }
            let total: f64 = y.iter().sum();
            let c: f64 = y.iter().map(|&yj| ln_gamma_ratio(yj, r) - ln_factorial(yj)).sum();
            let size = y.len() as f64 * r + total;
            let mut max = f64::NEG_INFINITY;
            for (w, &l) in logw.iter_mut().zip(&lx) {
                let s = ln_tau + l;
                *w = c - size * softplus(s) + total * s;
                if *w > max {
                    max = *w;
                }
            }
            if !max.is_finite() {
                return Err(Error::ParticleCollapse { step: i });
            }
            let mut acc = 0.0;
            for (cw, &w) in cum.iter_mut().zip(&logw) {
                acc += (w - max).exp();
                *cw = acc;
            }
            z.push(max + acc.ln() - ln_k);

            if i + 1 < data.n() {
                multinomial_resample(&cum, &lx, &mut next, rng);
                std::mem::swap(&mut lx, &mut next);
            }
        }
        Ok(z)
    }
}

/// Draws `out.len()` ancestors from the unnormalized cumulative weights
/// `cum` using sorted uniforms built from exponential spacings.
fn multinomial_resample(cum: &[f64], src: &[f64], out: &mut [f64], rng: &mut DccRng) {
    let k = out.len();
    let total = cum[cum.len() - 1];
    // Spacings E_1..E_{k+1}; the partial sums over the full sum are sorted
    // uniforms.
    let spacings: Vec<f64> = (0..=k).map(|_| Exp1.sample(rng)).collect();
    let norm: f64 = spacings.iter().sum();
    let scale = total / norm;
    let mut u = 0.0;
    let mut j = 0;
    for (slot, e) in out.iter_mut().zip(&spacings) {
        u += e * scale;
        while j + 1 < cum.len() && cum[j] < u {
            j += 1;
        }
        *slot = src[j];
    }
}

impl ModelClass for KangarooSsm {
    fn name(&self) -> String {
        format!("kangaroo-ssm:K={}", self.particles)
    }

    fn param_space(&self) -> ParamSpace {
        ParamSpace::new([("sigma", Support::Positive), ("tau", Support::Positive)])
    }

    fn simulate(&self, theta: &ParamVector, template: &Dataset, rng: &mut DccRng) -> Result<Dataset> {
        let times = template.timestamps().ok_or(Error::MissingTimestamps)?;
        let (sigma, tau) = (theta.get(0), theta.get(1));
        let shape = 1.0 / tau;
        let d = template.dim();
        let path = self.simulate_log_path(sigma, times, rng);
        let mut values = Vec::with_capacity(template.n() * d);
        for lx in path {
            let gamma = Gamma::new(shape, tau * lx.exp()).map_err(|e| Error::InvalidParameter(e.to_string()))?;
            for _ in 0..d {
                let lambda: f64 = gamma.sample(rng);
                values.push(sample_poisson(lambda, rng));
            }
        }
        Ok(template.like(values))
    }

    fn incremental_logliks(&self, theta: &ParamVector, data: &Dataset, rng: &mut DccRng) -> Result<Vec<f64>> {
        self.particle_filter(theta.get(0), theta.get(1), data, rng)
    }

    fn is_exact_likelihood(&self) -> bool {
        false
    }

    fn check_data(&self, data: &Dataset) -> Result<()> {
        if data.timestamps().is_none() {
            return Err(Error::MissingTimestamps);
        }
        data.values().iter().try_for_each(|&y| check_count(y))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Streams;

    fn theta(sigma: f64, tau: f64) -> ParamVector {
        ParamVector::new(&KangarooSsm::new(100).unwrap().param_space(), vec![sigma, tau]).unwrap()
    }

    #[test]
    fn default_prior_has_log_sd_five() {
        assert_eq!(KangarooSsm::new(100).unwrap().prior(), (0.0, 25.0));
    }

    #[test]
    fn rejects_too_few_particles() {
        assert!(KangarooSsm::new(99).is_err());
    }

    #[test]
    fn zero_diffusion_keeps_latent_constant() {
        let m = KangarooSsm::new(100).unwrap();
        let times: Vec<f64> = (0..20).map(|i| i as f64 * 0.3).collect();
        let path = m.simulate_log_path(0.0, &times, &mut Streams::new(3).rng());
        assert!(path.iter().all(|&v| v == path[0]));
    }

    #[test]
    fn transition_has_lognormal_mean() {
        // E[x_{t+1}/x_t] = exp(σ²/2) for Δ = 1.
        let m = KangarooSsm::new(100).unwrap();
        let sigma = 0.2;
        let mut rng = Streams::new(11).rng();
        let n = 100_000;
        let mean = (0..n)
            .map(|_| {
                let p = m.simulate_log_path(sigma, &[0.0, 1.0], &mut rng);
                (p[1] - p[0]).exp()
            })
            .sum::<f64>()
            / n as f64;
        let want = (sigma * sigma / 2.0).exp();
        assert!((mean / want - 1.0).abs() < 0.005, "{mean} vs {want}");
    }

    #[test]
    fn small_tau_observations_are_poisson_like() {
        // One time point, latent pinned by a degenerate prior.
        let x: f64 = 50.0;
        let m = KangarooSsm::new(100).unwrap().with_prior(x.ln(), 1e-300).unwrap();
        let template = Dataset::new(vec![vec![0.0; 2]; 1], Some(vec![0.0])).unwrap();
        let th = theta(0.1, 1e-6);
        let mut rng = Streams::new(2).rng();
        let draws: Vec<f64> = (0..50_000)
            .flat_map(|_| m.simulate(&th, &template, &mut rng).unwrap().values().to_vec())
            .collect();
        let n = draws.len() as f64;
        let mean = draws.iter().sum::<f64>() / n;
        let var = draws.iter().map(|y| (y - mean).powi(2)).sum::<f64>() / (n - 1.0);
        assert!((var / mean - 1.0).abs() < 0.02, "ratio {}", var / mean);
    }

    #[test]
    fn overdispersed_observations() {
        let x: f64 = 300.0;
        let tau = 0.05;
        let m = KangarooSsm::new(100).unwrap().with_prior(x.ln(), 1e-300).unwrap();
        let template = Dataset::new(vec![vec![0.0; 2]; 1], Some(vec![0.0])).unwrap();
        let th = theta(0.1, tau);
        let mut rng = Streams::new(9).rng();
        let draws: Vec<f64> = (0..50_000)
            .flat_map(|_| m.simulate(&th, &template, &mut rng).unwrap().values().to_vec())
            .collect();
        let n = draws.len() as f64;
        let mean = draws.iter().sum::<f64>() / n;
        let var = draws.iter().map(|y| (y - mean).powi(2)).sum::<f64>() / (n - 1.0);
        assert!((mean / x - 1.0).abs() < 0.01);
        assert!((var / (x + tau * x * x) - 1.0).abs() < 0.05);
    }

    #[test]
    fn zero_counts_stay_finite() {
        let m = KangarooSsm::new(500).unwrap();
        let n = 30;
        let data = Dataset::new(vec![vec![0.0, 0.0]; n], Some((0..n).map(|i| i as f64 * 0.25).collect())).unwrap();
        let z = m
            .particle_filter(0.05, 1e-4, &data, &mut Streams::new(1).rng())
            .unwrap();
        assert!(z.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn resampling_follows_weights() {
        let mut rng = Streams::new(4).rng();
        let cum = [1.0, 1.0, 4.0];
        let src = [0.0, 1.0, 2.0];
        let mut out = vec![0.0; 40_000];
        multinomial_resample(&cum, &src, &mut out, &mut rng);
        let frac0 = out.iter().filter(|&&v| v == 0.0).count() as f64 / out.len() as f64;
        let frac1 = out.iter().filter(|&&v| v == 1.0).count();
        assert!((frac0 - 0.25).abs() < 0.01);
        assert_eq!(frac1, 0);
    }
}
