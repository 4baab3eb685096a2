//! Run configuration and result records.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How parameter draws `θ^(j)` are produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightMode {
    /// Point mass at the maximum-likelihood estimate.
    PointMle,
    /// Random-walk Metropolis–Hastings on the exact likelihood.
    Mh,
    /// Particle-marginal Metropolis–Hastings.
    Pmmh,
}

impl std::str::FromStr for WeightMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mle" | "point-mle" => Ok(Self::PointMle),
            "mh" => Ok(Self::Mh),
            "pmmh" => Ok(Self::Pmmh),
            other => Err(Error::InvalidConfig(format!("unknown weight mode `{other}`"))),
        }
    }
}

/// Coordinates in which the initial weight `w_0` is flat.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FlatPrior {
    /// `w_0 ≡ 1` in the model's own parameterization; the sampler adds the
    /// log-Jacobian of its reparameterization.
    Original,
    /// `w_0 ≡ 1` on the log/atanh scale the sampler walks on.
    Unconstrained,
    /// `w_0 ≡ 1` on the log of positive parameters and in the original
    /// coordinates of real and interval-valued ones.
    LogScale,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McmcSettings {
    pub burn_in: usize,
    /// Steps between retained states; `None` picks 10.
    pub thin: Option<usize>,
    /// Multiplier on the automatically chosen proposal scales.
    pub scale: f64,
    /// Overrides the per-coordinate proposal scales entirely.
    pub proposal_scales: Option<Vec<f64>>,
    /// `None` takes the sampler's default ([`FlatPrior::LogScale`] for MH,
    /// [`FlatPrior::Unconstrained`] for PMMH).
    pub prior: Option<FlatPrior>,
}

impl Default for McmcSettings {
    fn default() -> Self {
        Self {
            burn_in: 1000,
            thin: None,
            scale: 1.0,
            proposal_scales: None,
            prior: None,
        }
    }
}

impl McmcSettings {
    pub const DEFAULT_THIN: usize = 10;

    pub fn thin(&self) -> usize {
        self.thin.unwrap_or(Self::DEFAULT_THIN).max(1)
    }
}

/// Which tail event is counted when comparing simulated and observed
/// statistics. Both yield the same criterion; the complement exists so the
/// symmetry of the final `min` can be checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TailEvent {
    /// `T̃ > T̂`
    #[default]
    Exceeds,
    /// `T̃ ≤ T̂`, converted back to the exceedance count.
    Complement,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DccConfig {
    /// `N`, parameter draws.
    pub n_theta: usize,
    /// `M`, test replicates per draw.
    pub m_test: usize,
    /// `M′`, moment-calibration replicates per draw.
    pub m_cal: usize,
    pub seed: u64,
    pub weight_mode: WeightMode,
    pub mcmc: McmcSettings,
    /// Particle count for latent-variable likelihood estimates.
    pub particles: usize,
    /// Pool all `n·M′` simulated log-likelihoods into one mean/variance.
    /// Only valid for iid models.
    pub pool_iid_moments: bool,
    pub tail_event: TailEvent,
}

impl Default for DccConfig {
    fn default() -> Self {
        Self {
            n_theta: 200,
            m_test: 200,
            m_cal: 200,
            seed: 0,
            weight_mode: WeightMode::Mh,
            mcmc: McmcSettings::default(),
            particles: 2000,
            pool_iid_moments: false,
            tail_event: TailEvent::Exceeds,
        }
    }
}

impl DccConfig {
    pub fn new(n_theta: usize, m_test: usize, m_cal: usize, seed: u64) -> Self {
        Self {
            n_theta,
            m_test,
            m_cal,
            seed,
            ..Self::default()
        }
    }

    pub fn with_weights(mut self, mode: WeightMode) -> Self {
        self.weight_mode = mode;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_theta < 1 {
            return Err(Error::InvalidConfig("N must be at least 1".into()));
        }
        if self.m_test < 2 || self.m_cal < 2 {
            return Err(Error::InvalidConfig("M and M' must be at least 2".into()));
        }
        if !(self.mcmc.scale > 0.0 && self.mcmc.scale.is_finite()) {
            return Err(Error::InvalidConfig(
                "proposal scale multiplier must be positive".into(),
            ));
        }
        if let Some(s) = &self.mcmc.proposal_scales {
            if s.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
                return Err(Error::InvalidConfig("proposal scales must be positive".into()));
            }
        }
        Ok(())
    }
}

/// Diagnostics reported by a weight sampler.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SamplerDiagnostics {
    pub kind: String,
    pub acceptance_rate: Option<f64>,
    pub steps: usize,
    pub likelihood_evaluations: usize,
    pub start: Vec<f64>,
    pub proposal_scales: Vec<f64>,
    pub warnings: Vec<String>,
}

/// Outcome of one run of the criterion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DccResult {
    pub model: String,
    /// `pfa_u^(j)`, one per parameter draw.
    pub pfa_u_per_draw: Vec<f64>,
    /// Averaged under-dispersion false-alarm probability.
    pub pfa_u_star: f64,
    /// `min(pfa_u_star, 1 - pfa_u_star)`.
    pub pfa_star: f64,
    /// Observed statistic `T̂^(j)` per draw.
    pub t_obs_per_draw: Vec<f64>,
    /// Number of simulated statistics exceeding `T̂^(j)`, per draw.
    pub exceed_counts: Vec<usize>,
    pub thetas: Vec<Vec<f64>>,
    pub sampler: SamplerDiagnostics,
    pub config: DccConfig,
    /// Wall-clock seconds; excluded from reproducibility comparisons.
    pub elapsed_secs: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weight_mode_names() {
        assert_eq!("mle".parse::<WeightMode>().unwrap(), WeightMode::PointMle);
        assert_eq!("point-mle".parse::<WeightMode>().unwrap(), WeightMode::PointMle);
        assert_eq!("mh".parse::<WeightMode>().unwrap(), WeightMode::Mh);
        assert_eq!("pmmh".parse::<WeightMode>().unwrap(), WeightMode::Pmmh);
        assert!("gibbs".parse::<WeightMode>().is_err());
    }
}
