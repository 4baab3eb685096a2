//! Parameter weighting: point estimates and Metropolis–Hastings samplers
//! over `w(θ | ŷ) ∝ p(ŷ | θ) w_0(θ)`.

mod mcmc;
mod mle;

pub use mcmc::{fd_hessian, ChainOutput, MhSampler, PmmhSampler, Proposal, ACCEPTANCE_RANGE};
pub use mle::{mle_ar1, mle_gaussian, mle_negbin, mle_poisson, mle_polyreg};

use crate::config::{DccConfig, SamplerDiagnostics, WeightMode};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::model::ModelClass;
use crate::models::{
    BuiltinModel, GaussianIid, KangarooSsm, LinearAr1, NegBinomialModel, PoissonModel, PolyRegression,
};
use crate::param::ParamVector;
use crate::rng::{DccRng, Streams};

/// Parameter draws and how they were obtained.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightDraws {
    pub thetas: Vec<ParamVector>,
    pub diagnostics: SamplerDiagnostics,
}

/// Produces `N` parameter draws distributed according to the weights.
pub trait WeightSampler: Send + Sync {
    fn draw(&self, n: usize, rng: &mut DccRng) -> Result<WeightDraws>;
}

/// All weight on a single parameter value.
#[derive(Debug, Clone, PartialEq)]
pub struct PointMass {
    theta: ParamVector,
    kind: String,
}

impl PointMass {
    pub fn new(theta: ParamVector, kind: impl Into<String>) -> Self {
        Self {
            theta,
            kind: kind.into(),
        }
    }

    pub fn theta(&self) -> &ParamVector {
        &self.theta
    }
}

impl WeightSampler for PointMass {
    fn draw(&self, n: usize, _rng: &mut DccRng) -> Result<WeightDraws> {
        Ok(WeightDraws {
            thetas: vec![self.theta.clone(); n],
            diagnostics: SamplerDiagnostics {
                kind: self.kind.clone(),
                start: self.theta.values().to_vec(),
                ..Default::default()
            },
        })
    }
}

/// Model classes with a maximum-likelihood fitter.
pub trait MaximumLikelihood: ModelClass {
    fn mle(&self, data: &Dataset) -> Result<ParamVector>;

    /// Where an MCMC chain starts. Defaults to the MLE.
    fn chain_start(&self, data: &Dataset) -> Result<ParamVector> {
        self.mle(data)
    }
}

impl MaximumLikelihood for GaussianIid {
    fn mle(&self, data: &Dataset) -> Result<ParamVector> {
        match self {
            GaussianIid::Fixed => Ok(ParamVector::empty()),
            GaussianIid::Free => {
                let (m, v) = mle_gaussian(data)?;
                ParamVector::new(&self.param_space(), vec![m, v])
            }
        }
    }
}

impl MaximumLikelihood for PoissonModel {
    fn mle(&self, data: &Dataset) -> Result<ParamVector> {
        ParamVector::new(&self.param_space(), vec![mle_poisson(data)?])
    }
}

/// Dispersion used to start a negative binomial chain when the data are not
/// overdispersed and the likelihood increases towards the Poisson limit.
pub const NEGBIN_POISSON_LIMIT_SIZE: f64 = 1e3;

impl MaximumLikelihood for NegBinomialModel {
    fn mle(&self, data: &Dataset) -> Result<ParamVector> {
        let (r, p) = mle_negbin(data)?;
        ParamVector::new(&self.param_space(), vec![r, p])
    }

    fn chain_start(&self, data: &Dataset) -> Result<ParamVector> {
        match mle_negbin(data) {
            Ok((r, p)) => ParamVector::new(&self.param_space(), vec![r, p]),
            Err(Error::Underdispersed { mean, .. }) => {
                let r = NEGBIN_POISSON_LIMIT_SIZE * mean.max(1.0);
                ParamVector::new(&self.param_space(), vec![r, r / (r + mean)])
            }
            Err(e) => Err(e),
        }
    }
}

impl MaximumLikelihood for PolyRegression {
    fn mle(&self, data: &Dataset) -> Result<ParamVector> {
        let (mut beta, v) = mle_polyreg(data, self.covariates(), self.order())?;
        if !(v > 0.0) {
            return Err(Error::ZeroVariance);
        }
        beta.push(v);
        ParamVector::new(&self.param_space(), beta)
    }
}

impl MaximumLikelihood for LinearAr1 {
    fn mle(&self, data: &Dataset) -> Result<ParamVector> {
        let (a, v) = mle_ar1(data)?;
        ParamVector::new(&self.param_space(), vec![a, v])
    }
}

/// Seed for the common random numbers used when maximizing the
/// particle-filter likelihood estimate.
pub const KANGAROO_SEARCH_SEED: u64 = 0x6b61_6e67;

impl MaximumLikelihood for KangarooSsm {
    /// Approximate maximizer of the particle-filter likelihood estimate.
    fn mle(&self, data: &Dataset) -> Result<ParamVector> {
        mcmc::kangaroo_search(self, data, Streams::new(KANGAROO_SEARCH_SEED))
    }
}

impl MaximumLikelihood for BuiltinModel {
    fn mle(&self, data: &Dataset) -> Result<ParamVector> {
        match self {
            BuiltinModel::Gaussian(m) => m.mle(data),
            BuiltinModel::Poisson(m) => m.mle(data),
            BuiltinModel::NegBinomial(m) => m.mle(data),
            BuiltinModel::PolyRegression(m) => m.mle(data),
            BuiltinModel::Ar1(m) => m.mle(data),
            BuiltinModel::Kangaroo(m) => m.mle(data),
        }
    }

    fn chain_start(&self, data: &Dataset) -> Result<ParamVector> {
        match self {
            BuiltinModel::NegBinomial(m) => m.chain_start(data),
            other => other.mle(data),
        }
    }
}

/// Builds the weight sampler selected by `config.weight_mode`.
pub fn build_sampler(model: &BuiltinModel, data: &Dataset, config: &DccConfig) -> Result<Box<dyn WeightSampler>> {
    match config.weight_mode {
        WeightMode::PointMle => Ok(Box::new(PointMass::new(model.mle(data)?, "point-mle"))),
        WeightMode::Mh => Ok(Box::new(MhSampler::new(model.clone(), data.clone(), &config.mcmc)?)),
        WeightMode::Pmmh => match model {
            BuiltinModel::Kangaroo(m) => Ok(Box::new(PmmhSampler::new(
                m.clone(),
                data.clone(),
                &config.mcmc,
                config.seed,
            )?)),
            other => Err(Error::InvalidConfig(format!(
                "particle-marginal sampling needs a latent-variable model, got {}",
                other.name()
            ))),
        },
    }
}
