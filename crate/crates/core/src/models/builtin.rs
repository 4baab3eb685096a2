use super::{GaussianIid, KangarooSsm, LinearAr1, NegBinomialModel, PoissonModel, PolyRegression};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::model::ModelClass;
use crate::param::{ParamSpace, ParamVector};
use crate::rng::DccRng;

/// Any of the built-in classes, selected by a specification string:
/// `gaussian-fixed`, `gaussian`, `poisson`, `negbin`, `polyreg:k=<order>`,
/// `ar1`, `kangaroo-ssm:K=<particles>`.
#[derive(Debug, Clone, PartialEq)]
pub enum BuiltinModel {
    Gaussian(GaussianIid),
    Poisson(PoissonModel),
    NegBinomial(NegBinomialModel),
    PolyRegression(PolyRegression),
    Ar1(LinearAr1),
    Kangaroo(KangarooSsm),
}

fn option_value<'a>(spec: &'a str, rest: &'a str, key: &str) -> Result<&'a str> {
    rest.strip_prefix(':')
        .and_then(|r| r.strip_prefix(key))
        .and_then(|r| r.strip_prefix('='))
        .ok_or_else(|| Error::UnknownModel(spec.to_string()))
}

impl BuiltinModel {
    /// Builds a model from its specification. `data` supplies the covariate
    /// grid for polynomial regression.
    pub fn parse(spec: &str, data: &Dataset) -> Result<Self> {
        let (head, rest) = spec.split_at(spec.find(':').unwrap_or(spec.len()));
        let bad = || Error::UnknownModel(spec.to_string());
        let no_options = |m: Self| if rest.is_empty() { Ok(m) } else { Err(bad()) };
        match head {
            "gaussian-fixed" => no_options(Self::Gaussian(GaussianIid::Fixed)),
            "gaussian" => no_options(Self::Gaussian(GaussianIid::Free)),
            "poisson" => no_options(Self::Poisson(PoissonModel)),
            "negbin" => no_options(Self::NegBinomial(NegBinomialModel)),
            "ar1" => no_options(Self::Ar1(LinearAr1)),
            "polyreg" => {
                let k = option_value(spec, rest, "k")?.parse().map_err(|_| bad())?;
                Ok(Self::PolyRegression(PolyRegression::for_data(k, data)?))
            }
            "kangaroo-ssm" => {
                let particles = if rest.is_empty() {
                    KangarooSsm::DEFAULT_PARTICLES
                } else {
                    option_value(spec, rest, "K")?.parse().map_err(|_| bad())?
                };
                Ok(Self::Kangaroo(KangarooSsm::new(particles)?))
            }
            _ => Err(bad()),
        }
    }

    fn inner(&self) -> &dyn ModelClass {
        match self {
            Self::Gaussian(m) => m,
            Self::Poisson(m) => m,
            Self::NegBinomial(m) => m,
            Self::PolyRegression(m) => m,
            Self::Ar1(m) => m,
            Self::Kangaroo(m) => m,
        }
    }
}

impl ModelClass for BuiltinModel {
    fn name(&self) -> String {
        self.inner().name()
    }
    fn param_space(&self) -> ParamSpace {
        self.inner().param_space()
    }
    fn simulate(&self, theta: &ParamVector, template: &Dataset, rng: &mut DccRng) -> Result<Dataset> {
        self.inner().simulate(theta, template, rng)
    }
    fn incremental_logliks(&self, theta: &ParamVector, data: &Dataset, rng: &mut DccRng) -> Result<Vec<f64>> {
        self.inner().incremental_logliks(theta, data, rng)
    }
    fn is_exact_likelihood(&self) -> bool {
        self.inner().is_exact_likelihood()
    }
    fn is_iid(&self) -> bool {
        self.inner().is_iid()
    }
    fn check_data(&self, data: &Dataset) -> Result<()> {
        self.inner().check_data(data)
    }
}
