use rand_distr::{Distribution, Normal};

use super::gaussian_logpdf_unchecked;
use crate::data::Dataset;
use crate::error::Result;
use crate::model::ModelClass;
use crate::param::{ParamSpace, ParamVector, Support};
use crate::rng::DccRng;

/// Independent univariate Gaussian data, either the single model `N(0, 1)`
/// or the free class `N(μ, σ²)` with `θ = (μ, σ²)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GaussianIid {
    Fixed,
    Free,
}

impl GaussianIid {
    fn mean_var(&self, theta: &ParamVector) -> (f64, f64) {
        match self {
            GaussianIid::Fixed => (0.0, 1.0),
            GaussianIid::Free => (theta.get(0), theta.get(1)),
        }
    }
}

impl ModelClass for GaussianIid {
    fn name(&self) -> String {
        match self {
            GaussianIid::Fixed => "gaussian-fixed".into(),
            GaussianIid::Free => "gaussian".into(),
        }
    }

    fn param_space(&self) -> ParamSpace {
        match self {
            GaussianIid::Fixed => ParamSpace::empty(),
            GaussianIid::Free => ParamSpace::new([("mu", Support::Real), ("sigma2", Support::Positive)]),
        }
    }

    fn simulate(&self, theta: &ParamVector, template: &Dataset, rng: &mut DccRng) -> Result<Dataset> {
        let (m, v) = self.mean_var(theta);
        let dist = Normal::new(m, v.sqrt()).expect("positive variance");
        Ok(template.like((0..template.n()).map(|_| dist.sample(rng)).collect()))
    }

    fn incremental_logliks(&self, theta: &ParamVector, data: &Dataset, _rng: &mut DccRng) -> Result<Vec<f64>> {
        self.check_data(data)?;
        let (m, v) = self.mean_var(theta);
        Ok(data
            .values()
            .iter()
            .map(|&y| gaussian_logpdf_unchecked(y, m, v))
            .collect())
    }

    fn is_iid(&self) -> bool {
        true
    }

    fn check_data(&self, data: &Dataset) -> Result<()> {
        data.require_dim(1)
    }
}
