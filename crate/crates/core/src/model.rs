//! The behavioral interface every model class implements.

use crate::data::Dataset;
use crate::error::Result;
use crate::param::{ParamSpace, ParamVector};
use crate::rng::DccRng;

/// A parameterized family of distributions `p(y | θ)` that can both simulate
/// data and evaluate the incremental log-likelihoods
/// `z_i = ln p(y_i | y_1, ..., y_{i-1}, θ)`.
///
/// Implementations must be reentrant: the engine calls them concurrently
/// with distinct generators.
pub trait ModelClass: Send + Sync {
    /// Short identifier used in reports.
    fn name(&self) -> String;

    fn param_space(&self) -> ParamSpace;

    /// Draws a dataset with the template's `n`, dimension and timestamps.
    fn simulate(&self, theta: &ParamVector, template: &Dataset, rng: &mut DccRng) -> Result<Dataset>;

    /// `(z_1, ..., z_n)`. The generator is only consumed by models whose
    /// likelihood is estimated stochastically.
    fn incremental_logliks(&self, theta: &ParamVector, data: &Dataset, rng: &mut DccRng) -> Result<Vec<f64>>;

    /// `false` for latent-variable models whose `z_i` are estimates.
    fn is_exact_likelihood(&self) -> bool {
        true
    }

    /// Whether the points are independent and identically distributed, so
    /// that the law of `z_i` does not depend on `i`.
    fn is_iid(&self) -> bool {
        false
    }

    /// Checks that `data` has a shape and value type this model can score.
    fn check_data(&self, data: &Dataset) -> Result<()>;

    /// `ln p(y | θ)`, or its estimate for latent-variable models.
    fn log_likelihood(&self, theta: &ParamVector, data: &Dataset, rng: &mut DccRng) -> Result<f64> {
        Ok(self.incremental_logliks(theta, data, rng)?.iter().sum())
    }
}

impl<M: ModelClass + ?Sized> ModelClass for &M {
    fn name(&self) -> String {
        (**self).name()
    }
    fn param_space(&self) -> ParamSpace {
        (**self).param_space()
    }
    fn simulate(&self, theta: &ParamVector, template: &Dataset, rng: &mut DccRng) -> Result<Dataset> {
        (**self).simulate(theta, template, rng)
    }
    fn incremental_logliks(&self, theta: &ParamVector, data: &Dataset, rng: &mut DccRng) -> Result<Vec<f64>> {
        (**self).incremental_logliks(theta, data, rng)
    }
    fn is_exact_likelihood(&self) -> bool {
        (**self).is_exact_likelihood()
    }
    fn is_iid(&self) -> bool {
        (**self).is_iid()
    }
    fn check_data(&self, data: &Dataset) -> Result<()> {
        (**self).check_data(data)
    }
    fn log_likelihood(&self, theta: &ParamVector, data: &Dataset, rng: &mut DccRng) -> Result<f64> {
        (**self).log_likelihood(theta, data, rng)
    }
}
