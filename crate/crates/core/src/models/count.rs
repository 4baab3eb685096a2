use super::{check_count, negbin_logpmf_unchecked, poisson_logpmf_unchecked, sample_negbin, sample_poisson};
use crate::data::Dataset;
use crate::error::Result;
use crate::model::ModelClass;
use crate::param::{ParamSpace, ParamVector, Support};
use crate::rng::DccRng;

fn check_counts(data: &Dataset) -> Result<()> {
    data.require_dim(1)?;
    data.values().iter().try_for_each(|&y| check_count(y))
}

/// Independent Poisson counts, `θ = (λ)`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PoissonModel;

impl ModelClass for PoissonModel {
    fn name(&self) -> String {
        "poisson".into()
    }

    fn param_space(&self) -> ParamSpace {
        ParamSpace::new([("lambda", Support::Positive)])
    }

    fn simulate(&self, theta: &ParamVector, template: &Dataset, rng: &mut DccRng) -> Result<Dataset> {
        let lambda = theta.get(0);
        Ok(template.like((0..template.n()).map(|_| sample_poisson(lambda, rng)).collect()))
    }

    fn incremental_logliks(&self, theta: &ParamVector, data: &Dataset, _rng: &mut DccRng) -> Result<Vec<f64>> {
        check_counts(data)?;
        let lambda = theta.get(0);
        Ok(data
            .values()
            .iter()
            .map(|&y| poisson_logpmf_unchecked(y, lambda))
            .collect())
    }

    fn is_iid(&self) -> bool {
        true
    }

    fn check_data(&self, data: &Dataset) -> Result<()> {
        check_counts(data)
    }
}

/// Independent negative binomial counts, `θ = (r, p)`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct NegBinomialModel;

impl ModelClass for NegBinomialModel {
    fn name(&self) -> String {
        "negbin".into()
    }

    fn param_space(&self) -> ParamSpace {
        ParamSpace::new([("r", Support::Positive), ("p", Support::Interval { lo: 0.0, hi: 1.0 })])
    }

    fn simulate(&self, theta: &ParamVector, template: &Dataset, rng: &mut DccRng) -> Result<Dataset> {
        let (r, p) = (theta.get(0), theta.get(1));
        Ok(template.like((0..template.n()).map(|_| sample_negbin(r, p, rng)).collect()))
    }

    fn incremental_logliks(&self, theta: &ParamVector, data: &Dataset, _rng: &mut DccRng) -> Result<Vec<f64>> {
        check_counts(data)?;
        let (r, p) = (theta.get(0), theta.get(1));
        Ok(data
            .values()
            .iter()
            .map(|&y| negbin_logpmf_unchecked(y, r, p))
            .collect())
    }

    fn is_iid(&self) -> bool {
        true
    }

    fn check_data(&self, data: &Dataset) -> Result<()> {
        check_counts(data)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Streams;

    #[test]
    fn non_integer_data_rejected_at_evaluation() {
        let d = Dataset::univariate(vec![1.0, 2.5]).unwrap();
        let theta = ParamVector::new(&PoissonModel.param_space(), vec![1.0]).unwrap();
        let mut rng = Streams::new(0).rng();
        assert!(PoissonModel.incremental_logliks(&theta, &d, &mut rng).is_err());
        let theta = ParamVector::new(&NegBinomialModel.param_space(), vec![1.0, 0.5]).unwrap();
        assert!(NegBinomialModel.incremental_logliks(&theta, &d, &mut rng).is_err());
    }

    #[test]
    fn simulated_counts_are_valid() {
        let template = Dataset::univariate(vec![0.0; 500]).unwrap();
        let mut rng = Streams::new(1).rng();
        let theta = ParamVector::new(&NegBinomialModel.param_space(), vec![0.7, 0.01]).unwrap();
        let sim = NegBinomialModel.simulate(&theta, &template, &mut rng).unwrap();
        assert!(check_counts(&sim).is_ok());
    }
}
