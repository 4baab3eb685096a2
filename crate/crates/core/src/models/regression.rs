use rand_distr::{Distribution, Normal};

use super::gaussian_logpdf_unchecked;
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::model::ModelClass;
use crate::param::{ParamSpace, ParamVector, Support};
use crate::rng::DccRng;

/// `n` equally spaced points on `[-25, 25]`.
pub fn default_covariates(n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![0.0];
    }
    (0..n).map(|i| -25.0 + 50.0 * i as f64 / (n - 1) as f64).collect()
}

/// Polynomial regression of order `k` with iid Gaussian noise on a fixed
/// covariate grid: `y_i = Σ_j β_j x_i^j + e_i`, `θ = (β_0, ..., β_k, σ²)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyRegression {
    order: usize,
    covariates: Vec<f64>,
}

impl PolyRegression {
    pub fn new(order: usize, covariates: Vec<f64>) -> Result<Self> {
        if covariates.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter("non-finite covariate".into()));
        }
        Ok(Self { order, covariates })
    }

    /// Covariates taken from the dataset's timestamps when present,
    /// otherwise the default grid of matching length.
    pub fn for_data(order: usize, data: &Dataset) -> Result<Self> {
        let x = match data.timestamps() {
            Some(t) => t.to_vec(),
            None => default_covariates(data.n()),
        };
        Self::new(order, x)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn covariates(&self) -> &[f64] {
        &self.covariates
    }

    /// `Σ_j β_j x^j` by Horner's rule.
    pub fn mean_at(&self, beta: &[f64], x: f64) -> f64 {
        beta.iter().rev().fold(0.0, |acc, b| acc * x + b)
    }

    fn check_len(&self, n: usize) -> Result<()> {
        if n != self.covariates.len() {
            return Err(Error::LengthMismatch {
                left: n,
                right: self.covariates.len(),
            });
        }
        Ok(())
    }
}

impl ModelClass for PolyRegression {
    fn name(&self) -> String {
        format!("polyreg:k={}", self.order)
    }

    fn param_space(&self) -> ParamSpace {
        let mut params: Vec<_> = (0..=self.order)
            .map(|j| crate::param::ParamSpec {
                name: format!("beta{j}"),
                support: Support::Real,
            })
            .collect();
        params.push(crate::param::ParamSpec {
            name: "sigma2".into(),
            support: Support::Positive,
        });
        ParamSpace { params }
    }

    fn simulate(&self, theta: &ParamVector, template: &Dataset, rng: &mut DccRng) -> Result<Dataset> {
        self.check_len(template.n())?;
        let (beta, var) = theta.values().split_at(self.order + 1);
        let noise = Normal::new(0.0, var[0].sqrt()).expect("positive variance");
        Ok(template.like(
            self.covariates
                .iter()
                .map(|&x| self.mean_at(beta, x) + noise.sample(rng))
                .collect(),
        ))
    }

    fn incremental_logliks(&self, theta: &ParamVector, data: &Dataset, _rng: &mut DccRng) -> Result<Vec<f64>> {
        self.check_data(data)?;
        let (beta, var) = theta.values().split_at(self.order + 1);
        Ok(data
            .values()
            .iter()
            .zip(&self.covariates)
            .map(|(&y, &x)| gaussian_logpdf_unchecked(y, self.mean_at(beta, x), var[0]))
            .collect())
    }

    /// The standardized residuals, hence the `z_i`, are iid.
    fn is_iid(&self) -> bool {
        true
    }

    fn check_data(&self, data: &Dataset) -> Result<()> {
        data.require_dim(1)?;
        self.check_len(data.n())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_spans_axis() {
        let x = default_covariates(50);
        assert_eq!(x[0], -25.0);
        assert_eq!(x[49], 25.0);
        assert!((x[1] - (-23.97)).abs() < 0.01);
    }

    #[test]
    fn horner() {
        let m = PolyRegression::new(2, vec![0.0]).unwrap();
        assert_eq!(m.mean_at(&[1.0, 2.0, 3.0], 2.0), 1.0 + 4.0 + 12.0);
    }

    #[test]
    fn covariate_length_checked() {
        let m = PolyRegression::new(1, default_covariates(5)).unwrap();
        let d = Dataset::univariate(vec![0.0; 4]).unwrap();
        assert!(m.check_data(&d).is_err());
    }
}
