use rand_distr::{Distribution, StandardNormal};

use super::gaussian_logpdf_unchecked;
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::model::ModelClass;
use crate::param::{ParamSpace, ParamVector, Support};
use crate::rng::DccRng;

/// Incremental log-likelihoods of a stationary AR(1) path:
/// `z_1 = ln N(y_1; 0, σ²/(1-a²))`, `z_i = ln N(y_i; a·y_{i-1}, σ²)`.
pub fn ar1_incremental_logliks(a: f64, var: f64, y: &[f64]) -> Result<Vec<f64>> {
    if !(a.abs() < 1.0) {
        return Err(Error::NonStationaryCoefficient(a));
    }
    if !(var > 0.0) {
        return Err(Error::NonPositiveVariance(var));
    }
    let mut z = Vec::with_capacity(y.len());
    if let Some(&y0) = y.first() {
        z.push(gaussian_logpdf_unchecked(y0, 0.0, var / (1.0 - a * a)));
    }
    z.extend(y.windows(2).map(|w| gaussian_logpdf_unchecked(w[1], a * w[0], var)));
    Ok(z)
}

/// First-order linear autoregression `y_i = a y_{i-1} + e_i`,
/// `e_i ~ N(0, σ²)`, started from its stationary law; `θ = (a, σ²)`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LinearAr1;

impl ModelClass for LinearAr1 {
    fn name(&self) -> String {
        "ar1".into()
    }

    fn param_space(&self) -> ParamSpace {
        ParamSpace::new([
            ("a", Support::Interval { lo: -1.0, hi: 1.0 }),
            ("sigma2", Support::Positive),
        ])
    }

    fn simulate(&self, theta: &ParamVector, template: &Dataset, rng: &mut DccRng) -> Result<Dataset> {
        let (a, var) = (theta.get(0), theta.get(1));
        let sd = var.sqrt();
        let mut y = Vec::with_capacity(template.n());
        let mut prev = {
            let e: f64 = StandardNormal.sample(rng);
            e * sd / (1.0 - a * a).sqrt()
        };
        y.push(prev);
        for _ in 1..template.n() {
            let e: f64 = StandardNormal.sample(rng);
            prev = a * prev + sd * e;
            y.push(prev);
        }
        Ok(template.like(y))
    }

    fn incremental_logliks(&self, theta: &ParamVector, data: &Dataset, _rng: &mut DccRng) -> Result<Vec<f64>> {
        self.check_data(data)?;
        ar1_incremental_logliks(theta.get(0), theta.get(1), data.values())
    }

    fn check_data(&self, data: &Dataset) -> Result<()> {
        data.require_dim(1)
    }
}

/// Data generator `y_i = max(0.7 y_{i-1} + e_i, -0.3)`, `e_i ~ N(0, 1)`,
/// started at `y_0 = 0`. It has no likelihood and is not a model class.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaturatedAr1Generator {
    pub coefficient: f64,
    pub floor: f64,
    pub noise_sd: f64,
}

impl Default for SaturatedAr1Generator {
    fn default() -> Self {
        Self {
            coefficient: 0.7,
            floor: -0.3,
            noise_sd: 1.0,
        }
    }
}

impl SaturatedAr1Generator {
    pub fn generate(&self, n: usize, rng: &mut DccRng) -> Dataset {
        let mut prev = 0.0;
        let y = (0..n)
            .map(|_| {
                let e: f64 = StandardNormal.sample(rng);
                prev = (self.coefficient * prev + self.noise_sd * e).max(self.floor);
                prev
            })
            .collect();
        Dataset::univariate(y).expect("generator output is finite and nonempty")
    }
}
