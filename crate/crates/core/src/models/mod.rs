//! Built-in model classes and the density kernels they share.

mod ar;
mod builtin;
mod count;
mod gaussian;
mod kangaroo;
mod regression;

pub use ar::{ar1_incremental_logliks, LinearAr1, SaturatedAr1Generator};
pub use builtin::BuiltinModel;
pub use count::{NegBinomialModel, PoissonModel};
pub use gaussian::GaussianIid;
pub use kangaroo::KangarooSsm;
pub use regression::{default_covariates, PolyRegression};

use rand::Rng;
use rand_distr::{Distribution, Gamma, Poisson};

use crate::error::{Error, Result};
use crate::special::{ln_factorial, ln_gamma_ratio};

const LN_2PI: f64 = 1.837_877_066_409_345_5;

/// `ln N(y; μ, σ²)`.
pub fn gaussian_logpdf(y: f64, mean: f64, var: f64) -> Result<f64> {
    if !(var > 0.0) {
        return Err(Error::NonPositiveVariance(var));
    }
    Ok(gaussian_logpdf_unchecked(y, mean, var))
}

#[inline]
pub(crate) fn gaussian_logpdf_unchecked(y: f64, mean: f64, var: f64) -> f64 {
    -0.5 * (LN_2PI + var.ln()) - 0.5 * (y - mean).powi(2) / var
}

/// Validates that `y` is a nonnegative integer count.
pub fn check_count(y: f64) -> Result<()> {
    if y < 0.0 {
        return Err(Error::NegativeCount(y));
    }
    if y.fract() != 0.0 || !y.is_finite() {
        return Err(Error::NonIntegerCount(y));
    }
    Ok(())
}

/// `ln Poisson(y; λ) = y ln λ - λ - ln y!`.
pub fn poisson_logpmf(y: f64, lambda: f64) -> Result<f64> {
    check_count(y)?;
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidParameter(format!("Poisson rate {lambda}")));
    }
    Ok(poisson_logpmf_unchecked(y, lambda))
}

#[inline]
pub(crate) fn poisson_logpmf_unchecked(y: f64, lambda: f64) -> f64 {
    if y == 0.0 {
        -lambda
    } else {
        y * lambda.ln() - lambda - ln_factorial(y)
    }
}

/// `ln NB(y; r, p) = ln Γ(y+r) - ln Γ(r) - ln y! + r ln p + y ln(1-p)`,
/// the number of failures before the `r`-th success with success
/// probability `p`. Mean `r(1-p)/p`, variance `mean / p`.
pub fn negbin_logpmf(y: f64, r: f64, p: f64) -> Result<f64> {
    check_count(y)?;
    if !(r > 0.0 && r.is_finite()) || !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidParameter(format!("negative binomial r={r}, p={p}")));
    }
    Ok(negbin_logpmf_unchecked(y, r, p))
}

#[inline]
pub(crate) fn negbin_logpmf_unchecked(y: f64, r: f64, p: f64) -> f64 {
    let tail = if y == 0.0 { 0.0 } else { y * (-p).ln_1p() };
    ln_gamma_ratio(y, r) - ln_factorial(y) + r * p.ln() + tail
}

/// Converts a mean/variance pair into `(r, p)`: `p = mean/var`,
/// `r = mean²/(var - mean)`.
pub fn negbin_from_mean_var(mean: f64, var: f64) -> Result<(f64, f64)> {
    if !(mean > 0.0) || !(var > mean) || !var.is_finite() {
        return Err(Error::UnderdispersedParameters { mean, var });
    }
    Ok((mean * mean / (var - mean), mean / var))
}

/// Poisson draw that tolerates a zero rate and clamps rates the sampler
/// cannot represent.
pub(crate) fn sample_poisson<R: Rng + ?Sized>(lambda: f64, rng: &mut R) -> f64 {
    if !(lambda > 0.0) {
        return 0.0;
    }
    let lambda = lambda.min(1e18);
    Poisson::new(lambda).expect("positive finite rate").sample(rng)
}

/// Negative binomial draw as a gamma–Poisson mixture with shape `r` and
/// gamma scale `(1-p)/p`.
pub(crate) fn sample_negbin<R: Rng + ?Sized>(r: f64, p: f64, rng: &mut R) -> f64 {
    let scale = (1.0 - p) / p;
    let lambda = Gamma::new(r, scale).expect("valid gamma parameters").sample(rng);
    sample_poisson(lambda, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn gaussian_kernel() {
        assert!((gaussian_logpdf(0.0, 0.0, 1.0).unwrap() + 0.918_938_5).abs() < 1e-7);
        let v = 2.7;
        assert!((gaussian_logpdf(1.3, 1.3, v).unwrap() + 0.5 * (2.0 * PI * v).ln()).abs() < 1e-14);
        let want = -0.5 * (8.0 * PI).ln() - 0.5;
        assert!((gaussian_logpdf(2.0, 0.0, 4.0).unwrap() - want).abs() < 1e-14);
        assert!(matches!(
            gaussian_logpdf(0.0, 0.0, 0.0),
            Err(Error::NonPositiveVariance(_))
        ));
    }

    #[test]
    fn poisson_kernel() {
        assert!((poisson_logpmf(0.0, 1.0).unwrap() + 1.0).abs() < 1e-15);
        assert!((poisson_logpmf(1.0, 1.0).unwrap() + 1.0).abs() < 1e-15);
        let want = 3.0 * 2.5f64.ln() - 2.5 - 6f64.ln();
        assert!((poisson_logpmf(3.0, 2.5).unwrap() - want).abs() < 1e-14);
        assert!(matches!(poisson_logpmf(-1.0, 1.0), Err(Error::NegativeCount(_))));
        assert!(matches!(poisson_logpmf(1.5, 1.0), Err(Error::NonIntegerCount(_))));
    }

    #[test]
    fn negbin_kernel() {
        let (r, p) = (3.7, 0.42);
        assert!((negbin_logpmf(0.0, r, p).unwrap() - r * p.ln()).abs() < 1e-14);
        assert!((negbin_logpmf(1.0, 1.0, 0.5).unwrap() - 0.25f64.ln()).abs() < 1e-15);
        assert!(negbin_logpmf(2.0, 0.0, 0.5).is_err());
        assert!(negbin_logpmf(2.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn pmfs_normalize() {
        let nb: f64 = (0..=200)
            .map(|y| negbin_logpmf(y as f64, 2.0, 0.3).unwrap().exp())
            .sum();
        assert!((nb - 1.0).abs() < 1e-8);
        for &lambda in &[0.842, 14.2, 150.0, 1600.0] {
            let s: f64 = (0..=10_000)
                .map(|y| poisson_logpmf(y as f64, lambda).unwrap().exp())
                .sum();
            assert!((s - 1.0).abs() < 1e-6, "lambda={lambda}: {s}");
        }
        for &(r, p) in &[(0.5, 0.4), (8.0, 0.05), (1e6, 0.999_99)] {
            let s: f64 = (0..=10_000).map(|y| negbin_logpmf(y as f64, r, p).unwrap().exp()).sum();
            assert!((s - 1.0).abs() < 1e-6, "r={r} p={p}: {s}");
        }
    }

    #[test]
    fn mean_var_conversion() {
        assert_eq!(negbin_from_mean_var(2.0, 4.0).unwrap(), (2.0, 0.5));
        assert!(negbin_from_mean_var(2.0, 2.0).is_err());
        let tau = 0.5;
        for &x in &[1.0, 10.0, 100.0] {
            let (r, _) = negbin_from_mean_var(x, x + tau * x * x).unwrap();
            assert!((r - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn negbin_sampler_moments() {
        use crate::rng::Streams;
        let mut rng = Streams::new(5).rng();
        let (r, p) = (2.0, 0.3);
        let n = 200_000;
        let draws: Vec<f64> = (0..n).map(|_| sample_negbin(r, p, &mut rng)).collect();
        let mean = draws.iter().sum::<f64>() / n as f64;
        let var = draws.iter().map(|y| (y - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let (m0, v0) = (r * (1.0 - p) / p, r * (1.0 - p) / (p * p));
        assert!((mean - m0).abs() < 0.03 * m0);
        assert!((var - v0).abs() < 0.05 * v0);
    }
}
