//! Maximum-likelihood fitters for the built-in classes.

use nalgebra::{DMatrix, DVector};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::models::{ar1_incremental_logliks, check_count};

fn mean(y: &[f64]) -> f64 {
    y.iter().sum::<f64>() / y.len() as f64
}

/// `(μ̂, σ̂²)` with the `1/n` variance.
pub fn mle_gaussian(data: &Dataset) -> Result<(f64, f64)> {
    data.require_dim(1)?;
    let y = data.values();
    if y.len() < 2 {
        return Err(Error::InsufficientData("Gaussian fit needs n >= 2".into()));
    }
    let m = mean(y);
    let v = y.iter().map(|v| (v - m).powi(2)).sum::<f64>() / y.len() as f64;
    if !(v > 0.0) {
        return Err(Error::ZeroVariance);
    }
    Ok((m, v))
}

fn counts(data: &Dataset) -> Result<&[f64]> {
    data.require_dim(1)?;
    let y = data.values();
    y.iter().try_for_each(|&v| check_count(v))?;
    Ok(y)
}

/// `λ̂ = ȳ`.
pub fn mle_poisson(data: &Dataset) -> Result<f64> {
    let y = counts(data)?;
    let m = mean(y);
    if m == 0.0 {
        return Err(Error::AllZeroCounts);
    }
    Ok(m)
}

/// Profile score and its derivative in `r` with `p = r/(r + ȳ)`:
/// `ℓ'(r) = Σ_i Σ_{k<y_i} 1/(r+k) + n ln(r/(r+ȳ))`.
fn negbin_profile_derivs(y: &[f64], m: f64, r: f64) -> (f64, f64) {
    let n = y.len() as f64;
    let (mut g, mut h) = (n * (r / (r + m)).ln(), n * m / (r * (r + m)));
    for &yi in y {
        for k in 0..yi as u64 {
            let d = r + k as f64;
            g += 1.0 / d;
            h -= 1.0 / (d * d);
        }
    }
    (g, h)
}

/// `(r̂, p̂)` maximizing the negative binomial likelihood. Newton iteration
/// in `ln r` on the profile likelihood, started at the method-of-moments
/// value and safeguarded by a bracket.
pub fn mle_negbin(data: &Dataset) -> Result<(f64, f64)> {
    let y = counts(data)?;
    let m = mean(y);
    if m == 0.0 {
        return Err(Error::AllZeroCounts);
    }
    let var = y.iter().map(|v| (v - m).powi(2)).sum::<f64>() / y.len() as f64;
    if var <= m {
        return Err(Error::Underdispersed { mean: m, var });
    }
    // With var > mean the profile score is positive for small r and
    // negative for large r, with one root in between.
    let score = |lr: f64| negbin_profile_derivs(y, m, lr.exp());
    let mut lr = (m * m / (var - m)).ln();
    let (mut lo, mut hi) = (lr, lr);
    while score(lo).0 <= 0.0 {
        lo -= 1.0;
        if lo < -50.0 {
            return Err(Error::NoConvergence("negative binomial: no lower bracket".into()));
        }
    }
    while score(hi).0 >= 0.0 {
        hi += 1.0;
        if hi > 50.0 {
            return Err(Error::Underdispersed { mean: m, var });
        }
    }
    for _ in 0..100 {
        let r = lr.exp();
        let (g, h) = score(lr);
        if g > 0.0 {
            lo = lr;
        } else {
            hi = lr;
        }
        // d/d(ln r) of r·ℓ'(r) is r·ℓ' + r²·ℓ''.
        let gl = r * g;
        let hl = r * g + r * r * h;
        let mut next = lr - gl / hl;
        if !(next > lo && next < hi) || hl >= 0.0 {
            next = 0.5 * (lo + hi);
        }
        let step = next - lr;
        lr = next;
        if step.abs() < 1e-8 || hi - lo < 1e-8 {
            let r = lr.exp();
            return Ok((r, r / (r + m)));
        }
    }
    Err(Error::NoConvergence("negative binomial Newton iteration".into()))
}

/// `(β̂, σ̂²)` for polynomial regression of the given order on `covariates`.
/// Least squares by Householder QR on a Vandermonde matrix whose
/// covariates are rescaled to `[-1, 1]`; `σ̂² = RSS/n`.
pub fn mle_polyreg(data: &Dataset, covariates: &[f64], order: usize) -> Result<(Vec<f64>, f64)> {
    data.require_dim(1)?;
    let y = data.values();
    let n = y.len();
    if covariates.len() != n {
        return Err(Error::LengthMismatch {
            left: n,
            right: covariates.len(),
        });
    }
    let p = order + 1;
    if n <= p {
        return Err(Error::InsufficientData(format!("{n} points for {p} coefficients")));
    }
    let s = covariates.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let s = if s > 0.0 { s } else { 1.0 };
    let design = DMatrix::from_fn(n, p, |i, j| (covariates[i] / s).powi(j as i32));
    let qr = design.clone().qr();
    let r = qr.r();
    let rmax = (0..p).fold(0.0f64, |a, j| a.max(r[(j, j)].abs()));
    if (0..p).any(|j| !(r[(j, j)].abs() > 1e-10 * rmax)) {
        return Err(Error::RankDeficientDesign);
    }
    let yv = DVector::from_column_slice(y);
    let qty = qr.q().transpose() * &yv;
    let coef = r
        .solve_upper_triangular(&qty.rows(0, p).into_owned())
        .ok_or(Error::RankDeficientDesign)?;
    let resid = &yv - &design * &coef;
    let var = resid.norm_squared() / n as f64;
    let beta = (0..p).map(|j| coef[j] / s.powi(j as i32)).collect();
    Ok((beta, var))
}

fn ar1_profile_var(a: f64, y: &[f64]) -> f64 {
    let ss = y[0] * y[0] * (1.0 - a * a) + y.windows(2).map(|w| (w[1] - a * w[0]).powi(2)).sum::<f64>();
    ss / y.len() as f64
}

fn ar1_profile(a: f64, y: &[f64]) -> f64 {
    let n = y.len() as f64;
    -0.5 * n * ar1_profile_var(a, y).ln() + 0.5 * (1.0 - a * a).ln()
}

/// `(â, σ̂²)` maximizing the exact stationary AR(1) likelihood, with `σ²`
/// profiled out. A coarse grid locates the mode, then golden-section
/// search refines it to `1e-8` in `a`.
pub fn mle_ar1(data: &Dataset) -> Result<(f64, f64)> {
    data.require_dim(1)?;
    let y = data.values();
    if y.len() < 3 {
        return Err(Error::InsufficientData("AR(1) fit needs n >= 3".into()));
    }
    const BOUND: f64 = 0.999;
    const GRID: usize = 200;
    let f = |a: f64| ar1_profile(a, y);
    let grid: Vec<f64> = (0..=GRID)
        .map(|i| -BOUND + 2.0 * BOUND * i as f64 / GRID as f64)
        .collect();
    let best = (0..=GRID)
        .max_by(|&i, &j| f(grid[i]).total_cmp(&f(grid[j])))
        .expect("nonempty grid");
    let (mut lo, mut hi) = (grid[best.saturating_sub(1)], grid[(best + 1).min(GRID)]);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = hi - g * (hi - lo);
    let mut d = lo + g * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    let mut iters = 0;
    while hi - lo > 1e-8 {
        iters += 1;
        if iters > 200 {
            return Err(Error::NoConvergence("AR(1) golden-section search".into()));
        }
        if fc > fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - g * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + g * (hi - lo);
            fd = f(d);
        }
    }
    let a = 0.5 * (lo + hi);
    let var = ar1_profile_var(a, y);
    if !(var > 0.0) {
        return Err(Error::ZeroVariance);
    }
    // Sanity: the profile equals the exact likelihood up to a constant.
    debug_assert!(ar1_incremental_logliks(a, var, y).is_ok());
    Ok((a, var))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_two_points() {
        let d = Dataset::univariate(vec![-1.0, 1.0]).unwrap();
        assert_eq!(mle_gaussian(&d).unwrap(), (0.0, 1.0));
        let d = Dataset::univariate(vec![3.0; 3]).unwrap();
        assert_eq!(mle_gaussian(&d), Err(Error::ZeroVariance));
    }

    #[test]
    fn poisson_mean() {
        let d = Dataset::univariate(vec![4.0]).unwrap();
        assert_eq!(mle_poisson(&d).unwrap(), 4.0);
        let d = Dataset::univariate(vec![2.0; 9]).unwrap();
        assert_eq!(mle_poisson(&d).unwrap(), 2.0);
        let d = Dataset::univariate(vec![0.0; 9]).unwrap();
        assert_eq!(mle_poisson(&d), Err(Error::AllZeroCounts));
    }

    #[test]
    fn negbin_underdispersed() {
        let d = Dataset::univariate(vec![1.0, 2.0, 1.0, 2.0]).unwrap();
        assert!(matches!(mle_negbin(&d), Err(Error::Underdispersed { .. })));
    }

    #[test]
    fn negbin_profile_identity_and_stationarity() {
        let d = Dataset::univariate(vec![0.0, 5.0, 1.0, 9.0, 2.0, 0.0, 14.0, 3.0]).unwrap();
        let (r, p) = mle_negbin(&d).unwrap();
        let m = mean(d.values());
        assert!((p - r / (r + m)).abs() < 1e-10);
        assert!(negbin_profile_derivs(d.values(), m, r).0.abs() < 1e-6);
    }

    #[test]
    fn polyreg_constant_is_gaussian_fit() {
        let d = Dataset::univariate(vec![1.0, 4.0, 2.0, 7.0]).unwrap();
        let (beta, v) = mle_polyreg(&d, &[0.0, 1.0, 2.0, 3.0], 0).unwrap();
        let (m, gv) = mle_gaussian(&d).unwrap();
        assert!((beta[0] - m).abs() < 1e-12);
        assert!((v - gv).abs() < 1e-12);
    }

    #[test]
    fn polyreg_rank_deficient() {
        let d = Dataset::univariate(vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(mle_polyreg(&d, &[1.0; 4], 2), Err(Error::RankDeficientDesign));
    }

    #[test]
    fn ar1_is_local_maximum() {
        let y = vec![0.1, 0.9, 0.4, -0.3, -1.1, -0.2, 0.5, 1.3, 0.7, 0.2, -0.6];
        let d = Dataset::univariate(y.clone()).unwrap();
        let (a, v) = mle_ar1(&d).unwrap();
        let ll = |a: f64, v: f64| ar1_incremental_logliks(a, v, &y).unwrap().iter().sum::<f64>();
        let at = ll(a, v);
        assert!(at >= ll(a + 1e-4, v) && at >= ll(a - 1e-4, v));
        assert!(at >= ll(a, v * 1.001) && at >= ll(a, v * 0.999));
    }
}
