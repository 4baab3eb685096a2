//! Checks against values computed independently of the library: direct
//! sums, quadrature, naive Monte Carlo, conjugate posteriors and
//! high-precision reference values. Each check panics on failure.
//!
//! Shared with the harness acceptance suite.

use dcc_core::baselines::{autocorrelations, ljung_box, ljung_box_statistic};
use dcc_core::engine::estimate_moments;
use dcc_core::inference::MhSampler;
use dcc_core::models::{gaussian_logpdf, negbin_logpmf, poisson_logpmf, GaussianIid, KangarooSsm};
use dcc_core::special::{chi2_sf, std_normal_cdf};
use dcc_core::{Dataset, FlatPrior, McmcSettings, ParamVector, Streams};
use rand_distr::{Distribution, Normal};

pub fn count_pmfs_sum_to_one() {
    for lambda in [0.3, 7.5, 120.0, 2000.0] {
        let s: f64 = (0..=10_000)
            .map(|y| poisson_logpmf(y as f64, lambda).unwrap().exp())
            .sum();
        assert!((s - 1.0).abs() < 1e-6, "poisson {lambda}: {s}");
    }
    for (r, p) in [(0.2, 0.5), (1.0, 0.1), (3.3, 0.02), (50.0, 0.9), (1e4, 0.99)] {
        let s: f64 = (0..=10_000).map(|y| negbin_logpmf(y as f64, r, p).unwrap().exp()).sum();
        assert!((s - 1.0).abs() < 1e-6, "negbin r={r} p={p}: {s}");
    }
}

pub fn gaussian_density_integrates_to_one() {
    for (m, v) in [(0.0, 1.0), (-3.0, 0.01), (40.0, 250.0)] {
        let sd: f64 = f64::sqrt(v);
        let (lo, hi) = (m - 12.0 * sd, m + 12.0 * sd);
        let k = 100_000;
        let h = (hi - lo) / k as f64;
        // Composite Simpson.
        let f = |x: f64| gaussian_logpdf(x, m, v).unwrap().exp();
        let mut s = f(lo) + f(hi);
        for i in 1..k {
            s += f(lo + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        let integral = s * h / 3.0;
        assert!((integral - 1.0).abs() < 1e-4, "N({m}, {v}): {integral}");
    }
}

pub fn simulated_gaussian_logliks_have_analytic_moments() {
    // z = -ln(2π)/2 - y²/2 with y² ~ χ²₁: mean -ln(2π)/2 - 1/2, variance 1/2.
    let want_mean = -0.5 * (2.0 * std::f64::consts::PI).ln() - 0.5;
    assert!((want_mean + 1.4189).abs() < 1e-4);
    let template = Dataset::univariate(vec![0.0; 3]).unwrap();
    let est = estimate_moments(
        &GaussianIid::Fixed,
        &ParamVector::empty(),
        &template,
        100_000,
        Streams::new(11),
        false,
    )
    .unwrap();
    for i in 0..3 {
        assert!((est.means[i] - want_mean).abs() < 0.01, "mean {}", est.means[i]);
        assert!((est.variances[i] - 0.5).abs() < 0.01, "variance {}", est.variances[i]);
    }
}

/// `NB(y; mean x, variance x + τx²)` as a finite product, without gamma
/// functions.
fn nb_pmf(y: u32, x: f64, tau: f64) -> f64 {
    let r = 1.0 / tau;
    let p = r / (r + x);
    let mut c = 1.0;
    for k in 0..y {
        c *= (r + k as f64) / (k + 1) as f64;
    }
    c * p.powf(r) * (1.0 - p).powi(y as i32)
}

pub fn particle_filter_matches_naive_monte_carlo_for_one_point() {
    let model = KangarooSsm::new(100_000).unwrap();
    let (log_mean, log_var) = model.prior();
    let (y1, y2, tau) = (3u32, 5u32, 0.3);
    let data = Dataset::new(vec![vec![f64::from(y1), f64::from(y2)]], Some(vec![1980.0])).unwrap();

    let mut rng = Streams::new(3).rng();
    let prior = Normal::new(log_mean, log_var.sqrt()).unwrap();
    let draws = 1_000_000;
    let naive = (0..draws)
        .map(|_| {
            let x = prior.sample(&mut rng).exp();
            nb_pmf(y1, x, tau) * nb_pmf(y2, x, tau)
        })
        .sum::<f64>()
        / draws as f64;

    let z = model
        .particle_filter(0.4, tau, &data, &mut Streams::new(4).rng())
        .unwrap();
    assert_eq!(z.len(), 1);
    assert!((z[0] - naive.ln()).abs() < 0.05, "pf {} vs naive {}", z[0], naive.ln());
}

// Student-t and chi-square CDFs by quadrature of their unnormalized
// densities.
fn cdf_by_quadrature(kernel: impl Fn(f64) -> f64, lo: f64, hi: f64) -> impl Fn(f64) -> f64 {
    let k = 200_000;
    let h = (hi - lo) / k as f64;
    let mut cum = vec![0.0; k + 1];
    for i in 1..=k {
        let a = lo + (i - 1) as f64 * h;
        cum[i] = cum[i - 1] + 0.5 * h * (kernel(a) + kernel(a + h));
    }
    let total = cum[k];
    move |x: f64| {
        if x <= lo {
            return 0.0;
        }
        if x >= hi {
            return 1.0;
        }
        let f = (x - lo) / h;
        let i = f.floor() as usize;
        (cum[i] + (f - i as f64) * (cum[i + 1] - cum[i])) / total
    }
}

fn ks_distance(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut v = samples.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    v.iter().enumerate().fold(0.0, |d, (i, &x)| {
        let f = cdf(x);
        d.max((i + 1) as f64 / n - f).max(f - i as f64 / n)
    })
}

/// Checks MH draws for the free Gaussian class against the closed-form
/// marginal posteriors under the flat prior `(σ²)^(-extra)` on `(μ, σ²)`:
/// `(μ - ȳ)/√(S/(nν))` is Student-t with `ν = n + 2·extra - 3` degrees of
/// freedom and `S/σ²` is chi-square with the same `ν`.
fn check_conjugate(prior: FlatPrior, extra: i32) {
    let n = 30;
    let mut rng = Streams::new(21).rng();
    let normal = Normal::new(1.5, 2.0).unwrap();
    let y: Vec<f64> = (0..n).map(|_| normal.sample(&mut rng)).collect();
    let ybar = y.iter().sum::<f64>() / n as f64;
    let s: f64 = y.iter().map(|v| (v - ybar).powi(2)).sum();
    let nu = (n + 2 * extra - 3) as f64;

    let settings = McmcSettings {
        burn_in: 2000,
        thin: Some(10),
        prior: Some(prior),
        ..McmcSettings::default()
    };
    let sampler = MhSampler::new(GaussianIid::Free, Dataset::univariate(y).unwrap(), &settings).unwrap();
    let out = sampler.run(8000, &mut Streams::new(22).rng()).unwrap();

    let t: Vec<f64> = out
        .states
        .iter()
        .map(|th| (th.get(0) - ybar) / (s / (n as f64 * nu)).sqrt())
        .collect();
    let t_cdf = cdf_by_quadrature(|x| (1.0 + x * x / nu).powf(-(nu + 1.0) / 2.0), -200.0, 200.0);
    let d_mu = ks_distance(&t, t_cdf);

    let q: Vec<f64> = out.states.iter().map(|th| s / th.get(1)).collect();
    let chi_cdf = cdf_by_quadrature(|x| x.powf(nu / 2.0 - 1.0) * (-x / 2.0).exp(), 0.0, 400.0);
    let d_var = ks_distance(&q, chi_cdf);

    assert!(d_mu < 0.05, "{prior:?}: KS distance for the mean {d_mu}");
    assert!(d_var < 0.05, "{prior:?}: KS distance for the variance {d_var}");
}

pub fn mh_matches_conjugate_posterior_flat_in_variance() {
    check_conjugate(FlatPrior::Original, 0);
}

pub fn mh_matches_conjugate_posterior_flat_in_log_variance() {
    check_conjugate(FlatPrior::LogScale, 1);
}

pub fn normal_cdf_reference_values() {
    let cases = [
        (-6.0, 9.86587645037698e-10),
        (-3.0, 0.0013498980316300945),
        (-1.96, 0.024997895148220436),
        (-0.5, 0.3085375387259869),
        (0.0, 0.5),
        (0.5, 0.6914624612740131),
        (1.2815515655446004, 0.9),
        (1.96, 0.9750021048517796),
        (3.0, 0.9986501019683699),
        (6.0, 0.9999999990134124),
    ];
    for (x, want) in cases {
        assert!((std_normal_cdf(x) - want).abs() < 1e-6, "Φ({x})");
    }
}

pub fn chi2_survival_reference_values() {
    let cases = [
        (0.1, 1, 0.7518296340458493),
        (3.841458820694124, 1, 0.05),
        (1.0, 3, 0.8012519569012008),
        (5.991464547107979, 2, 0.05),
        (18.307038053275146, 10, 0.05),
        (50.0, 30, 0.01240206071890058),
        (0.5, 5, 0.9921232932326296),
        (120.0, 100, 0.08440668109369183),
        (200.0, 4, 3.757276735781044e-42),
    ];
    for (x, k, want) in cases {
        assert!((chi2_sf(x, k) - want).abs() < 1e-6, "chi2_sf({x}, {k})");
    }
}

pub fn ljung_box_matches_direct_summation() {
    let mut rng = Streams::new(8).rng();
    let normal = Normal::new(0.0, 1.0).unwrap();
    let e: Vec<f64> = (0..57).map(|_| normal.sample(&mut rng)).collect();
    let n = e.len();
    let h = 6;

    let mean = e.iter().sum::<f64>() / n as f64;
    let denom: f64 = e.iter().map(|x| (x - mean) * (x - mean)).sum();
    let mut q = 0.0;
    for k in 1..=h {
        let mut num = 0.0;
        for t in k..n {
            num += (e[t] - mean) * (e[t - k] - mean);
        }
        let r = num / denom;
        q += r * r / (n - k) as f64;
    }
    q *= (n * (n + 2)) as f64;

    assert!((ljung_box_statistic(&e, h).unwrap() - q).abs() < 1e-10);
    let r = autocorrelations(&e, h).unwrap();
    assert_eq!(r.len(), h);
    let report = ljung_box(&e, Some(h), 2, 0.05).unwrap();
    assert!((report.statistic - q).abs() < 1e-10);
    assert!((report.p_value.unwrap() - chi2_sf(q, 4)).abs() < 1e-15);
}

/// Every check, by name.
pub const ALL: [(&str, fn()); 9] = [
    ("count_pmfs_sum_to_one", count_pmfs_sum_to_one),
    ("gaussian_density_integrates_to_one", gaussian_density_integrates_to_one),
    (
        "simulated_gaussian_logliks_have_analytic_moments",
        simulated_gaussian_logliks_have_analytic_moments,
    ),
    (
        "particle_filter_matches_naive_monte_carlo_for_one_point",
        particle_filter_matches_naive_monte_carlo_for_one_point,
    ),
    (
        "mh_matches_conjugate_posterior_flat_in_variance",
        mh_matches_conjugate_posterior_flat_in_variance,
    ),
    (
        "mh_matches_conjugate_posterior_flat_in_log_variance",
        mh_matches_conjugate_posterior_flat_in_log_variance,
    ),
    ("normal_cdf_reference_values", normal_cdf_reference_values),
    ("chi2_survival_reference_values", chi2_survival_reference_values),
    ("ljung_box_matches_direct_summation", ljung_box_matches_direct_summation),
];
