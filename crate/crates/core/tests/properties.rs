use dcc_core::baselines::{
    anderson_darling_statistic, kolmogorov_pvalue, ks_uniform_statistic, lilliefors_statistic, ljung_box_statistic,
    null_statistics, upper_threshold, TestKind,
};
use dcc_core::engine::{exceedance_count, pfa_u_for_theta};
use dcc_core::inference::{build_sampler, MaximumLikelihood, MhSampler, PmmhSampler, PointMass, WeightSampler};
use dcc_core::models::{
    negbin_from_mean_var, BuiltinModel, GaussianIid, KangarooSsm, LinearAr1, NegBinomialModel, PoissonModel,
    PolyRegression, SaturatedAr1Generator,
};
use dcc_core::{
    dcc, Dataset, DccConfig, DccRng, FlatPrior, McmcSettings, ModelClass, ParamSpace, ParamVector, Result, Streams,
    Support, TailEvent, WeightMode,
};
use proptest::prelude::*;
use rand::Rng;
use rand_distr::{Distribution, Normal};

fn normal_sample(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = Streams::new(seed).rng();
    let d = Normal::new(0.0, 1.0).unwrap();
    (0..n).map(|_| d.sample(&mut rng)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn csv_round_trip(values in prop::collection::vec(-1e300f64..1e300, 1..40), dim in 1usize..4) {
        let n = values.len() / dim;
        prop_assume!(n >= 1);
        let values = values[..n * dim].to_vec();
        let times: Vec<f64> = (0..n).map(|i| i as f64 * 0.37 - 5.0).collect();
        let d = Dataset::from_flat(values, dim, Some(times)).unwrap();
        let back = Dataset::read_csv(d.to_csv_string().as_bytes()).unwrap();
        prop_assert_eq!(back, d);
    }

    #[test]
    fn exceedance_never_increases_with_observed(
        sim in prop::collection::vec(0.0f64..10.0, 1..50),
        a in 0.0f64..10.0,
        b in 0.0f64..10.0,
    ) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(exceedance_count(&sim, hi) <= exceedance_count(&sim, lo));
    }

    #[test]
    fn kangaroo_size_is_inverse_tau(x in 1e-6f64..1e6, tau in 1e-4f64..1e2) {
        let (r, _) = negbin_from_mean_var(x, x + tau * x * x).unwrap();
        prop_assert!((r * tau - 1.0).abs() < 1e-9);
    }

    #[test]
    fn normality_statistics_ignore_order(seed in 0u64..1000, shift in 1usize..30) {
        let y = normal_sample(30, seed);
        let mut z = y.clone();
        z.rotate_left(shift % 30);
        z.reverse();
        for kind in TestKind::NORMALITY {
            let (a, b) = (kind.statistic(&y).unwrap(), kind.statistic(&z).unwrap());
            prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0), "{:?}", kind);
        }
    }

    #[test]
    fn lilliefors_and_ad_are_location_scale_invariant(seed in 0u64..1000, a in 0.01f64..100.0, b in -100.0f64..100.0) {
        let y = normal_sample(40, seed);
        let z: Vec<f64> = y.iter().map(|v| a * v + b).collect();
        let l = (lilliefors_statistic(&y).unwrap(), lilliefors_statistic(&z).unwrap());
        let d = (anderson_darling_statistic(&y).unwrap(), anderson_darling_statistic(&z).unwrap());
        prop_assert!((l.0 - l.1).abs() < 1e-12);
        prop_assert!((d.0 - d.1).abs() < 1e-10 * d.0.max(1.0));
    }

    #[test]
    fn mh_draws_stay_in_space(seed in 0u64..200) {
        let mut rng = Streams::new(seed).rng();
        let y: Vec<f64> = (0..25).map(|_| f64::from(rng.random_range(0u32..12))).collect();
        let data = Dataset::univariate(y).unwrap();
        let settings = McmcSettings { burn_in: 50, thin: Some(2), ..McmcSettings::default() };
        for model in [BuiltinModel::Poisson(PoissonModel), BuiltinModel::NegBinomial(NegBinomialModel)] {
            let sampler = MhSampler::new(model.clone(), data.clone(), &settings).unwrap();
            let draws = sampler.draw(30, &mut Streams::new(seed + 1).rng()).unwrap();
            let space = model.param_space();
            for t in &draws.thetas {
                prop_assert!(space.check(t.values()).is_ok());
            }
        }
    }
}

/// Random parameter values covering each support generously.
fn random_theta(space: &ParamSpace, rng: &mut DccRng) -> ParamVector {
    let values = space
        .params
        .iter()
        .map(|s| match s.support {
            Support::Real => rng.random_range(-50.0..50.0),
            Support::Positive => (rng.random_range(-6.0f64..4.0)).exp(),
            Support::Interval { lo, hi } => lo + (hi - lo) * rng.random_range(0.001..0.999),
        })
        .collect();
    ParamVector::new(space, values).unwrap()
}

#[test]
fn simulated_data_never_give_nan_logliks() {
    let uni = Dataset::univariate(vec![0.0; 12]).unwrap();
    let kangaroo_template = Dataset::new(
        vec![vec![0.0, 0.0]; 8],
        Some(vec![0.0, 0.25, 0.5, 1.0, 1.3, 2.0, 2.25, 3.0]),
    )
    .unwrap();
    let models: Vec<(BuiltinModel, &Dataset)> = vec![
        (BuiltinModel::Gaussian(GaussianIid::Fixed), &uni),
        (BuiltinModel::Gaussian(GaussianIid::Free), &uni),
        (BuiltinModel::Poisson(PoissonModel), &uni),
        (BuiltinModel::NegBinomial(NegBinomialModel), &uni),
        (
            BuiltinModel::PolyRegression(PolyRegression::for_data(3, &uni).unwrap()),
            &uni,
        ),
        (BuiltinModel::Ar1(LinearAr1), &uni),
        (
            BuiltinModel::Kangaroo(KangarooSsm::new(100).unwrap()),
            &kangaroo_template,
        ),
    ];
    for (k, (model, template)) in models.iter().enumerate() {
        let space = model.param_space();
        let mut rng = Streams::new(k as u64).rng();
        for _ in 0..1000 {
            let theta = random_theta(&space, &mut rng);
            let sim = model.simulate(&theta, template, &mut rng).unwrap();
            match model.incremental_logliks(&theta, &sim, &mut rng) {
                Ok(z) => assert!(z.iter().all(|v| !v.is_nan()), "{} at {:?}", model.name(), theta),
                // Extreme draws may legitimately exhaust every particle.
                Err(dcc_core::Error::ParticleCollapse { .. }) => {}
                Err(e) => panic!("{} at {:?}: {e}", model.name(), theta),
            }
        }
    }
}

#[test]
fn pfa_u_is_uniform_for_a_fully_specified_model() {
    let model = GaussianIid::Fixed;
    let theta = ParamVector::empty();
    let pfa: Vec<f64> = (0..1000u64)
        .map(|r| {
            let data = Dataset::univariate(normal_sample(20, 10_000 + r)).unwrap();
            pfa_u_for_theta(&model, &theta, &data, 100, 100, Streams::new(r)).unwrap()
        })
        .collect();
    let d = ks_uniform_statistic(&pfa);
    assert!(kolmogorov_pvalue(d, pfa.len()) > 0.01, "KS distance {d}");
}

fn run(model: &BuiltinModel, data: &Dataset, cfg: &DccConfig) -> Result<dcc_core::DccResult> {
    let s = build_sampler(model, data, cfg)?;
    dcc(model, s.as_ref(), data, cfg)
}

#[test]
fn complement_event_gives_bit_identical_result() {
    let data = Dataset::univariate(normal_sample(40, 5)).unwrap();
    let model = BuiltinModel::Gaussian(GaussianIid::Free);
    let mut cfg = DccConfig::new(20, 50, 50, 9).with_weights(WeightMode::Mh);
    let a = run(&model, &data, &cfg).unwrap();
    cfg.tail_event = TailEvent::Complement;
    let b = run(&model, &data, &cfg).unwrap();
    assert_eq!(a.pfa_star.to_bits(), b.pfa_star.to_bits());
    assert_eq!(a.pfa_u_star.to_bits(), b.pfa_u_star.to_bits());
    assert_eq!(a.exceed_counts, b.exceed_counts);
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let data = Dataset::univariate(normal_sample(30, 6)).unwrap();
    let model = BuiltinModel::Gaussian(GaussianIid::Free);
    let cfg = DccConfig::new(16, 40, 40, 3).with_weights(WeightMode::Mh);
    let in_pool = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| run(&model, &data, &cfg).unwrap())
    };
    let (mut a, mut b) = (in_pool(1), in_pool(3));
    a.elapsed_secs = 0.0;
    b.elapsed_secs = 0.0;
    assert_eq!(a, b);
}

#[test]
fn gaussian_criterion_is_affine_invariant() {
    let y = normal_sample(60, 12);
    let z: Vec<f64> = y.iter().map(|v| -3.5 * v + 20.0).collect();
    let model = BuiltinModel::Gaussian(GaussianIid::Free);
    let cfg = DccConfig::new(10, 200, 200, 4).with_weights(WeightMode::PointMle);
    let a = run(&model, &Dataset::univariate(y).unwrap(), &cfg).unwrap();
    let b = run(&model, &Dataset::univariate(z).unwrap(), &cfg).unwrap();
    assert!(
        (a.pfa_star - b.pfa_star).abs() < 0.02,
        "{} vs {}",
        a.pfa_star,
        b.pfa_star
    );
}

/// One parameter on `(-1, 1)` whose likelihood takes two values, so the
/// chain reduces to a two-state process.
#[derive(Debug, Clone)]
struct TwoLevel {
    left: f64,
    right: f64,
}

impl ModelClass for TwoLevel {
    fn name(&self) -> String {
        "two-level".into()
    }
    fn param_space(&self) -> ParamSpace {
        ParamSpace::new([("x", Support::Interval { lo: -1.0, hi: 1.0 })])
    }
    fn simulate(&self, _: &ParamVector, template: &Dataset, _: &mut DccRng) -> Result<Dataset> {
        Ok(template.clone())
    }
    fn incremental_logliks(&self, theta: &ParamVector, _: &Dataset, _: &mut DccRng) -> Result<Vec<f64>> {
        Ok(vec![if theta.get(0) < 0.0 {
            self.left.ln()
        } else {
            self.right.ln()
        }])
    }
    fn check_data(&self, _: &Dataset) -> Result<()> {
        Ok(())
    }
}

impl MaximumLikelihood for TwoLevel {
    fn mle(&self, _: &Dataset) -> Result<ParamVector> {
        ParamVector::new(&self.param_space(), vec![0.5])
    }
}

#[test]
fn two_state_chain_balances_flows() {
    let model = TwoLevel { left: 1.0, right: 3.0 };
    let data = Dataset::univariate(vec![0.0]).unwrap();
    let settings = McmcSettings {
        burn_in: 0,
        thin: Some(1),
        proposal_scales: Some(vec![0.8]),
        prior: Some(FlatPrior::Original),
        ..McmcSettings::default()
    };
    let start = ParamVector::new(&model.param_space(), vec![0.5]).unwrap();
    let sampler = MhSampler::with_start(model, data, start, &settings).unwrap();
    let steps = 100_000;
    let out = sampler.run(steps, &mut Streams::new(1).rng()).unwrap();
    let state: Vec<bool> = out.states.iter().map(|t| t.get(0) >= 0.0).collect();
    let right = state.iter().filter(|&&s| s).count() as f64 / steps as f64;
    assert!((right - 0.75).abs() < 0.01, "occupancy {right}");
    let (mut lr, mut rl) = (0usize, 0usize);
    for w in state.windows(2) {
        match (w[0], w[1]) {
            (false, true) => lr += 1,
            (true, false) => rl += 1,
            _ => {}
        }
    }
    assert!((lr as f64 - rl as f64).abs() / steps as f64 <= 0.01, "{lr} vs {rl}");
}

#[test]
fn pmmh_keeps_the_current_estimate() {
    let model = KangarooSsm::new(500).unwrap();
    let times: Vec<f64> = (0..10).map(|i| 1980.0 + 0.3 * i as f64).collect();
    let template = Dataset::new(vec![vec![0.0, 0.0]; 10], Some(times)).unwrap();
    let truth = ParamVector::new(&model.param_space(), vec![0.3, 0.1]).unwrap();
    let data = model.simulate(&truth, &template, &mut Streams::new(2).rng()).unwrap();
    let settings = McmcSettings {
        burn_in: 0,
        thin: Some(1),
        ..McmcSettings::default()
    };
    let sampler = PmmhSampler::with_start(model, data, truth, &settings, 5).unwrap();
    let out = sampler.run(40, &mut Streams::new(6).rng()).unwrap();
    // One estimate at the start, one per proposal; none for the retained state.
    assert_eq!(out.steps, 40);
    assert_eq!(out.evaluations, out.steps + 1);
}

#[test]
fn point_mass_repeats_its_value() {
    let space = ParamSpace::new([("a", Support::Real)]);
    let theta = ParamVector::new(&space, vec![2.5]).unwrap();
    let draws = PointMass::new(theta.clone(), "fixed")
        .draw(7, &mut Streams::new(0).rng())
        .unwrap();
    assert!(draws.thetas.iter().all(|t| *t == theta));
}

#[test]
fn calibrated_normality_tests_hold_their_size() {
    for kind in TestKind::NORMALITY {
        for level in [0.05, 0.10] {
            let threshold = upper_threshold(&null_statistics(kind, 100, 20_000, 1).unwrap(), level).unwrap();
            let fresh: Vec<bool> = (0..1000)
                .map(|r| kind.statistic(&normal_sample(100, 50_000 + r)).unwrap() > threshold)
                .collect();
            let rate = fresh.iter().filter(|&&b| b).count() as f64 / fresh.len() as f64;
            assert!((rate - level).abs() <= 0.03, "{kind:?} at {level}: {rate}");
        }
    }
}

#[test]
fn ljung_box_depends_on_order() {
    let g = SaturatedAr1Generator::default();
    let y = g.generate(200, &mut Streams::new(3).rng());
    let mut v = y.values().to_vec();
    let q = ljung_box_statistic(&v, 5).unwrap();
    v.sort_by(f64::total_cmp);
    let sorted = ljung_box_statistic(&v, 5).unwrap();
    assert!((q - sorted).abs() > 1.0);
}
