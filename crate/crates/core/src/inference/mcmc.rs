//! Random-walk Metropolis–Hastings on unconstrained coordinates, with exact
//! or particle-filter likelihoods.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{MaximumLikelihood, WeightDraws, WeightSampler};
use crate::config::{FlatPrior, McmcSettings, SamplerDiagnostics};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::model::ModelClass;
use crate::models::KangarooSsm;
use crate::param::{ParamSpace, ParamVector};
use crate::rng::{DccRng, Streams};

/// Acceptance rates outside this interval produce a diagnostic warning.
pub const ACCEPTANCE_RANGE: (f64, f64) = (0.1, 0.6);
/// Upper bound on automatically chosen per-coordinate proposal scales.
const MAX_PROPOSAL_SCALE: f64 = 0.5;
/// Scale used when curvature at the start point is unusable.
const FALLBACK_SCALE: f64 = 0.1;
const EXACT_FD_STEP: f64 = 1e-3;
const PF_FD_STEP: f64 = 0.1;
/// Minimum particle count for the particle-marginal sampler.
pub const PMMH_MIN_PARTICLES: usize = 500;

/// States retained by a chain plus bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainOutput {
    pub states: Vec<ParamVector>,
    pub accepted: usize,
    pub steps: usize,
    /// Calls to the log-likelihood, including the one at the start.
    pub evaluations: usize,
}

impl ChainOutput {
    pub fn acceptance_rate(&self) -> f64 {
        if self.steps == 0 {
            0.0
        } else {
            self.accepted as f64 / self.steps as f64
        }
    }
}

/// Central finite-difference Hessian of `f` at `u`.
pub fn fd_hessian(mut f: impl FnMut(&[f64]) -> f64, u: &[f64], h: f64) -> DMatrix<f64> {
    let d = u.len();
    let mut at = |di: &[(usize, f64)]| {
        let mut v = u.to_vec();
        for &(i, s) in di {
            v[i] += s;
        }
        f(&v)
    };
    let f0 = at(&[]);
    let mut hess = DMatrix::zeros(d, d);
    for i in 0..d {
        hess[(i, i)] = (at(&[(i, h)]) - 2.0 * f0 + at(&[(i, -h)])) / (h * h);
        for j in 0..i {
            let v = (at(&[(i, h), (j, h)]) - at(&[(i, h), (j, -h)]) - at(&[(i, -h), (j, h)]) + at(&[(i, -h), (j, -h)]))
                / (4.0 * h * h);
            hess[(i, j)] = v;
            hess[(j, i)] = v;
        }
    }
    hess
}

/// Random-walk proposal `u' = u + L ε` with `ε ~ N(0, I)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Proposal {
    factor: DMatrix<f64>,
}

impl Proposal {
    pub fn diagonal(scales: &[f64]) -> Self {
        Self {
            factor: DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(scales)),
        }
    }

    /// Proposal covariance `(2.38²/d) (−H)⁻¹ · multiplier²`, the usual
    /// random-walk choice for a Gaussian target with Hessian `H`. Marginal
    /// standard deviations are capped, keeping correlations; where `−H` is
    /// not positive definite the proposal is diagonal with per-coordinate
    /// curvature or a fixed fallback scale.
    pub fn from_hessian(hessian: &DMatrix<f64>, multiplier: f64) -> (Self, Vec<String>) {
        let d = hessian.nrows();
        let factor2 = 2.38 * 2.38 / d as f64;
        let cov = (-hessian)
            .cholesky()
            .filter(|_| hessian.iter().all(|v| v.is_finite()))
            .map(|ch| ch.inverse() * factor2);
        if let Some(mut cov) = cov {
            let caps: Vec<f64> = (0..d)
                .map(|i| (MAX_PROPOSAL_SCALE / cov[(i, i)].sqrt()).min(1.0))
                .collect();
            for i in 0..d {
                for j in 0..d {
                    cov[(i, j)] *= caps[i] * caps[j] * multiplier * multiplier;
                }
            }
            if let Some(ch) = cov.clone().cholesky() {
                return (Self { factor: ch.l() }, Vec::new());
            }
        }
        let scales: Vec<f64> = (0..d)
            .map(|i| {
                let s = (factor2 / -hessian[(i, i)]).sqrt();
                let s = if s.is_finite() && s > 0.0 {
                    s.min(MAX_PROPOSAL_SCALE)
                } else {
                    FALLBACK_SCALE
                };
                s * multiplier
            })
            .collect();
        (
            Self::diagonal(&scales),
            vec!["curvature at the start point is not negative definite".to_string()],
        )
    }

    /// Marginal standard deviation of each coordinate's increment.
    pub fn scales(&self) -> Vec<f64> {
        self.factor.row_iter().map(|r| r.norm()).collect()
    }

    fn step(&self, u: &[f64], out: &mut [f64], eps: &mut [f64], rng: &mut DccRng) {
        for e in eps.iter_mut() {
            *e = StandardNormal.sample(rng);
        }
        for (i, o) in out.iter_mut().enumerate() {
            *o = u[i] + (0..=i).map(|j| self.factor[(i, j)] * eps[j]).sum::<f64>();
        }
    }
}

/// Target density on unconstrained coordinates. Proposals that map outside
/// the space, or have non-finite likelihood, get `-∞`.
struct Target<'a, F> {
    space: &'a ParamSpace,
    prior: FlatPrior,
    loglik: F,
    evaluations: usize,
}

impl<F: FnMut(&ParamVector, &mut DccRng) -> Result<f64>> Target<'_, F> {
    fn eval(&mut self, u: &[f64], rng: &mut DccRng) -> Result<f64> {
        let theta = match self.space.from_unconstrained(u) {
            Ok(t) => t,
            Err(Error::ParamOutOfSpace { .. }) => return Ok(f64::NEG_INFINITY),
            Err(e) => return Err(e),
        };
        self.evaluations += 1;
        let ll = (self.loglik)(&theta, rng)?;
        if !ll.is_finite() {
            return Ok(f64::NEG_INFINITY);
        }
        Ok(match self.prior {
            FlatPrior::Original => ll + self.space.log_jacobian(u),
            FlatPrior::Unconstrained => ll,
            FlatPrior::LogScale => ll + self.space.log_jacobian_intervals(u),
        })
    }
}

/// Runs `burn_in + n·thin` Metropolis–Hastings steps from `start` and keeps
/// every `thin`-th state after burn-in. The current state's target value is
/// stored and reused, never recomputed.
#[allow(clippy::too_many_arguments)]
pub(crate) fn run_chain<F>(
    space: &ParamSpace,
    prior: FlatPrior,
    start: &ParamVector,
    proposal: &Proposal,
    burn_in: usize,
    thin: usize,
    n: usize,
    rng: &mut DccRng,
    loglik: F,
) -> Result<ChainOutput>
where
    F: FnMut(&ParamVector, &mut DccRng) -> Result<f64>,
{
    let mut target = Target {
        space,
        prior,
        loglik,
        evaluations: 0,
    };
    let mut u = space.to_unconstrained(start);
    let mut lp = target.eval(&u, rng)?;
    if !lp.is_finite() {
        return Err(Error::DegenerateStart("target is not finite at the start point".into()));
    }
    let steps = burn_in + n * thin;
    let mut states = Vec::with_capacity(n);
    let mut accepted = 0;
    let mut candidate = u.clone();
    let mut eps = vec![0.0; u.len()];
    for step in 1..=steps {
        proposal.step(&u, &mut candidate, &mut eps, rng);
        let lp_new = target.eval(&candidate, rng)?;
        let log_u = rng.random::<f64>().ln();
        if log_u < lp_new - lp {
            std::mem::swap(&mut u, &mut candidate);
            lp = lp_new;
            accepted += 1;
        }
        if step > burn_in && (step - burn_in).is_multiple_of(thin) {
            states.push(space.from_unconstrained(&u)?);
        }
    }
    Ok(ChainOutput {
        states,
        accepted,
        steps,
        evaluations: target.evaluations,
    })
}

fn acceptance_warning(rate: f64) -> Option<String> {
    let (lo, hi) = ACCEPTANCE_RANGE;
    (!(lo..=hi).contains(&rate)).then(|| {
        let msg = format!("acceptance rate {rate:.3} outside [{lo}, {hi}]");
        log::warn!("{msg}");
        msg
    })
}

fn check_scales(scales: &[f64], dim: usize) -> Result<()> {
    if scales.len() != dim {
        return Err(Error::InvalidConfig(format!(
            "{} proposal scales for {dim} parameters",
            scales.len()
        )));
    }
    if scales.iter().any(|s| !(*s > 0.0 && s.is_finite())) {
        return Err(Error::InvalidConfig("proposal scales must be positive".into()));
    }
    Ok(())
}

fn draws_from(
    out: ChainOutput,
    kind: &str,
    start: &ParamVector,
    proposal: &Proposal,
    mut warnings: Vec<String>,
) -> WeightDraws {
    let rate = out.acceptance_rate();
    warnings.extend(acceptance_warning(rate));
    WeightDraws {
        diagnostics: SamplerDiagnostics {
            kind: kind.into(),
            acceptance_rate: Some(rate),
            steps: out.steps,
            likelihood_evaluations: out.evaluations,
            start: start.values().to_vec(),
            proposal_scales: proposal.scales(),
            warnings,
        },
        thetas: out.states,
    }
}

/// Random-walk Metropolis–Hastings over the exact likelihood, started at the
/// MLE. By default `w_0` is flat in the log of positive parameters and in
/// the original coordinates of the rest ([`FlatPrior::LogScale`]).
#[derive(Debug, Clone)]
pub struct MhSampler<M> {
    model: M,
    data: Dataset,
    start: ParamVector,
    proposal: Proposal,
    burn_in: usize,
    thin: usize,
    prior: FlatPrior,
    warnings: Vec<String>,
}

impl<M: MaximumLikelihood + Clone> MhSampler<M> {
    pub fn new(model: M, data: Dataset, settings: &McmcSettings) -> Result<Self> {
        if !model.is_exact_likelihood() {
            return Err(Error::InvalidConfig(format!(
                "{} has no exact likelihood; use particle-marginal sampling",
                model.name()
            )));
        }
        model.check_data(&data)?;
        let start = model
            .chain_start(&data)
            .map_err(|e| Error::DegenerateStart(e.to_string()))?;
        Self::with_start(model, data, start, settings)
    }

    /// Starts the chain at a given point instead of the MLE.
    pub fn with_start(model: M, data: Dataset, start: ParamVector, settings: &McmcSettings) -> Result<Self> {
        let space = model.param_space();
        space.check(start.values())?;
        let prior = settings.prior.unwrap_or(FlatPrior::LogScale);
        let mut warnings = Vec::new();
        let proposal = match &settings.proposal_scales {
            Some(s) => {
                check_scales(s, space.dim())?;
                Proposal::diagonal(&s.iter().map(|v| v * settings.scale).collect::<Vec<_>>())
            }
            None if space.is_empty() => Proposal::diagonal(&[]),
            None => {
                let mut rng = Streams::new(0).rng();
                let u0 = space.to_unconstrained(&start);
                let mut target = Target {
                    space: &space,
                    prior,
                    loglik: |t: &ParamVector, r: &mut DccRng| model.log_likelihood(t, &data, r),
                    evaluations: 0,
                };
                let h = fd_hessian(
                    |u| target.eval(u, &mut rng).unwrap_or(f64::NEG_INFINITY),
                    &u0,
                    EXACT_FD_STEP,
                );
                let (p, w) = Proposal::from_hessian(&h, settings.scale);
                warnings = w;
                p
            }
        };
        Ok(Self {
            model,
            data,
            start,
            proposal,
            burn_in: settings.burn_in,
            thin: settings.thin(),
            prior,
            warnings,
        })
    }

    pub fn start(&self) -> &ParamVector {
        &self.start
    }

    pub fn proposal(&self) -> &Proposal {
        &self.proposal
    }

    pub fn run(&self, n: usize, rng: &mut DccRng) -> Result<ChainOutput> {
        let space = self.model.param_space();
        if space.is_empty() {
            return Ok(ChainOutput {
                states: vec![ParamVector::empty(); n],
                accepted: 0,
                steps: 0,
                evaluations: 0,
            });
        }
        run_chain(
            &space,
            self.prior,
            &self.start,
            &self.proposal,
            self.burn_in,
            self.thin,
            n,
            rng,
            |t, r| self.model.log_likelihood(t, &self.data, r),
        )
    }
}

impl<M: MaximumLikelihood + Clone> WeightSampler for MhSampler<M> {
    fn draw(&self, n: usize, rng: &mut DccRng) -> Result<WeightDraws> {
        let out = self.run(n, rng)?;
        if self.model.param_space().is_empty() {
            return Ok(WeightDraws {
                thetas: out.states,
                diagnostics: SamplerDiagnostics {
                    kind: "point".into(),
                    ..Default::default()
                },
            });
        }
        Ok(draws_from(
            out,
            "mh",
            &self.start,
            &self.proposal,
            self.warnings.clone(),
        ))
    }
}

/// Maximizes the particle-filter likelihood estimate over `(ln σ, ln τ)` by
/// successively refined grid search, with the same random numbers for
/// every evaluation so the objective is a deterministic function of `θ`.
pub(crate) fn kangaroo_search(model: &KangarooSsm, data: &Dataset, streams: Streams) -> Result<ParamVector> {
    model.check_data(data)?;
    let space = model.param_space();
    let eval = |ls: f64, lt: f64| -> f64 {
        model
            .particle_filter(ls.exp(), lt.exp(), data, &mut streams.rng())
            .map(|z| z.iter().sum::<f64>())
            .unwrap_or(f64::NEG_INFINITY)
    };
    const POINTS: i32 = 4;
    let (mut cs, mut ct) = (-2.0, -3.0);
    let (mut ws, mut wt) = (4.0, 5.0);
    let mut best = f64::NEG_INFINITY;
    for _ in 0..4 {
        let (mut bs, mut bt) = (cs, ct);
        for i in -POINTS..=POINTS {
            for j in -POINTS..=POINTS {
                let ls = cs + ws * i as f64 / POINTS as f64;
                let lt = ct + wt * j as f64 / POINTS as f64;
                let v = eval(ls, lt);
                if v > best {
                    best = v;
                    bs = ls;
                    bt = lt;
                }
            }
        }
        cs = bs;
        ct = bt;
        ws /= POINTS as f64 / 1.5;
        wt /= POINTS as f64 / 1.5;
    }
    if !best.is_finite() {
        return Err(Error::DegenerateStart(
            "particle filter failed on the whole search grid".into(),
        ));
    }
    ParamVector::new(&space, vec![cs.exp(), ct.exp()])
}

/// Particle-marginal Metropolis–Hastings: a fresh particle-filter estimate
/// for every proposal, and the estimate for the current state kept until
/// the next acceptance. By default `w_0` is flat in `(ln σ, ln τ)`.
#[derive(Debug, Clone)]
pub struct PmmhSampler {
    model: KangarooSsm,
    data: Dataset,
    start: ParamVector,
    proposal: Proposal,
    burn_in: usize,
    thin: usize,
    prior: FlatPrior,
    warnings: Vec<String>,
}

impl PmmhSampler {
    pub fn new(model: KangarooSsm, data: Dataset, settings: &McmcSettings, seed: u64) -> Result<Self> {
        let streams = Streams::new(seed).child(u64::from_le_bytes(*b"pmmh-crn"));
        let start = kangaroo_search(&model, &data, streams.child(0))?;
        Self::with_start(model, data, start, settings, seed)
    }

    pub fn with_start(
        model: KangarooSsm,
        data: Dataset,
        start: ParamVector,
        settings: &McmcSettings,
        seed: u64,
    ) -> Result<Self> {
        if model.particles() < PMMH_MIN_PARTICLES {
            return Err(Error::InvalidConfig(format!(
                "particle-marginal sampling needs at least {PMMH_MIN_PARTICLES} particles"
            )));
        }
        model.check_data(&data)?;
        let space = model.param_space();
        space.check(start.values())?;
        let prior = settings.prior.unwrap_or(FlatPrior::Unconstrained);
        let mut warnings = Vec::new();
        let proposal = match &settings.proposal_scales {
            Some(s) => {
                check_scales(s, space.dim())?;
                Proposal::diagonal(&s.iter().map(|v| v * settings.scale).collect::<Vec<_>>())
            }
            None => {
                let crn = Streams::new(seed).child(u64::from_le_bytes(*b"pmmh-crn")).child(1);
                let mut target = Target {
                    space: &space,
                    prior,
                    loglik: |t: &ParamVector, r: &mut DccRng| model.log_likelihood(t, &data, r),
                    evaluations: 0,
                };
                let u0 = space.to_unconstrained(&start);
                let h = fd_hessian(
                    |u| target.eval(u, &mut crn.rng()).unwrap_or(f64::NEG_INFINITY),
                    &u0,
                    PF_FD_STEP,
                );
                let (p, w) = Proposal::from_hessian(&h, settings.scale);
                warnings = w;
                p
            }
        };
        Ok(Self {
            model,
            data,
            start,
            proposal,
            burn_in: settings.burn_in,
            thin: settings.thin(),
            prior,
            warnings,
        })
    }

    pub fn start(&self) -> &ParamVector {
        &self.start
    }

    pub fn proposal(&self) -> &Proposal {
        &self.proposal
    }

    pub fn run(&self, n: usize, rng: &mut DccRng) -> Result<ChainOutput> {
        run_chain(
            &self.model.param_space(),
            self.prior,
            &self.start,
            &self.proposal,
            self.burn_in,
            self.thin,
            n,
            rng,
            |t, r| self.model.log_likelihood(t, &self.data, r),
        )
    }
}

impl WeightSampler for PmmhSampler {
    fn draw(&self, n: usize, rng: &mut DccRng) -> Result<WeightDraws> {
        let out = self.run(n, rng)?;
        Ok(draws_from(
            out,
            "pmmh",
            &self.start,
            &self.proposal,
            self.warnings.clone(),
        ))
    }
}
