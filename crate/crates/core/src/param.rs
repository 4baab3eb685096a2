//! Parameter spaces and the unconstrained reparameterization used by the
//! random-walk samplers.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Support of a single parameter coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Support {
    Real,
    /// `(0, ∞)`, mapped through `ln`.
    Positive,
    /// `(lo, hi)`, mapped through `atanh` of the affinely rescaled value.
    Interval {
        lo: f64,
        hi: f64,
    },
}

impl Support {
    pub fn contains(&self, x: f64) -> bool {
        match *self {
            Support::Real => x.is_finite(),
            Support::Positive => x > 0.0 && x.is_finite(),
            Support::Interval { lo, hi } => x > lo && x < hi,
        }
    }

    pub fn to_unconstrained(&self, x: f64) -> f64 {
        match *self {
            Support::Real => x,
            Support::Positive => x.ln(),
            Support::Interval { lo, hi } => (2.0 * (x - lo) / (hi - lo) - 1.0).atanh(),
        }
    }

    pub fn from_unconstrained(&self, u: f64) -> f64 {
        match *self {
            Support::Real => u,
            Support::Positive => u.exp(),
            Support::Interval { lo, hi } => lo + 0.5 * (hi - lo) * (u.tanh() + 1.0),
        }
    }

    /// `ln |dx/du|` at unconstrained coordinate `u`.
    pub fn log_jacobian(&self, u: f64) -> f64 {
        match *self {
            Support::Real => 0.0,
            Support::Positive => u,
            Support::Interval { lo, hi } => {
                // ln(1 - tanh²u) = 2 (ln 2 - |u| - ln(1 + e^{-2|u|}))
                let a = u.abs();
                (0.5 * (hi - lo)).ln() + 2.0 * (std::f64::consts::LN_2 - a - (-2.0 * a).exp().ln_1p())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamSpec {
    pub name: String,
    pub support: Support,
}

/// Ordered description of a model's parameters. May be empty for classes
/// that contain a single model.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ParamSpace {
    pub params: Vec<ParamSpec>,
}

impl ParamSpace {
    pub fn new(params: impl IntoIterator<Item = (&'static str, Support)>) -> Self {
        Self {
            params: params
                .into_iter()
                .map(|(name, support)| ParamSpec {
                    name: name.to_string(),
                    support,
                })
                .collect(),
        }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn dim(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    pub fn names(&self) -> Vec<&str> {
        self.params.iter().map(|p| p.name.as_str()).collect()
    }

    /// Checks arity and that every coordinate lies strictly inside its support.
    pub fn check(&self, values: &[f64]) -> Result<()> {
        if values.len() != self.dim() {
            return Err(Error::ParamArity {
                expected: self.dim(),
                found: values.len(),
            });
        }
        for (spec, &v) in self.params.iter().zip(values) {
            if !spec.support.contains(v) {
                return Err(Error::ParamOutOfSpace {
                    name: spec.name.clone(),
                    value: v,
                });
            }
        }
        Ok(())
    }

    pub fn to_unconstrained(&self, theta: &ParamVector) -> Vec<f64> {
        self.params
            .iter()
            .zip(theta.values())
            .map(|(p, &x)| p.support.to_unconstrained(x))
            .collect()
    }

    /// Maps back to the constrained space. Fails only when the image falls
    /// on a boundary through floating-point saturation.
    pub fn from_unconstrained(&self, u: &[f64]) -> Result<ParamVector> {
        let values = self
            .params
            .iter()
            .zip(u)
            .map(|(p, &x)| p.support.from_unconstrained(x))
            .collect();
        ParamVector::new(self, values)
    }

    pub fn log_jacobian(&self, u: &[f64]) -> f64 {
        self.params.iter().zip(u).map(|(p, &x)| p.support.log_jacobian(x)).sum()
    }

    /// Log-Jacobian restricted to interval-valued parameters.
    pub fn log_jacobian_intervals(&self, u: &[f64]) -> f64 {
        self.params
            .iter()
            .zip(u)
            .filter(|(p, _)| matches!(p.support, Support::Interval { .. }))
            .map(|(p, &x)| p.support.log_jacobian(x))
            .sum()
    }
}

/// A parameter value known to lie inside its [`ParamSpace`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamVector(Vec<f64>);

impl ParamVector {
    pub fn new(space: &ParamSpace, values: Vec<f64>) -> Result<Self> {
        space.check(&values)?;
        Ok(Self(values))
    }

    /// The zero-dimensional parameter of a single-model class.
    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn get(&self, i: usize) -> f64 {
        self.0[i]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn space() -> ParamSpace {
        ParamSpace::new([
            ("mu", Support::Real),
            ("s2", Support::Positive),
            ("a", Support::Interval { lo: -1.0, hi: 1.0 }),
            ("p", Support::Interval { lo: 0.0, hi: 1.0 }),
        ])
    }

    #[test]
    fn rejects_out_of_space() {
        let s = space();
        assert!(ParamVector::new(&s, vec![0.0, 1.0, 0.5, 0.5]).is_ok());
        assert!(ParamVector::new(&s, vec![0.0, 0.0, 0.5, 0.5]).is_err());
        assert!(ParamVector::new(&s, vec![0.0, 1.0, 1.0, 0.5]).is_err());
        assert!(ParamVector::new(&s, vec![0.0, 1.0, 0.5]).is_err());
    }

    #[test]
    fn interval_on_unit_symmetric_is_atanh() {
        let s = Support::Interval { lo: -1.0, hi: 1.0 };
        assert!((s.to_unconstrained(0.3) - 0.3f64.atanh()).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn transform_round_trip(mu in -50.0..50.0f64, ls in -5.0..5.0f64, a in -0.99..0.99f64, p in 0.01..0.99f64) {
            let s = space();
            let theta = ParamVector::new(&s, vec![mu, ls.exp(), a, p]).unwrap();
            let u = s.to_unconstrained(&theta);
            let back = s.from_unconstrained(&u).unwrap();
            for (x, y) in theta.values().iter().zip(back.values()) {
                prop_assert!((x - y).abs() <= 1e-12 * (1.0 + x.abs()));
            }
        }

        #[test]
        fn log_jacobian_matches_finite_difference(u in -6.0..6.0f64) {
            for sup in [Support::Positive, Support::Interval { lo: -1.0, hi: 1.0 }, Support::Interval { lo: 0.0, hi: 1.0 }] {
                let h = 1e-6;
                let d = (sup.from_unconstrained(u + h) - sup.from_unconstrained(u - h)) / (2.0 * h);
                prop_assert!((d.ln() - sup.log_jacobian(u)).abs() < 1e-5);
            }
        }
    }
}
