//! Data consistency checks for probabilistic model classes.
//!
//! A model class is assessed by comparing the incremental log-likelihoods
//! of the observed data against those of data simulated from the class,
//! averaged over parameter draws weighted by the likelihood.

// Negated comparisons are how NaN gets rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod config;
pub mod data;
pub mod engine;
pub mod error;
pub mod inference;
pub mod model;
pub mod models;
pub mod param;
pub mod rng;
pub mod special;

pub use config::{DccConfig, DccResult, FlatPrior, McmcSettings, SamplerDiagnostics, TailEvent, WeightMode};
pub use data::Dataset;
pub use engine::dcc;
pub use error::{Error, Result};
pub use model::ModelClass;
pub use param::{ParamSpace, ParamVector, Support};
pub use rng::{DccRng, Streams};
