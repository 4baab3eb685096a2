use thiserror::Error;

/// Errors produced anywhere in the consistency-criterion pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    // -- dataset validation
    #[error("dataset has no points")]
    EmptyData,
    #[error("point {index} has dimension {found}, expected {expected}")]
    RaggedDimensions {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("points must have dimension at least 1")]
    ZeroDimension,
    #[error("timestamps are not strictly increasing at index {index}")]
    NonIncreasingTimestamps { index: usize },
    #[error("{found} timestamps supplied for {expected} points")]
    TimestampLength { expected: usize, found: usize },
    #[error("non-finite value at point {index}")]
    NonFiniteValue { index: usize },
    #[error("model requires timestamps but the dataset has none")]
    MissingTimestamps,
    #[error("model expects data of dimension {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("csv: {0}")]
    Csv(String),
    #[error("io: {0}")]
    Io(String),

    // -- parameters and densities
    #[error("parameter vector has {found} values, space has {expected}")]
    ParamArity { expected: usize, found: usize },
    #[error("parameter `{name}` = {value} lies outside its space")]
    ParamOutOfSpace { name: String, value: f64 },
    #[error("variance must be positive, got {0}")]
    NonPositiveVariance(f64),
    #[error("negative count {0}")]
    NegativeCount(f64),
    #[error("count {0} is not an integer")]
    NonIntegerCount(f64),
    #[error("invalid distribution parameter: {0}")]
    InvalidParameter(String),
    #[error("variance {var} does not exceed mean {mean}")]
    UnderdispersedParameters { mean: f64, var: f64 },
    #[error("autoregressive coefficient {0} is not stationary (|a| must be < 1)")]
    NonStationaryCoefficient(f64),
    #[error("all particle weights vanished at step {step}")]
    ParticleCollapse { step: usize },

    // -- engine
    #[error("simulated log-likelihood variance at index {index} is {variance:e}, below the degeneracy floor")]
    DegenerateVariance { index: usize, variance: f64 },
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("weight sampler failed: {0}")]
    WeightSamplerFailure(String),

    // -- fitting
    #[error("data has zero variance")]
    ZeroVariance,
    #[error("all counts are zero")]
    AllZeroCounts,
    #[error("sample variance {var} does not exceed sample mean {mean}; the Poisson class is adequate")]
    Underdispersed { mean: f64, var: f64 },
    #[error("optimizer did not converge: {0}")]
    NoConvergence(String),
    #[error("design matrix is rank deficient")]
    RankDeficientDesign,
    #[error("could not find a starting point for the chain: {0}")]
    DegenerateStart(String),
    #[error("not enough data: {0}")]
    InsufficientData(String),

    // -- baselines
    #[error("Ljung-Box degrees of freedom h - d = {0} is not positive")]
    NonPositiveDof(i64),

    // -- harness
    #[error("histogram range [{lo}, {hi}) is empty or bins = 0")]
    BadRange { lo: f64, hi: f64 },
    #[error("unknown dataset `{0}`")]
    UnknownDataset(String),
    #[error("unknown model `{0}`")]
    UnknownModel(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Csv(e.to_string())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
