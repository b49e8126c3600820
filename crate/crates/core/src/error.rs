use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dataset has {locations} locations but {values} values")]
    LengthMismatch { locations: usize, values: usize },

    #[error("location {0} lies outside the unit interval")]
    OutOfUnitInterval(f64),

    #[error("invalid hyperparameters: {0}")]
    InvalidHyperparams(String),

    #[error("cannot fit a GP to an empty dataset")]
    EmptyDataset,

    #[error("Gram matrix is not positive definite (jitter {jitter:e})")]
    NotPositiveDefinite { jitter: f64 },

    #[error("likelihood maximization failed: {0}")]
    MleFailed(String),

    #[error("invalid covariance matrix: {0}")]
    InvalidCovariance(String),

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("invalid barycenter weights: {0}")]
    InvalidWeights(String),

    #[error("barycenter of an empty set of measures")]
    EmptyMeasureSet,

    #[error("requested {requested} ensemble members from a pool of {available}")]
    PoolTooSmall { requested: usize, available: usize },

    #[error("ensemble hyperparameter pair ({0}, {1}) appears more than once")]
    DuplicateMember(f64, f64),

    #[error("every ensemble member failed to fit")]
    EnsembleEmpty,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("run failed at iteration {iteration}: {source}")]
    RunFailed {
        iteration: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("paired samples differ in length ({0} vs {1})")]
    UnpairedSamples(usize, usize),

    #[error("need at least {needed} paired samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("unknown {kind} `{name}`")]
    Unknown { kind: &'static str, name: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
