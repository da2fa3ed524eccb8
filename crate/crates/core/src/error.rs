use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid lognormal parameters: mu={mu}, sigma={sigma}")]
    InvalidParams { mu: f64, sigma: f64 },

    #[error("value {k} is outside the support (k >= 1)")]
    OutsideSupport { k: u64 },

    #[error("infeasible mixture: rest-of-world logarithm argument {argument} is not positive")]
    InfeasibleMixture { argument: f64 },

    #[error("invalid mixture: {0}")]
    InvalidMixture(String),

    #[error("empty sample")]
    EmptySample,

    #[error("need at least {needed} values, got {got}")]
    TooFewValues { needed: usize, got: usize },

    #[error("non-finite value in input")]
    NonFinite,

    #[error("model interval has zero width")]
    DegenerateInterval,

    #[error("invalid confidence level {0}")]
    InvalidLevel(f64),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid frequency table: {0}")]
    InvalidTable(String),
}
