use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{function}: argument {value} outside the domain ({expected})")]
    Domain {
        function: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("invalid layering: {0}")]
    InvalidLayering(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid channel point: {0}")]
    InvalidChannel(String),

    #[error("invalid expectation spec: {0}")]
    InvalidSpec(String),

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("non-finite integrand value {value} at node (g = {g}, w = {w})")]
    NonFinite { g: f64, w: f64, value: f64 },

    #[error("adaptive integration did not converge: estimated error {estimate:e} above tolerance {tolerance:e}")]
    IntegrationFailed { estimate: f64, tolerance: f64 },

    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error("{0}")]
    Parse(String),
}
