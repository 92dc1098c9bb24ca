use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("series is empty")]
    EmptySeries,

    #[error("non-finite value at position {index}")]
    NonFinite { index: usize },

    #[error("series too short: need at least {required} values, got {actual}")]
    TooShort { required: usize, actual: usize },

    #[error("year {year} outside the valid split range {first}..={last}")]
    OutOfRange { year: i32, first: i32, last: i32 },

    #[error("cannot reconstruct series: {0}")]
    Reconstruction(String),

    #[error("series has zero variance")]
    DegenerateVariance,

    #[error("invalid degrees of freedom: {lags} lags with {fitted_params} fitted parameters")]
    InvalidDf { lags: usize, fitted_params: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parameter constraint violated: {0}")]
    Constraint(String),

    #[error("non-positive prediction variance at step {step}")]
    Conditioning { step: usize },

    #[error(
        "optimizer did not converge after {restarts} restarts (best log-likelihood {best_loglik})"
    )]
    Convergence { restarts: usize, best_loglik: f64 },

    #[error("every candidate order failed to fit ({} skipped)", .skipped.len())]
    SearchExhausted { skipped: Vec<(String, String)> },

    #[error("forecasts are not aligned: {0}")]
    Alignment(String),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("actual value is zero at index {index}; MAPE undefined")]
    ZeroActual { index: usize },

    #[error("{model}: {message}")]
    ModelFit { model: String, message: String },
}
