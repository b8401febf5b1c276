use thiserror::Error;

/// Errors raised by the lattice, exponential-sum and evaluator routines.
///
/// The variants map one-to-one onto the CLI exit codes: usage errors exit
/// with 2, resource-budget errors with 3 and everything else with 1.
#[derive(Debug, Error)]
pub enum Error {
    #[error("usage error: {0}")]
    Usage(String),

    #[error("budget exceeded: {what} (processed {processed} of {required})")]
    Resource {
        what: String,
        processed: u64,
        required: u64,
    },

    #[error("integrity check failed: {0}")]
    Integrity(String),

    #[error("pole or divergent series: {0}")]
    Pole(String),

    #[error("outside the domain: {0}")]
    Domain(String),

    #[error("quadrature did not converge: {message} (best estimate {estimate:e})")]
    Accuracy { message: String, estimate: f64 },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Usage(msg.into()))
}
