use std::path::PathBuf;

use thiserror::Error;

/// Errors surfaced by the estimation pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed input at line {line}: {msg}")]
    Malformed { line: usize, msg: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("log-likelihood is not finite at the requested parameters")]
    NonFiniteLikelihood,

    #[error("fit failed: {0}")]
    FitFailed(String),

    #[error("singular matrix: {0}")]
    Singular(String),

    #[error("out of range: {0}")]
    OutOfRange(String),

    #[error("infinite-variance tail (alpha = {alpha:.4} <= 2); scaling law inapplicable")]
    ScalingInapplicable { alpha: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code for the CLI: input problems, fit problems, and the
    /// scaling gate get distinct codes.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. }
            | Error::Malformed { .. }
            | Error::InvalidInput(_)
            | Error::InvalidParams(_)
            | Error::Degenerate(_)
            | Error::OutOfRange(_) => 2,
            Error::NonFiniteLikelihood | Error::FitFailed(_) | Error::Singular(_) => 3,
            Error::ScalingInapplicable { .. } => 4,
        }
    }
}
