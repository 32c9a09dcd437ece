use std::path::PathBuf;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The nonlinearity, functional, or operator produced a non-finite value;
    /// for the bundled problems this is a division by zero in `f`.
    #[error("non-finite value: {0}")]
    NonFinite(String),

    /// The normalization step would divide by a vanishing sup norm.
    #[error("iteration breakdown: {0}")]
    Breakdown(String),

    /// No branch of the threshold search has a positive objective.
    #[error("threshold undefined: {0}")]
    ThresholdUndefined(String),

    #[error("failed to write {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
