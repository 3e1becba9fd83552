use std::path::PathBuf;
use thiserror::Error;

/// Error type shared by every module in this crate.
#[derive(Debug, Error)]
pub enum SimError {
    /// A scalar or dimension argument violated a documented precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The maximal normalized gain is tied, so gaps, hardness and error
    /// exponents are undefined for this profile.
    #[error("degenerate gain profile: maximal normalized gain is tied")]
    Degenerate,

    /// The training budget cannot cover even one symbol per beam.
    #[error("insufficient budget: {budget} training symbols for {l_beams} beams")]
    InsufficientBudget { budget: u64, l_beams: usize },

    /// The operation needs state the object has not accumulated yet.
    #[error("invalid state: {0}")]
    InvalidState(String),

    /// Too few usable points remain for the requested estimate or fit.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// Filesystem failure while reading or writing results.
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, SimError>;
