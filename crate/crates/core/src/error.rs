use num_complex::Complex64;
use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parameter out of domain: {0}")]
    Domain(String),

    #[error("invalid channel model: {0}")]
    InvalidModel(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("fixed point did not converge after {iterations} iterations (last residual {residual:e})")]
    IterationLimit { iterations: usize, residual: f64 },

    #[error("numerical failure: {0}")]
    Numeric(String),

    #[error("degenerate determinant: {0}")]
    Degenerate(String),

    #[error("finite-difference step too small: {0}")]
    StepSize(String),

    #[error("contour violation: {0}")]
    Contour(String),

    #[error("contour node {index} at z = {z}: {source}")]
    ContourNode {
        index: usize,
        z: Complex64,
        #[source]
        source: Box<Error>,
    },

    #[error("trial {trial}: {source}")]
    Trial {
        trial: u64,
        #[source]
        source: Box<Error>,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by user input rather than by the numerics.
    pub fn is_config(&self) -> bool {
        match self {
            Error::Domain(_)
            | Error::InvalidModel(_)
            | Error::Dimension(_)
            | Error::Config(_)
            | Error::Io(_) => true,
            Error::ContourNode { source, .. } | Error::Trial { source, .. } => source.is_config(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
