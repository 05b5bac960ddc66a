use num_complex::Complex64;
use thiserror::Error;

/// Errors shared by every module of the toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("singularity: {0}")]
    Singularity(String),

    #[error("pole: {0}")]
    Pole(String),

    /// Newton iteration did not reach the requested tolerance. `parameter` is
    /// set when the failure happened inside a homotopy path.
    #[error("no convergence after {iterations} iterations (residual {residual:e}){}",
        .parameter.map(|t| format!(" at path parameter {t}")).unwrap_or_default())]
    Convergence {
        iterations: usize,
        residual: f64,
        last: Vec<Complex64>,
        parameter: Option<Complex64>,
    },

    #[error("path singularity at parameter {parameter}: {reason}")]
    PathSingularity { parameter: Complex64, reason: String },

    #[error("degenerate twist: {0}")]
    DegenerateTwist(String),

    #[error("roots collide (separation {separation:e}) at parameter {parameter}")]
    CollidingRoots { parameter: Complex64, separation: f64 },

    #[error("non-integer coefficient at degree {degree}")]
    NonIntegerCoefficient { degree: usize },

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
