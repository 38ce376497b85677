use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Error)]
pub enum Error {
    #[error("denominator vanishes (|q(x)| = {value:e}) at x = {x}")]
    DegenerateDenominator { x: f64, value: f64 },

    #[error("no published approximant for {target:?} with degrees {degrees:?}")]
    UnknownApproximant { target: crate::registry::TargetFn, degrees: (usize, Option<usize>) },

    #[error("Remez iteration did not converge after {iterations} iterations (spread {spread:e})")]
    NotConverged { iterations: usize, spread: f64 },

    #[error("coefficient system is numerically singular")]
    IllConditioned,

    #[error("invalid approximation problem: {0}")]
    InvalidProblem(String),

    #[error("angle undefined for r = g = 0")]
    UndefinedAngle,

    #[error("difference cache has not been built for this LUT")]
    CacheMissing,

    #[error("unsupported LUT grid size {0} (expected 9, 17 or 33)")]
    UnsupportedGrid(usize),

    #[error("corpus is empty")]
    CorpusEmpty,

    #[error("malformed LUT file: {0}")]
    MalformedLut(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
