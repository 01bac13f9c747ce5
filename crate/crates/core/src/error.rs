//! Error type shared by every module.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A point lies strictly inside the excluded region of a distance field
    /// (the disk of a circle, the horodisc of a horocycle).
    #[error("point lies inside the excluded domain: {0}")]
    InsideDomain(String),

    /// A surface was evaluated at a point whose distance parameter is outside
    /// the profile's domain.
    #[error("point lies outside the surface domain: {0}")]
    OutsideDomain(String),

    /// A parameter is outside the range where the requested quantity exists.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Alexandrov reflection requested along an edge where the slope is finite.
    #[error("cannot glue by reflection: {0}")]
    Gluing(String),

    /// A boundary curve whose segments do not close up.
    #[error("malformed curve: {0}")]
    MalformedCurve(String),

    /// Barrier ordering conditions failed on the sample set.
    #[error("barrier configuration rejected: {0}")]
    Config(String),

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("linear solve failed: {0}")]
    LinearSolve(String),

    #[error("i/o: {0}")]
    Io(String),

    #[error("parse: {0}")]
    Parse(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
