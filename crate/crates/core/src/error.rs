use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the library reports.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is singular over GF(2)")]
    SingularMatrix,
    #[error("{0} is not a fundamental rule bit (expected a power of two up to 256)")]
    InvalidBit(u16),
    #[error("rule number {0} is outside 0..=511")]
    InvalidRule(u32),
    #[error("geometry error: {0}")]
    Geometry(String),
    #[error("key error: {0}")]
    Key(String),
    #[error("format error: {0}")]
    Format(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("image too small: {0}")]
    ImageTooSmall(String),
    #[error("degenerate runs sample (n1={n1}, n2={n2})")]
    DegenerateSample { n1: usize, n2: usize },
    #[error("zero variance in sampled {0} values")]
    ZeroVariance(&'static str),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
