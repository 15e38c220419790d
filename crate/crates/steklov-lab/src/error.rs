use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {msg}")]
    MeshParse { line: usize, msg: String },

    #[error("mesh topology error: {0}")]
    MeshTopology(String),

    #[error("degenerate triangle {index}: area {area:.3e} below threshold {threshold:.3e}")]
    DegenerateTriangle {
        index: usize,
        area: f64,
        threshold: f64,
    },

    #[error("boundary data mismatch: {0}")]
    MeshMismatch(String),

    #[error("invalid Lorentz-Zygmund parameters: {0}")]
    InvalidParams(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("non-integrable weight configuration: {0}")]
    NonIntegrable(String),

    #[error("weight not admissible: {0}")]
    Inadmissible(String),

    #[error("solver failure: {0}")]
    Solver(String),

    #[error("usage error: {0}")]
    Usage(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
