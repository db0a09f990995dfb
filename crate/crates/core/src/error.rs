use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("rank-deficient design matrix: numerical rank {rank} < {columns} columns")]
    RankDeficient { rank: usize, columns: usize },

    #[error("leverage singularity at row {row}: h_ii = {leverage}")]
    Leverage { row: usize, leverage: f64 },

    #[error("zero response variance")]
    ZeroVariance,

    #[error("matrix is not symmetric positive definite (pivot {pivot} = {value})")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error("unstable integration: state norm {norm:.3e} at t = {time}")]
    Unstable { norm: f64, time: f64 },

    #[error("numerical overflow: {0}")]
    Overflow(String),

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("all {starts} starts diverged; best objective seen {best:.3e}")]
    FitDiverged { starts: usize, best: f64 },

    #[error("internal error: {0}")]
    Internal(String),

    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("io error: {0}")]
    Io(String),

    #[error("{method} run (n_sim = {n_sim}, seed = {seed:#x}) failed: {source}")]
    Run { method: String, n_sim: usize, seed: u64, source: Box<Error> },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
