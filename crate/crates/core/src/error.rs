use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the measurement toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("input contains a non-finite value at row {row}, column {col}")]
    NonFiniteInput { row: usize, col: usize },

    #[error("invalid manifold slice: {0}")]
    InvalidSlice(String),

    #[error("percentage must lie in (0, 100], got {0}")]
    InvalidPercentage(f64),

    #[error("neighborhood size {n} outside [1, {max}]")]
    InvalidNeighborhood { n: usize, max: usize },

    #[error("component count {d} outside [1, {n})")]
    InvalidComponents { d: usize, n: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("power iteration did not converge within {iterations} iterations")]
    ConvergenceFailure { iterations: usize },

    #[error("linear system is singular (rcond = {rcond:e})")]
    SingularSystem { rcond: f64 },

    #[error("training set is empty")]
    EmptyTrainSet,

    #[error("k = {k} exceeds the training set size {size}")]
    KTooLarge { k: usize, size: usize },

    #[error("training set contains a single category")]
    SingleClassTrainSet,

    #[error("kernel is degenerate: all training distances are zero")]
    DegenerateKernel,

    #[error("invalid synthetic spec: {0}")]
    InvalidSpec(String),

    #[error("parse error in {path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error("feature rows ({rows}) do not match metadata samples ({samples})")]
    LengthMismatch { rows: usize, samples: usize },

    #[error("instance {instance} has duplicate pose {pose_deg} deg")]
    DuplicatePose { instance: String, pose_deg: f64 },

    #[error("non-finite feature at row {row}, column {col}")]
    NonFiniteFeature { row: usize, col: usize },

    #[error("invalid bundle: {0}")]
    InvalidBundle(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by the filesystem rather than by the data.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
