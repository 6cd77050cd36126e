use std::path::PathBuf;

use crate::instances_io::MpsError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("dimension mismatch: expected length {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("relative optimality is undefined when the optimal value is zero")]
    ZeroOptimum,

    /// Some b_i ≤ 0, so the per-column resource rate d = b/n is not positive.
    #[error("nonpositive resource rate: min_i b_i / n = {0}")]
    NonpositiveRate(f64),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("column {0} has an infinite upper bound; online passes need finite bounds")]
    InfiniteUpperBound(usize),

    #[error("weighted simplex is empty: no multiplier reaches target {target}")]
    EmptyProjection { target: f64 },

    #[error("proximal step failed KKT verification (residual {residual:e})")]
    ProxNonconvergence { residual: f64 },

    #[error("basis factorization is numerically singular")]
    SingularBasis,

    #[error("vertex enumeration refused: m + n = {size} exceeds {limit}")]
    OracleTooLarge { size: usize, limit: usize },

    #[error("vertex enumeration found no feasible point")]
    OracleInfeasible,

    #[error("working problem solve ended with status {0}")]
    WorkingProblem(String),

    #[error("reference basis is empty")]
    EmptyBasis,

    #[error("generator: row {row} has no nonzeros after {attempts} attempts")]
    EmptyGeneratedRow { row: usize, attempts: usize },

    #[error(transparent)]
    Mps(#[from] MpsError),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

pub(crate) fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
