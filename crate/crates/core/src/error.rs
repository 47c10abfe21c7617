use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A caller broke a documented precondition (bad index, mismatched
    /// dimensions, non-finite input, ...).
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("infeasible box: lower bound {lower} exceeds upper bound {upper} for item {item}")]
    InfeasibleBox { item: usize, lower: f64, upper: f64 },

    #[error("grid oracle refuses m = {m}: exhaustive search is limited to m <= {limit}")]
    GridTooLarge { m: usize, limit: usize },

    /// The ground-truth optimum revenue is not positive, so the relative
    /// revenue ratio is meaningless. Trials hitting this are flagged.
    #[error("non-positive optimal revenue {0}; trial flagged")]
    NonPositiveOptimum(f64),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
