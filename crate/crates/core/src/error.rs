//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A spec struct failed validation (bad parameter value).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Input shapes do not line up.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A design matrix that cannot be fit (e.g. every column constant).
    #[error("degenerate design: {0}")]
    DegenerateDesign(String),

    /// Non-finite value where a finite one is required.
    #[error("non-finite value: {0}")]
    NonFinite(String),

    /// Too few data points for the requested statistic.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// A single replication failed, tagged with its grid coordinates.
    #[error("replication failed (cell {cell_index}, rep {replication_index}): {source}")]
    Replication {
        cell_index: usize,
        replication_index: usize,
        #[source]
        source: Box<Error>,
    },

    /// One or more replications failed; the whole grid is aborted.
    #[error("grid aborted, {} replication(s) failed: {}", failures.len(), describe_failures(failures))]
    GridAborted {
        /// (cell_index, replication_index, message) for every failure.
        failures: Vec<(usize, usize, String)>,
    },
}

fn describe_failures(failures: &[(usize, usize, String)]) -> String {
    failures
        .iter()
        .map(|(cell, rep, msg)| format!("(cell {cell}, rep {rep}: {msg})"))
        .collect::<Vec<_>>()
        .join("; ")
}

impl Error {
    /// Wrap an error with the (cell, rep) coordinates it occurred at.
    pub fn in_replication(self, cell_index: usize, replication_index: usize) -> Error {
        Error::Replication {
            cell_index,
            replication_index,
            source: Box::new(self),
        }
    }
}
