use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{path}:{line}:{column}: {msg}")]
    Parse { path: PathBuf, line: u64, column: usize, msg: String },

    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },

    #[error("dimension {dim} is degenerate (zero variance)")]
    DegenerateDimension { dim: usize },

    #[error("cubic fit failed{}: residual {residual:.3e}", .dim.map(|d| format!(" for dimension {d}")).unwrap_or_default())]
    FitFailure { dim: Option<usize>, residual: f64 },

    #[error("correlation matrix is not positive semidefinite (leading minor {minor})")]
    NotPositiveSemidefinite { minor: usize },

    #[error("model build: {0}")]
    Model(String),

    #[error("infeasible solution: {0}")]
    InfeasibleSolution(String),

    #[error("unknown scenario {0}")]
    UnknownScenario(usize),

    #[error(transparent)]
    Milp(#[from] iesplan_milp::MilpError),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
