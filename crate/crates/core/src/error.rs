use std::path::PathBuf;

use crate::solver::StabilityReport;

/// Errors produced by the solver library and the command-line front end.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("{op} is not defined at node {k} (n = {n})")]
    IndexOutOfRange { op: &'static str, k: usize, n: usize },

    #[error("profile has {got} values, grid needs {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("profile value at node {k} is not finite")]
    NonFinite { k: usize },

    #[error("profiles live on different grids")]
    GridMismatch,

    #[error("restriction factor {factor} does not divide n = {n}")]
    Restriction { factor: usize, n: usize },

    #[error("invalid profile parameter: {0}")]
    InvalidParameter(String),

    #[error("Dirichlet node violated: w_n = {value}, expected 0")]
    Dirichlet { value: f64 },

    #[error("cannot step past the final time level m = {m}")]
    StepPastEnd { m: usize },

    #[error("states are not consecutive time levels ({from} -> {to})")]
    NotConsecutive { from: usize, to: usize },

    #[error("time step count overflow for delta_u = {delta_u}, T = {t_final}")]
    TimeStepOverflow { delta_u: f64, t_final: f64 },

    #[error("stability hypotheses violated: {}", .0.failures().join("; "))]
    Unstable(Box<StabilityReport>),

    #[error("level {level} (n = {n}) failed: {source}")]
    Level {
        level: usize,
        n: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("decay fit window is degenerate: {0}")]
    DegenerateFit(String),

    #[error("invalid input data in {path}: {reason}")]
    Data { path: PathBuf, reason: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
