use std::path::PathBuf;

use thiserror::Error;

use crate::domain::State;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error(transparent)]
    Step(#[from] StepError),

    #[error("diagnostic error: {0}")]
    Diagnostic(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("run failed: {source}; snapshot written to {snapshot}")]
    RunFailed {
        #[source]
        source: StepError,
        snapshot: PathBuf,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors that the CLI maps to exit status 2.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config(_) | Error::Parse { .. })
    }
}

/// Failures inside the time integrator.
#[derive(Debug, Error)]
pub enum StepError {
    #[error("zero pivot in tridiagonal solve at row {row}")]
    ZeroPivot { row: usize },

    #[error("positivity lost: {0}")]
    Positivity(crate::domain::Violation),

    #[error("time step underflow: dt = {dt:e} below dt_min = {dt_min:e} at t = {t}")]
    Underflow {
        t: f64,
        dt: f64,
        dt_min: f64,
        snapshot: Box<State>,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
