//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or inconsistent input (dimension mismatches, bad schedules).
    #[error("invalid argument: {0}")]
    Argument(String),

    /// A field evaluation produced a non-finite value.
    #[error("field evaluation failed: {0}")]
    Evaluation(String),

    /// A guarded precondition refused the run (e.g. under-resolved oscillation).
    #[error("precondition not met: {0}")]
    Precondition(String),

    /// The linear solver did not reach the requested tolerance.
    #[error("solver did not converge: residual {residual:.3e} after {iterations} iterations")]
    SolverDiverged { residual: f64, iterations: usize },

    /// The time stepper produced a non-finite state.
    #[error("state blow-up at t = {t}: {detail}")]
    BlowUp { t: f64, detail: String },

    /// Scenario/config file problems.
    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn argument(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
