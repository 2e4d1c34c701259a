use thiserror::Error;

/// Errors raised by the simulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("weak-field guard violated: 2GM/(c^2 r) = {ratio:.3e} >= {limit:.3e} at r = {radius:.6e} m")]
    WeakFieldViolation { ratio: f64, limit: f64, radius: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("trajectory is not timelike (dtau/dt squared = {radicand:.6e})")]
    NotTimelike { radicand: f64 },

    #[error("no convergence after {iterations} iterations (residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("unknown subsystem label `{0}`")]
    UnknownLabel(String),

    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
