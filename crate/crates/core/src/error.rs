use thiserror::Error;

/// Errors raised across the toolkit. Variants map onto the CLI exit-code contract.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("resolution error: {0}")]
    Resolution(String),
    #[error("resource limit exceeded: {0}")]
    Resource(String),
    #[error("topology error: {0}")]
    Topology(String),
    #[error("convergence failure after {iterations} iterations (gap {gap:.3e})")]
    Convergence { iterations: usize, gap: f64 },
    #[error("internal invariant violated: {0}")]
    Internal(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
