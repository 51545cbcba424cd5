use thiserror::Error;

/// Failure classes shared by every module; the command-line front end maps
/// each class to its own exit code.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input: mismatched dimensions, bad indices, bad strings.
    #[error("usage error: {0}")]
    Usage(String),
    /// The request is well formed but outside what is supported.
    #[error("unsupported: {0}")]
    Capability(String),
    /// Cached or shipped data failed its integrity check.
    #[error("integrity error: {0}")]
    Integrity(String),
    /// An iterative solver did not converge.
    #[error("no convergence: {0}")]
    Convergence(String),
    /// A mathematical check failed.
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
