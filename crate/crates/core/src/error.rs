use thiserror::Error;

/// Errors surfaced by configuration, signal processing, and the harness.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid system or scenario configuration.
    #[error("config: {0}")]
    Config(String),

    /// Dimension or domain mismatch between grids/signals.
    #[error("dimension: {0}")]
    Dimension(String),

    /// Estimation cannot proceed (all-null frame, rank deficiency, ...).
    #[error("degenerate: {0}")]
    Degenerate(String),

    /// File I/O failure.
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
    pub fn dimension(msg: impl Into<String>) -> Self {
        Error::Dimension(msg.into())
    }
    pub fn degenerate(msg: impl Into<String>) -> Self {
        Error::Degenerate(msg.into())
    }
}
