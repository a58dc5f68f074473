use async_trait::async_trait;
use thiserror::Error;
use vsearch_core::Mode;

/// Sampling temperature for every replication run.
pub const REPLICATION_TEMPERATURE: f64 = 0.0;

/// One image + prompt sent to a model.
#[derive(Debug, Clone, Copy)]
pub struct ModelRequest<'a> {
    pub image_id: &'a str,
    pub image_png: &'a [u8],
    pub prompt: &'a str,
    pub mode: Mode,
    pub temperature: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{message}")]
pub struct TransportError {
    pub message: String,
    pub status: Option<u16>,
    /// Whether another attempt may succeed (timeouts, 429, 5xx).
    pub retryable: bool,
}

impl TransportError {
    pub fn retryable(message: impl Into<String>) -> Self {
        Self { message: message.into(), status: None, retryable: true }
    }

    pub fn fatal(message: impl Into<String>) -> Self {
        Self { message: message.into(), status: None, retryable: false }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("endpoint {0} is unreachable: {1}")]
    Unreachable(String, String),
    #[error("invalid endpoint URL {0}: {1}")]
    BadUrl(String, String),
    #[error("environment variable {0} is not set")]
    MissingKey(String),
    #[error("adapter config: {0}")]
    Invalid(String),
}

/// Chat-with-image model: image + text in, text out.
#[async_trait]
pub trait ModelAdapter: Send + Sync {
    fn model_id(&self) -> &str;

    async fn send(&self, request: &ModelRequest<'_>) -> Result<String, TransportError>;

    /// Checks configuration before a run starts.
    async fn preflight(&self) -> Result<(), ConfigError> {
        Ok(())
    }
}
