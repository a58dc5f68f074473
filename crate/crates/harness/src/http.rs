//! Generic chat-with-image HTTP adapter.

use crate::adapter::{ConfigError, ModelAdapter, ModelRequest, TransportError};
use async_trait::async_trait;
use base64::Engine;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::path::Path;
use std::time::Duration;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RequestShape {
    /// `POST /v1/chat/completions` with an `image_url` data URI part.
    OpenaiChat,
    /// `POST /v1/messages` with a base64 `image` block.
    AnthropicMessages,
}

fn default_timeout() -> u64 {
    120
}

fn default_max_tokens() -> u32 {
    1024
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdapterConfig {
    pub endpoint: String,
    /// Name of the environment variable holding the API key. Omit for
    /// unauthenticated local servers.
    #[serde(default)]
    pub api_key_env: Option<String>,
    pub model: String,
    pub request_shape: RequestShape,
    #[serde(default = "default_timeout")]
    pub timeout_s: u64,
    #[serde(default = "default_max_tokens")]
    pub max_tokens: u32,
}

impl AdapterConfig {
    pub fn read(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Invalid(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| ConfigError::Invalid(format!("{}: {e}", path.display())))
    }
}

/// Request JSON for `req` in the configured shape.
pub fn request_body(config: &AdapterConfig, req: &ModelRequest<'_>) -> Value {
    let b64 = base64::engine::general_purpose::STANDARD.encode(req.image_png);
    match config.request_shape {
        RequestShape::OpenaiChat => json!({
            "model": config.model,
            "temperature": req.temperature,
            "max_tokens": config.max_tokens,
            "messages": [{
                "role": "user",
                "content": [
                    {"type": "text", "text": req.prompt},
                    {"type": "image_url", "image_url": {"url": format!("data:image/png;base64,{b64}")}}
                ]
            }]
        }),
        RequestShape::AnthropicMessages => json!({
            "model": config.model,
            "temperature": req.temperature,
            "max_tokens": config.max_tokens,
            "messages": [{
                "role": "user",
                "content": [
                    {"type": "image", "source": {"type": "base64", "media_type": "image/png", "data": b64}},
                    {"type": "text", "text": req.prompt}
                ]
            }]
        }),
    }
}

/// Pulls the reply text out of a response body.
pub fn extract_text(shape: RequestShape, body: &Value) -> Option<String> {
    match shape {
        RequestShape::OpenaiChat => {
            let content = &body["choices"][0]["message"]["content"];
            match content {
                Value::String(s) => Some(s.clone()),
                Value::Array(parts) => Some(
                    parts.iter().filter_map(|p| p["text"].as_str()).collect::<Vec<_>>().join(""),
                ),
                _ => None,
            }
        }
        RequestShape::AnthropicMessages => {
            let blocks = body["content"].as_array()?;
            Some(
                blocks
                    .iter()
                    .filter(|b| b["type"] == "text")
                    .filter_map(|b| b["text"].as_str())
                    .collect::<Vec<_>>()
                    .join(""),
            )
        }
    }
}

pub struct HttpAdapter {
    config: AdapterConfig,
    model_id: String,
    client: reqwest::Client,
}

impl HttpAdapter {
    pub fn new(config: AdapterConfig) -> Result<Self, ConfigError> {
        let client = reqwest::Client::builder()
            .timeout(Duration::from_secs(config.timeout_s))
            .build()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        Ok(Self { model_id: config.model.clone(), config, client })
    }

    fn api_key(&self) -> Result<Option<String>, ConfigError> {
        match &self.config.api_key_env {
            None => Ok(None),
            Some(var) => std::env::var(var).map(Some).map_err(|_| ConfigError::MissingKey(var.clone())),
        }
    }
}

fn classify_status(status: u16) -> bool {
    status == 408 || status == 429 || status >= 500
}

#[async_trait]
impl ModelAdapter for HttpAdapter {
    fn model_id(&self) -> &str {
        &self.model_id
    }

    async fn send(&self, req: &ModelRequest<'_>) -> Result<String, TransportError> {
        let key = self.api_key().map_err(|e| TransportError::fatal(e.to_string()))?;
        let mut builder = self.client.post(&self.config.endpoint).json(&request_body(&self.config, req));
        if let Some(key) = key {
            builder = match self.config.request_shape {
                RequestShape::OpenaiChat => builder.bearer_auth(key),
                RequestShape::AnthropicMessages => {
                    builder.header("x-api-key", key).header("anthropic-version", "2023-06-01")
                }
            };
        }
        let resp = builder.send().await.map_err(|e| TransportError {
            message: e.to_string(),
            status: None,
            retryable: e.is_timeout() || e.is_connect() || e.is_request(),
        })?;
        let status = resp.status().as_u16();
        let text = resp.text().await.map_err(|e| TransportError::retryable(e.to_string()))?;
        if !(200..300).contains(&status) {
            let excerpt: String = text.chars().take(200).collect();
            return Err(TransportError {
                message: format!("HTTP {status}: {excerpt}"),
                status: Some(status),
                retryable: classify_status(status),
            });
        }
        let body: Value = serde_json::from_str(&text)
            .map_err(|e| TransportError::fatal(format!("response is not JSON: {e}")))?;
        extract_text(self.config.request_shape, &body)
            .ok_or_else(|| TransportError::fatal("response has no text content"))
    }

    async fn preflight(&self) -> Result<(), ConfigError> {
        let url = reqwest::Url::parse(&self.config.endpoint)
            .map_err(|e| ConfigError::BadUrl(self.config.endpoint.clone(), e.to_string()))?;
        self.api_key()?;
        let host = url.host_str().ok_or_else(|| ConfigError::BadUrl(self.config.endpoint.clone(), "no host".into()))?;
        let port = url
            .port_or_known_default()
            .ok_or_else(|| ConfigError::BadUrl(self.config.endpoint.clone(), "no port".into()))?;
        let connect = tokio::net::TcpStream::connect((host, port));
        match tokio::time::timeout(Duration::from_secs(10), connect).await {
            Ok(Ok(_)) => Ok(()),
            Ok(Err(e)) => Err(ConfigError::Unreachable(self.config.endpoint.clone(), e.to_string())),
            Err(_) => Err(ConfigError::Unreachable(self.config.endpoint.clone(), "connect timed out".into())),
        }
    }
}
