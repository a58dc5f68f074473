//! Drives chat-with-image models over visual-search datasets.

pub mod adapter;
pub mod cache;
pub mod http;
pub mod mock;
pub mod runner;

pub use adapter::{ConfigError, ModelAdapter, ModelRequest, TransportError};
pub use cache::{CacheKey, ResponseCache};
pub use http::{AdapterConfig, HttpAdapter, RequestShape};
pub use mock::{mock_adapters, mock_by_name};
pub use runner::{run_trials, score_trials, LoadedDataset, RetryPolicy, TrialRecord};
