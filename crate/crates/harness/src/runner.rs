//! Concurrent trial runner with caching and retries.

use crate::adapter::{ModelAdapter, ModelRequest, TransportError, REPLICATION_TEMPERATURE};
use crate::cache::{CacheKey, ResponseCache};
use futures::stream::{self, StreamExt};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::io::{self, BufRead, Write};
use std::path::Path;
use std::time::{Duration, SystemTime, UNIX_EPOCH};
use thiserror::Error;
use vsearch_core::dataset::{DatasetError, MANIFEST_FILE};
use vsearch_core::prompt::build_prompt;
use vsearch_core::scoring::score_reply;
use vsearch_core::{encode_png, render_scene, Dataset, Manifest, Mode, ScoreRecord};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub image_id: String,
    pub prompt: String,
    pub mode: Mode,
    pub model_id: String,
    /// Raw reply text; `None` when every attempt failed.
    pub response: Option<String>,
    pub error: Option<String>,
    pub requested_at_ms: u64,
    pub responded_at_ms: u64,
    pub retries: u32,
    pub cached: bool,
}

impl TrialRecord {
    /// Everything except the timestamps, for idempotence checks.
    pub fn without_timestamps(&self) -> TrialRecord {
        TrialRecord { requested_at_ms: 0, responded_at_ms: 0, ..self.clone() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RetryPolicy {
    pub max_attempts: u32,
    pub base_delay: Duration,
    pub max_delay: Duration,
    /// Scales each delay by a uniform factor in [0.5, 1).
    pub jitter: bool,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        Self { max_attempts: 5, base_delay: Duration::from_secs(1), max_delay: Duration::from_secs(30), jitter: true }
    }
}

impl RetryPolicy {
    /// Un-jittered wait before attempt `attempt + 1` (0-based `attempt`).
    pub fn delay(&self, attempt: u32) -> Duration {
        let factor = 2u32.saturating_pow(attempt);
        self.base_delay.saturating_mul(factor).min(self.max_delay)
    }
}

/// Images and ground truth ready to send.
#[derive(Debug, Clone)]
pub struct LoadedDataset {
    pub manifest: Manifest,
    /// PNG bytes, parallel to `manifest.entries`.
    pub images: Vec<Vec<u8>>,
}

impl LoadedDataset {
    /// Reads `manifest.json` and every referenced PNG from `dir`.
    pub fn load(dir: &Path) -> Result<Self, DatasetError> {
        let manifest = Manifest::read(&dir.join(MANIFEST_FILE))?;
        let images = manifest
            .entries
            .iter()
            .map(|e| std::fs::read(dir.join(e.image_file())))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { manifest, images })
    }

    /// Renders and encodes an in-memory dataset.
    pub fn from_dataset(dataset: &Dataset) -> Self {
        Self {
            manifest: dataset.manifest.clone(),
            images: dataset.scenes.iter().map(|s| encode_png(&render_scene(s))).collect(),
        }
    }
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] crate::adapter::ConfigError),
    #[error("cache write failed: {0}")]
    Cache(#[from] io::Error),
}

fn now_ms() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_millis() as u64).unwrap_or(0)
}

async fn send_with_retry(
    adapter: &dyn ModelAdapter,
    req: &ModelRequest<'_>,
    policy: &RetryPolicy,
) -> (Result<String, TransportError>, u32) {
    let mut attempt = 0;
    loop {
        match adapter.send(req).await {
            Ok(text) => return (Ok(text), attempt),
            Err(e) if e.retryable && attempt + 1 < policy.max_attempts => {
                let mut wait = policy.delay(attempt);
                if policy.jitter {
                    wait = wait.mul_f64(rand::rng().random_range(0.5..1.0));
                }
                tracing::warn!(image = req.image_id, attempt, error = %e, "retrying");
                tokio::time::sleep(wait).await;
                attempt += 1;
            }
            Err(e) => return (Err(e), attempt),
        }
    }
}

/// Sends every manifest entry to `adapter`, at most `parallelism` at a
/// time, and returns one record per entry in manifest order. Transport
/// failures are recorded, never propagated.
pub async fn run_trials(
    adapter: &dyn ModelAdapter,
    dataset: &LoadedDataset,
    mode: Mode,
    parallelism: usize,
    cache: &ResponseCache,
    policy: &RetryPolicy,
) -> Result<Vec<TrialRecord>, RunError> {
    adapter.preflight().await?;
    let model_id = adapter.model_id().to_string();
    let trials = dataset.manifest.entries.iter().zip(&dataset.images);
    let results: Vec<Result<TrialRecord, io::Error>> = stream::iter(trials)
        .map(|(entry, png)| {
            let model_id = model_id.clone();
            async move {
                let requested_at_ms = now_ms();
                let mut record = TrialRecord {
                    image_id: entry.image_id.clone(),
                    prompt: String::new(),
                    mode,
                    model_id: model_id.clone(),
                    response: None,
                    error: None,
                    requested_at_ms,
                    responded_at_ms: requested_at_ms,
                    retries: 0,
                    cached: false,
                };
                let prompt = match build_prompt(entry, mode) {
                    Ok(p) => p,
                    Err(e) => {
                        record.error = Some(e.to_string());
                        return Ok(record);
                    }
                };
                record.prompt = prompt.clone();
                let key = CacheKey::new(&model_id, png, &prompt);
                if let Some(hit) = cache.get(&key) {
                    record.response = Some(hit);
                    record.cached = true;
                    record.responded_at_ms = now_ms();
                    return Ok(record);
                }
                let req = ModelRequest {
                    image_id: &entry.image_id,
                    image_png: png,
                    prompt: &prompt,
                    mode,
                    temperature: REPLICATION_TEMPERATURE,
                };
                let (result, retries) = send_with_retry(adapter, &req, policy).await;
                record.retries = retries;
                record.responded_at_ms = now_ms();
                match result {
                    Ok(text) => {
                        cache.insert(key, text.clone())?;
                        record.response = Some(text);
                    }
                    Err(e) => record.error = Some(e.to_string()),
                }
                Ok(record)
            }
        })
        .buffered(parallelism.max(1))
        .collect()
        .await;
    Ok(results.into_iter().collect::<Result<_, _>>()?)
}

/// Scores every trial against its manifest entry. Transport failures and
/// missing prompts score as unparseable replies.
pub fn score_trials(records: &[TrialRecord], manifest: &Manifest) -> Result<Vec<ScoreRecord>, String> {
    records
        .iter()
        .map(|r| {
            let entry = manifest.entry(&r.image_id).ok_or_else(|| format!("{} not in manifest", r.image_id))?;
            Ok(score_reply(&r.model_id, r.response.as_deref().unwrap_or(""), r.mode, entry))
        })
        .collect()
}

pub fn write_jsonl<T: Serialize>(path: &Path, rows: &[T]) -> io::Result<()> {
    write_jsonl_to(std::fs::File::create(path)?, rows)
}

pub fn write_jsonl_to<W: Write, T: Serialize>(writer: W, rows: &[T]) -> io::Result<()> {
    let mut out = io::BufWriter::new(writer);
    for row in rows {
        serde_json::to_writer(&mut out, row).map_err(io::Error::other)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

pub fn read_jsonl<T: serde::de::DeserializeOwned>(path: &Path) -> io::Result<Vec<T>> {
    let file = io::BufReader::new(std::fs::File::open(path)?);
    let mut rows = Vec::new();
    for (i, line) in file.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        rows.push(
            serde_json::from_str(&line)
                .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, format!("{}:{}: {e}", path.display(), i + 1)))?,
        );
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn backoff_doubles_and_caps() {
        let p = RetryPolicy::default();
        let secs: Vec<u64> = (0..7).map(|a| p.delay(a).as_secs()).collect();
        assert_eq!(secs, vec![1, 2, 4, 8, 16, 30, 30]);
    }
}
