//! Append-only JSON-lines response cache.

use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use vsearch_core::content_hash;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CacheKey {
    pub model_id: String,
    pub image_sha256: String,
    pub prompt_sha256: String,
}

impl CacheKey {
    pub fn new(model_id: &str, image: &[u8], prompt: &str) -> Self {
        Self {
            model_id: model_id.to_string(),
            image_sha256: content_hash(image),
            prompt_sha256: content_hash(prompt.as_bytes()),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct CacheLine {
    #[serde(flatten)]
    key: CacheKey,
    response: String,
}

struct Inner {
    map: HashMap<CacheKey, String>,
    file: Option<File>,
}

/// Cached model replies. Later lines for the same key override earlier
/// ones, both on load and at runtime.
pub struct ResponseCache {
    path: Option<PathBuf>,
    inner: Mutex<Inner>,
}

impl ResponseCache {
    /// A cache that lives only in memory.
    pub fn in_memory() -> Self {
        Self { path: None, inner: Mutex::new(Inner { map: HashMap::new(), file: None }) }
    }

    /// Loads `path` if it exists and appends new entries to it.
    /// Truncated trailing lines (from an interrupted run) are skipped.
    pub fn open(path: &Path) -> io::Result<Self> {
        let mut map = HashMap::new();
        if path.exists() {
            for line in BufReader::new(File::open(path)?).lines() {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                if let Ok(entry) = serde_json::from_str::<CacheLine>(&line) {
                    map.insert(entry.key, entry.response);
                }
            }
        }
        let file = OpenOptions::new().create(true).append(true).open(path)?;
        Ok(Self { path: Some(path.to_path_buf()), inner: Mutex::new(Inner { map, file: Some(file) }) })
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    pub fn get(&self, key: &CacheKey) -> Option<String> {
        self.inner.lock().expect("cache lock").map.get(key).cloned()
    }

    pub fn insert(&self, key: CacheKey, response: String) -> io::Result<()> {
        let mut inner = self.inner.lock().expect("cache lock");
        if let Some(file) = inner.file.as_mut() {
            let line = CacheLine { key: key.clone(), response: response.clone() };
            let mut text = serde_json::to_string(&line).map_err(io::Error::other)?;
            text.push('\n');
            file.write_all(text.as_bytes())?;
        }
        inner.map.insert(key, response);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.inner.lock().expect("cache lock").map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
