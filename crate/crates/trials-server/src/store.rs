//! In-memory sessions backed by per-session JSON-lines event logs.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};
use vsearch_core::human::{Session, SessionError, SessionEvent};

/// A session plus the open handle of its event log.
pub struct Slot {
    pub session: Session,
    log: Option<File>,
}

impl Slot {
    /// Appends `event` to the log before the caller reports success.
    pub fn append(&mut self, event: &SessionEvent) -> io::Result<()> {
        if let Some(file) = self.log.as_mut() {
            let mut line = serde_json::to_string(event).map_err(io::Error::other)?;
            line.push('\n');
            file.write_all(line.as_bytes())?;
            file.flush()?;
        }
        Ok(())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("{path}: {source}")]
    Replay { path: PathBuf, source: SessionError },
    #[error("{path}:{line}: {source}")]
    Parse { path: PathBuf, line: usize, source: serde_json::Error },
}

/// Sessions keyed by id. Each session has its own lock, so requests for
/// different sessions never contend.
#[derive(Default)]
pub struct Store {
    log_dir: Option<PathBuf>,
    sessions: RwLock<HashMap<String, Arc<Mutex<Slot>>>>,
}

impl Store {
    pub fn in_memory() -> Self {
        Self::default()
    }

    /// Opens `dir`, replaying every `*.jsonl` log found there.
    pub fn open(dir: &Path) -> Result<Self, StoreError> {
        std::fs::create_dir_all(dir)?;
        let mut sessions = HashMap::new();
        let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "jsonl"))
            .collect();
        paths.sort();
        for path in paths {
            let mut events = Vec::new();
            for (i, line) in BufReader::new(File::open(&path)?).lines().enumerate() {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                let event = serde_json::from_str(&line)
                    .map_err(|source| StoreError::Parse { path: path.clone(), line: i + 1, source })?;
                events.push(event);
            }
            let session = Session::replay(&events).map_err(|source| StoreError::Replay { path: path.clone(), source })?;
            let log = OpenOptions::new().append(true).open(&path)?;
            sessions.insert(session.id.clone(), Arc::new(Mutex::new(Slot { session, log: Some(log) })));
        }
        Ok(Self { log_dir: Some(dir.to_path_buf()), sessions: RwLock::new(sessions) })
    }

    /// Registers a new session and writes its creation event.
    pub fn insert(&self, session: Session) -> io::Result<Arc<Mutex<Slot>>> {
        let log = match &self.log_dir {
            Some(dir) => Some(OpenOptions::new().create_new(true).append(true).open(dir.join(format!("{}.jsonl", session.id)))?),
            None => None,
        };
        let created = session.created_event();
        let id = session.id.clone();
        let mut slot = Slot { session, log };
        slot.append(&created)?;
        let slot = Arc::new(Mutex::new(slot));
        self.sessions.write().expect("store lock").insert(id, slot.clone());
        Ok(slot)
    }

    pub fn get(&self, id: &str) -> Option<Arc<Mutex<Slot>>> {
        self.sessions.read().expect("store lock").get(id).cloned()
    }

    /// Every session, sorted by id.
    pub fn all(&self) -> Vec<Arc<Mutex<Slot>>> {
        let map = self.sessions.read().expect("store lock");
        let mut ids: Vec<&String> = map.keys().collect();
        ids.sort();
        ids.into_iter().map(|id| map[id].clone()).collect()
    }
}
