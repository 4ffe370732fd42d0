use std::collections::HashMap;
use std::fs::{self, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use crate::session::{Action, CreateSession, LogEntry, Session, SessionError, SessionView};

/// Open sessions by id. The outer lock only guards the map; each session has
/// its own lock, so actions on one session run in order while different
/// sessions proceed independently.
#[derive(Debug, Default)]
pub struct Store {
    sessions: Mutex<HashMap<String, Arc<Mutex<Session>>>>,
    log_dir: Option<PathBuf>,
}

impl Store {
    pub fn new() -> Store {
        Store::default()
    }

    /// Also appends every accepted action to `<dir>/<id>.jsonl`.
    pub fn with_log_dir(dir: impl Into<PathBuf>) -> Store {
        Store {
            sessions: Mutex::default(),
            log_dir: Some(dir.into()),
        }
    }

    pub fn log_path(&self, id: &str) -> Option<PathBuf> {
        self.log_dir.as_ref().map(|d| d.join(format!("{id}.jsonl")))
    }

    fn session(&self, id: &str) -> Result<Arc<Mutex<Session>>, SessionError> {
        let map = self.sessions.lock().unwrap_or_else(|e| e.into_inner());
        map.get(id).cloned().ok_or_else(|| SessionError::NotFound(id.into()))
    }

    pub fn create(&self, body: &CreateSession) -> Result<SessionView, SessionError> {
        let id = uuid::Uuid::new_v4().simple().to_string();
        let session = Session::create(id.clone(), body)?;
        if let Some(dir) = &self.log_dir {
            fs::create_dir_all(dir).map_err(|e| SessionError::Io(e.to_string()))?;
        }
        self.append(&id, &session.log()[0])?;
        let view = session.view();
        let mut map = self.sessions.lock().unwrap_or_else(|e| e.into_inner());
        map.insert(id, Arc::new(Mutex::new(session)));
        Ok(view)
    }

    pub fn view(&self, id: &str) -> Result<SessionView, SessionError> {
        let session = self.session(id)?;
        let guard = session.lock().unwrap_or_else(|e| e.into_inner());
        Ok(guard.view())
    }

    pub fn act(&self, id: &str, action: &Action) -> Result<SessionView, SessionError> {
        let session = self.session(id)?;
        let mut guard = session.lock().unwrap_or_else(|e| e.into_inner());
        let view = guard.act(action)?;
        let entry = guard.log().last().expect("an accepted action is logged");
        self.append(id, entry)?;
        Ok(view)
    }

    pub fn delete(&self, id: &str) -> Result<(), SessionError> {
        let mut map = self.sessions.lock().unwrap_or_else(|e| e.into_inner());
        map.remove(id).map(drop).ok_or_else(|| SessionError::NotFound(id.into()))
    }

    pub fn log(&self, id: &str) -> Result<Vec<LogEntry>, SessionError> {
        let session = self.session(id)?;
        let guard = session.lock().unwrap_or_else(|e| e.into_inner());
        Ok(guard.log().to_vec())
    }

    fn append(&self, id: &str, entry: &LogEntry) -> Result<(), SessionError> {
        let Some(path) = self.log_path(id) else {
            return Ok(());
        };
        let io = |e: std::io::Error| SessionError::Io(e.to_string());
        let mut file = OpenOptions::new().create(true).append(true).open(path).map_err(io)?;
        let line = serde_json::to_string(entry).expect("log entries serialize");
        writeln!(file, "{line}").map_err(io)
    }
}

/// Reads a JSON-lines action log written by [`Store::with_log_dir`].
pub fn read_log(path: &Path) -> Result<Vec<LogEntry>, SessionError> {
    let file = fs::File::open(path).map_err(|e| SessionError::Io(e.to_string()))?;
    BufReader::new(file)
        .lines()
        .filter(|l| l.as_ref().map_or(true, |l| !l.trim().is_empty()))
        .enumerate()
        .map(|(i, line)| {
            let line = line.map_err(|e| SessionError::Io(e.to_string()))?;
            serde_json::from_str(&line).map_err(|e| SessionError::BadLog(format!("line {}: {e}", i + 1)))
        })
        .collect()
}
