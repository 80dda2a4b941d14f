//! Session files: a knowledge base plus the log of operations that built
//! it, stored as pretty-printed JSON with integers as decimal strings.

use std::fs::{File, OpenOptions};
use std::io::{Read, Seek, SeekFrom, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::engine::KnowledgeBase;
use crate::error::{Error, Result};

pub const FORMAT: &str = "bfcalc-session/1";

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Session {
    pub format: String,
    pub kb: KnowledgeBase,
    pub history: Vec<String>,
}

impl Default for Session {
    fn default() -> Self {
        Session {
            format: FORMAT.to_string(),
            kb: KnowledgeBase::new(),
            history: Vec::new(),
        }
    }
}

fn io(e: std::io::Error) -> Error {
    Error::Io(e.to_string())
}

impl Session {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, op: impl Into<String>) {
        self.history.push(op.into());
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("sessions always serialize");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let s: Session = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if s.format != FORMAT {
            return Err(Error::Parse(format!(
                "unknown session format `{}`",
                s.format
            )));
        }
        Ok(s)
    }

    /// Reads a session under a shared lock.
    pub fn load(path: &Path) -> Result<Self> {
        let mut f = File::open(path).map_err(io)?;
        f.lock_shared().map_err(io)?;
        let mut text = String::new();
        f.read_to_string(&mut text).map_err(io)?;
        f.unlock().map_err(io)?;
        Self::from_json(&text)
    }

    /// Writes the session under an exclusive lock.
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut f = OpenOptions::new()
            .create(true)
            .write(true)
            .truncate(false)
            .open(path)
            .map_err(io)?;
        f.lock().map_err(io)?;
        f.set_len(0).map_err(io)?;
        f.seek(SeekFrom::Start(0)).map_err(io)?;
        f.write_all(self.to_json().as_bytes()).map_err(io)?;
        f.sync_all().map_err(io)?;
        f.unlock().map_err(io)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{infer_in_place, sum_k3_canonical};
    use crate::par::Execution;

    #[test]
    fn round_trip() {
        let mut s = Session::new();
        let w = sum_k3_canonical(&mut s.kb, 3).unwrap();
        s.kb.declare_blowup(&w, 1).unwrap();
        infer_in_place(&mut s.kb, Execution::Sequential).unwrap();
        s.record("catalog mK3 3");
        let text = s.to_json();
        let back = Session::from_json(&text).unwrap();
        assert_eq!(back, s);
        assert_eq!(back.to_json(), text);
        assert!(text.contains("\"-16\"") || text.contains("\"-1\""));
    }

    #[test]
    fn rejects_other_formats() {
        let text = Session::new().to_json().replace(FORMAT, "other/9");
        assert!(matches!(Session::from_json(&text), Err(Error::Parse(_))));
    }
}
