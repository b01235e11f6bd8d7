//! Per-task checkpoints as JSON lines.
//!
//! The first line holds a fingerprint of the resolved config; each further
//! line is `{"key": [..], "value": ..}` for one finished task. A resumed run
//! must present the same fingerprint. A torn last line from an interrupted
//! write is dropped.

use std::collections::HashMap;
use std::fs::{self, File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Serialize, Deserialize)]
struct HeaderLine {
    fingerprint: String,
}

#[derive(Serialize, Deserialize)]
struct Entry {
    key: Vec<u64>,
    value: serde_json::Value,
}

#[derive(Debug)]
pub struct Checkpoint {
    path: PathBuf,
    file: Mutex<File>,
    done: HashMap<Vec<u64>, serde_json::Value>,
}

impl Checkpoint {
    /// `<out>.ckpt` next to an output file.
    pub fn path_for(out: &Path) -> PathBuf {
        let mut s = out.as_os_str().to_owned();
        s.push(".ckpt");
        PathBuf::from(s)
    }

    /// Opens for appending. With `resume` an existing file is loaded; without
    /// it, or when none exists, a fresh file is started.
    pub fn open(path: &Path, fingerprint: &str, resume: bool) -> Result<Self> {
        let mut done = HashMap::new();
        if resume && path.exists() {
            let text = fs::read_to_string(path)?;
            let mut lines = text.lines();
            let header: Option<HeaderLine> =
                lines.next().and_then(|l| serde_json::from_str(l).ok());
            match header {
                Some(h) if h.fingerprint == fingerprint => {}
                _ => {
                    return Err(Error::Config(format!(
                        "checkpoint {} belongs to a different config",
                        path.display()
                    )))
                }
            }
            for line in lines {
                if let Ok(e) = serde_json::from_str::<Entry>(line) {
                    done.insert(e.key, e.value);
                }
            }
            // Rewrite without any torn tail so appends start on a fresh line.
            let mut body = serde_json::to_string(&HeaderLine { fingerprint: fingerprint.into() })? + "\n";
            let mut keys: Vec<_> = done.keys().cloned().collect();
            keys.sort();
            for k in keys {
                body += &serde_json::to_string(&Entry { value: done[&k].clone(), key: k })?;
                body.push('\n');
            }
            fs::write(path, body)?;
        } else {
            fs::write(
                path,
                serde_json::to_string(&HeaderLine { fingerprint: fingerprint.into() })? + "\n",
            )?;
        }
        let file = OpenOptions::new().append(true).open(path)?;
        Ok(Checkpoint { path: path.to_path_buf(), file: Mutex::new(file), done })
    }

    pub fn len(&self) -> usize {
        self.done.len()
    }

    pub fn is_empty(&self) -> bool {
        self.done.is_empty()
    }

    pub fn get<T: DeserializeOwned>(&self, key: &[u64]) -> Option<T> {
        self.done.get(key).and_then(|v| serde_json::from_value(v.clone()).ok())
    }

    /// Appends one finished task; safe to call from worker threads.
    pub fn record<T: Serialize>(&self, key: &[u64], value: &T) -> Result<()> {
        let line = serde_json::to_string(&Entry {
            key: key.to_vec(),
            value: serde_json::to_value(value)?,
        })? + "\n";
        let mut f = self.file.lock().unwrap_or_else(|e| e.into_inner());
        f.write_all(line.as_bytes())?;
        f.flush()?;
        Ok(())
    }

    /// Deletes the file after the final output has been written.
    pub fn finish(self) -> Result<()> {
        drop(self.file);
        fs::remove_file(&self.path)?;
        Ok(())
    }
}
