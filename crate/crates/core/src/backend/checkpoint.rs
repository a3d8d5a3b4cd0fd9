//! Append-only JSON-lines checkpoint of finished response records.
//!
//! Each line is a record plus the `run_id` it belongs to; the key is
//! `(run_id, question_id, condition, respondent_index)` and later lines win.
//! A torn final line (no trailing newline, e.g. after a crash) is ignored.

use std::collections::HashMap;
use std::fs::{self, File, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::prompt::ConditionId;
use crate::response::ResponseRecord;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckpointEntry {
    pub run_id: String,
    #[serde(flatten)]
    pub record: ResponseRecord,
}

pub struct CheckpointStore {
    path: PathBuf,
    file: Mutex<File>,
}

impl CheckpointStore {
    pub fn open(path: impl AsRef<Path>) -> io::Result<Self> {
        let path = path.as_ref().to_path_buf();
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        // a torn tail would otherwise be glued to the next append
        if let Ok(bytes) = fs::read(&path) {
            if !bytes.is_empty() && !bytes.ends_with(b"\n") {
                let keep = bytes.iter().rposition(|&b| b == b'\n').map_or(0, |i| i + 1);
                fs::write(&path, &bytes[..keep])?;
            }
        }
        let file = OpenOptions::new().create(true).append(true).open(&path)?;
        Ok(Self {
            path,
            file: Mutex::new(file),
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn append(&self, run_id: &str, record: &ResponseRecord) -> io::Result<()> {
        let entry = CheckpointEntry {
            run_id: run_id.to_string(),
            record: record.clone(),
        };
        let mut line = serde_json::to_string(&entry).map_err(io::Error::other)?;
        line.push('\n');
        let mut file = self.file.lock().expect("checkpoint lock poisoned");
        file.write_all(line.as_bytes())?;
        file.flush()
    }

    /// Latest record per respondent for one `(run, question, condition)`.
    pub fn load(&self, run_id: &str, question_id: &str, condition: ConditionId) -> io::Result<HashMap<usize, ResponseRecord>> {
        let text = fs::read_to_string(&self.path)?;
        let complete = text.ends_with('\n');
        let lines: Vec<&str> = text.lines().collect();
        let mut out = HashMap::new();
        for (n, line) in lines.iter().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let entry: CheckpointEntry = match serde_json::from_str(line) {
                Ok(e) => e,
                Err(_) if n + 1 == lines.len() && !complete => break,
                Err(e) => {
                    return Err(io::Error::new(
                        io::ErrorKind::InvalidData,
                        format!("{}:{}: {e}", self.path.display(), n + 1),
                    ))
                }
            };
            if entry.run_id == run_id && entry.record.question_id == question_id && entry.record.condition == condition {
                out.insert(entry.record.respondent_index, entry.record);
            }
        }
        Ok(out)
    }
}
