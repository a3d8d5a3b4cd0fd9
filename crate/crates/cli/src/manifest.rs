use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub completed_at: DateTime<Utc>,
    pub counts: BTreeMap<String, u64>,
}

/// Provenance for an output directory. Not part of the deterministic output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub toolkit_version: String,
    pub config_digest: String,
    pub created_at: DateTime<Utc>,
    pub updated_at: DateTime<Utc>,
    pub stages: BTreeMap<String, StageRecord>,
}

impl RunManifest {
    pub fn new(config_digest: &str) -> Self {
        let now = Utc::now();
        Self {
            toolkit_version: env!("CARGO_PKG_VERSION").to_string(),
            config_digest: config_digest.to_string(),
            created_at: now,
            updated_at: now,
            stages: BTreeMap::new(),
        }
    }

    pub fn load(out_dir: &Path) -> Result<Option<Self>, CliError> {
        let path = out_dir.join(MANIFEST_FILE);
        if !path.exists() {
            return Ok(None);
        }
        let text = fs::read_to_string(&path).map_err(CliError::io(&path))?;
        serde_json::from_str(&text)
            .map(Some)
            .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
    }

    /// Record a finished stage. A digest change starts a fresh stage list.
    pub fn record_stage(out_dir: &Path, digest: &str, stage: &str, counts: BTreeMap<String, u64>) -> Result<Self, CliError> {
        let mut manifest = match Self::load(out_dir)? {
            Some(m) if m.config_digest == digest => m,
            Some(m) => {
                log::info!("config digest changed ({} -> {digest}); manifest restarted", m.config_digest);
                Self::new(digest)
            }
            None => Self::new(digest),
        };
        let now = Utc::now();
        manifest.updated_at = now;
        manifest.toolkit_version = env!("CARGO_PKG_VERSION").to_string();
        manifest.stages.insert(stage.to_string(), StageRecord { completed_at: now, counts });
        fs::create_dir_all(out_dir).map_err(CliError::io(out_dir))?;
        let path = out_dir.join(MANIFEST_FILE);
        let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        fs::write(&path, text + "\n").map_err(CliError::io(&path))?;
        Ok(manifest)
    }
}
