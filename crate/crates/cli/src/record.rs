//! Run records: a deterministic body plus wall-clock timestamps kept apart
//! from it.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use aspi_core::arena::{LearnVerdict, Transcript};
use aspi_core::machine::MACHINE_MODEL_ID;
use aspi_core::measures::AspiProfile;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::ExperimentConfig;

pub const SCHEMA_VERSION: u32 = 1;
pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlayRecord {
    pub predictor: String,
    pub evader: String,
    pub verdict: LearnVerdict,
    pub mispredictions: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transcript: Option<Transcript>,
}

/// Everything that must be identical across reruns of the same config.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecordBody {
    pub command: String,
    pub artifact_version: String,
    pub machine_model: String,
    pub config_digest: String,
    pub config: ExperimentConfig,
    #[serde(default)]
    pub profiles: Vec<AspiProfile>,
    #[serde(default)]
    pub plays: Vec<PlayRecord>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Timestamps {
    pub started_unix_ms: u128,
    pub finished_unix_ms: u128,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunRecord {
    pub schema_version: u32,
    pub body: RecordBody,
    pub timestamps: Timestamps,
}

#[derive(Debug, Error)]
pub enum RecordError {
    #[error("record schema version {found} is not supported (expected {expected})")]
    SchemaMismatch { found: u64, expected: u32 },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: malformed record: {source}")]
    Format { path: PathBuf, source: serde_json::Error },
}

pub fn now_ms() -> u128 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis())
        .unwrap_or(0)
}

impl RecordBody {
    pub fn new(command: &str, config: &ExperimentConfig) -> Self {
        Self {
            command: command.to_string(),
            artifact_version: ARTIFACT_VERSION.to_string(),
            machine_model: MACHINE_MODEL_ID.to_string(),
            config_digest: config.digest(),
            config: config.clone(),
            profiles: Vec::new(),
            plays: Vec::new(),
        }
    }

    /// The canonical serialized body.
    pub fn to_bytes(&self) -> Vec<u8> {
        serde_json::to_vec_pretty(self).expect("record body serializes")
    }
}

impl RunRecord {
    pub fn new(body: RecordBody, started_unix_ms: u128) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            body,
            timestamps: Timestamps {
                started_unix_ms,
                finished_unix_ms: now_ms(),
            },
        }
    }
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<(), RecordError> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|source| RecordError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    std::fs::write(path, bytes).map_err(|source| RecordError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn persist(record: &RunRecord, path: &Path) -> Result<(), RecordError> {
    let bytes = serde_json::to_vec_pretty(record).expect("record serializes");
    write_file(path, &bytes)
}

/// Reads a record, refusing any schema version other than the current one.
pub fn load(path: &Path) -> Result<RunRecord, RecordError> {
    let bytes = std::fs::read(path).map_err(|source| RecordError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let format = |source| RecordError::Format {
        path: path.to_path_buf(),
        source,
    };
    let value: serde_json::Value = serde_json::from_slice(&bytes).map_err(format)?;
    let found = value.get("schema_version").and_then(|v| v.as_u64()).unwrap_or(0);
    if found != u64::from(SCHEMA_VERSION) {
        return Err(RecordError::SchemaMismatch {
            found,
            expected: SCHEMA_VERSION,
        });
    }
    serde_json::from_value(value).map_err(format)
}
