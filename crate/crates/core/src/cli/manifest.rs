use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::io::{write_json, IoError};

pub const MANIFEST_FILE: &str = "manifest.json";

/// One record per CLI run, written last into the output directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub command: String,
    /// Every parameter that influences the artifacts. Output directory and
    /// worker count are left out: neither changes any artifact.
    pub config: serde_json::Value,
    pub seed: Option<u64>,
    /// Artifact file names relative to the manifest, sorted.
    pub artifacts: Vec<String>,
    pub tool_version: String,
    pub exit_code: i32,
    /// `pass`, `fail` or `error`.
    pub status: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

/// Exit status of a subcommand plus the artifacts it produced.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub exit_code: i32,
    pub message: Option<String>,
    pub artifacts: Vec<String>,
}

impl Outcome {
    pub fn new(exit_code: i32, artifacts: Vec<String>) -> Self {
        Outcome {
            exit_code,
            message: None,
            artifacts,
        }
    }

    pub fn with_message(mut self, msg: impl Into<String>) -> Self {
        self.message = Some(msg.into());
        self
    }

    pub fn status(&self) -> &'static str {
        match self.exit_code {
            0 => "pass",
            1 => "fail",
            _ => "error",
        }
    }
}

/// Error surfaced by a subcommand with its exit code.
#[derive(Debug)]
pub struct CliFailure {
    pub exit_code: i32,
    pub message: String,
    pub artifacts: Vec<String>,
}

impl CliFailure {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliFailure {
            exit_code: 2,
            message: msg.into(),
            artifacts: Vec::new(),
        }
    }
}

impl From<IoError> for CliFailure {
    fn from(e: IoError) -> Self {
        CliFailure::usage(e.to_string())
    }
}

pub fn ensure_dir(dir: &Path) -> Result<(), CliFailure> {
    fs::create_dir_all(dir).map_err(|e| CliFailure::usage(format!("{}: {e}", dir.display())))
}

pub fn write_manifest(
    dir: &Path,
    command: &str,
    config: serde_json::Value,
    seed: Option<u64>,
    outcome: &Outcome,
) -> Result<PathBuf, IoError> {
    let mut artifacts = outcome.artifacts.clone();
    artifacts.sort();
    artifacts.dedup();
    let m = RunManifest {
        schema_version: crate::SCHEMA_VERSION,
        command: command.to_string(),
        config,
        seed,
        artifacts,
        tool_version: crate::TOOL_VERSION.to_string(),
        exit_code: outcome.exit_code,
        status: outcome.status().to_string(),
        message: outcome.message.clone(),
    };
    let path = dir.join(MANIFEST_FILE);
    write_json(&path, &m)?;
    Ok(path)
}
