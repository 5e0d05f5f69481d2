//! Run manifests: one JSON record per invocation tying outputs to the flags
//! and seed that produced them.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub subcommand: String,
    /// Every flag value after defaults were applied.
    pub params: Map<String, Value>,
    pub seed: Option<u64>,
    pub tool_version: String,
    /// Milliseconds since the Unix epoch.
    pub started_unix_ms: u64,
    pub finished_unix_ms: u64,
    pub outputs: Vec<PathBuf>,
    pub exit_code: i32,
}

pub fn unix_ms() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_millis() as u64)
}

impl RunManifest {
    pub fn start(subcommand: &str, params: Map<String, Value>, seed: Option<u64>) -> Self {
        Self {
            subcommand: subcommand.to_string(),
            params,
            seed,
            tool_version: crate::formats::GENERATOR_VERSION.to_string(),
            started_unix_ms: unix_ms(),
            finished_unix_ms: 0,
            outputs: Vec::new(),
            exit_code: 0,
        }
    }

    pub fn finish(&mut self, exit_code: i32) {
        self.exit_code = exit_code;
        self.finished_unix_ms = unix_ms();
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }

    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        std::fs::write(path, self.to_json())
    }

    pub fn read(path: &Path) -> std::io::Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(std::io::Error::other)
    }
}

/// `<output>.manifest.json` next to the first output.
pub fn default_path(output: &Path) -> PathBuf {
    let mut name = output.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    output.with_file_name(name)
}
