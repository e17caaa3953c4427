use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::Value;

/// Everything needed to reproduce one output file.
///
/// Two manifests that differ only in `timestamp` describe byte-identical
/// outputs.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: Value,
    pub seeds: Vec<u64>,
    #[serde(rename = "toolVersion")]
    pub tool_version: String,
    pub methods: Vec<String>,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
}

impl RunManifest {
    pub fn new(command: &str, parameters: Value, seeds: Vec<u64>, methods: &[&str]) -> Self {
        Self {
            command: command.to_owned(),
            parameters,
            seeds,
            tool_version: env!("CARGO_PKG_VERSION").to_owned(),
            methods: methods.iter().map(|m| (*m).to_owned()).collect(),
            timestamp: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
        }
    }

    /// Sidecar path: `<out>.manifest.json`.
    pub fn path_for(out: &Path) -> PathBuf {
        let mut name = out.as_os_str().to_owned();
        name.push(".manifest.json");
        PathBuf::from(name)
    }

    pub fn write_beside(&self, out: &Path) -> io::Result<()> {
        let text = serde_json::to_string_pretty(self).map_err(io::Error::other)?;
        fs::write(Self::path_for(out), text + "\n")
    }
}
