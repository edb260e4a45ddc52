//! Run manifests: one JSON line per invocation, appended to a shared file,
//! recording the command, resolved configuration, input hashes, and timing.

use std::collections::BTreeMap;
use std::fs::OpenOptions;
use std::io::Write;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub tool_version: String,
    /// Resolved configuration values, including defaults.
    pub arguments: BTreeMap<String, String>,
    /// SHA-256 of every input file, keyed by path.
    pub input_hashes: BTreeMap<String, String>,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub started_unix_ms: u128,
    pub duration_ms: u128,
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        RunManifest {
            command: command.to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            arguments: BTreeMap::new(),
            input_hashes: BTreeMap::new(),
            status: "ok".to_string(),
            error: None,
            started_unix_ms: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_millis())
                .unwrap_or(0),
            duration_ms: 0,
        }
    }

    pub fn record_arg(&mut self, key: &str, value: impl ToString) {
        self.arguments.insert(key.to_string(), value.to_string());
    }

    pub fn record_input(&mut self, path: &Path, contents: &[u8]) {
        let digest = Sha256::digest(contents);
        self.input_hashes
            .insert(path.display().to_string(), hex_string(&digest));
    }
}

fn hex_string(bytes: &[u8]) -> String {
    let mut out = String::with_capacity(bytes.len() * 2);
    for b in bytes {
        out.push_str(&format!("{b:02x}"));
    }
    out
}

/// Formats a fingerprint (or any hash) as lowercase hex.
pub fn fingerprint_hex(fingerprint: &[u8; 32]) -> String {
    hex_string(fingerprint)
}

/// Appends one manifest as a JSON line; the file is never rewritten.
pub fn append_manifest(path: &Path, manifest: &RunManifest) -> std::io::Result<()> {
    let mut file = OpenOptions::new().create(true).append(true).open(path)?;
    let line = serde_json::to_string(manifest).expect("manifest serializes");
    writeln!(file, "{line}")
}
