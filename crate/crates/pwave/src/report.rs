//! Serializable run reports and the artifact manifest.

use crate::error::Result;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

/// Outcome of one Newton solve.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SolveReport {
    pub converged: bool,
    pub iterations: usize,
    pub final_residual: f64,
    pub tol: f64,
    /// Number of iterations that needed line-search damping.
    pub damping_events: usize,
    /// Wall-clock time of the solve; not serialized so that artifacts are
    /// byte-identical across reruns.
    #[serde(skip)]
    pub wall_ms: f64,
}

/// Outcome of a gradient-flow run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FlowReport {
    pub steps: usize,
    pub halvings: usize,
    pub initial_energy: f64,
    pub final_energy: f64,
    pub initial_residual_sup: f64,
    pub final_residual_sup: f64,
    /// Energy after each accepted step (index 0 is the initial energy).
    pub energy_trace: Vec<f64>,
}

/// One artifact written by a pipeline run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ArtifactEntry {
    /// Path relative to the output directory.
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

/// Manifest persisted next to every run's artifacts: the command, the full
/// effective configuration, a content hash of that configuration, and a
/// digest of every file written. Reruns with the same configuration produce
/// byte-identical artifacts and an identical manifest.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub command: String,
    pub config: serde_json::Value,
    pub config_sha256: String,
    pub artifacts: Vec<ArtifactEntry>,
}

/// Content hash in git-blob style: sha256 over "blob {len}\0" + bytes.
pub fn blob_sha256(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(format!("blob {}\0", bytes.len()).as_bytes());
    hasher.update(bytes);
    let out = hasher.finalize();
    out.iter().map(|b| format!("{b:02x}")).collect()
}

/// Canonical hash of a configuration value (serialized with sorted keys —
/// serde_json maps preserve insertion order, so serialize through BTreeMap).
pub fn config_sha256(config: &serde_json::Value) -> String {
    let canonical = canonicalize(config);
    blob_sha256(canonical.to_string().as_bytes())
}

fn canonicalize(v: &serde_json::Value) -> serde_json::Value {
    match v {
        serde_json::Value::Object(map) => {
            let sorted: std::collections::BTreeMap<_, _> =
                map.iter().map(|(k, val)| (k.clone(), canonicalize(val))).collect();
            serde_json::to_value(sorted).expect("canonical map reserialization")
        }
        serde_json::Value::Array(items) => {
            serde_json::Value::Array(items.iter().map(canonicalize).collect())
        }
        other => other.clone(),
    }
}

/// Collects artifacts as they are written and finalizes the manifest.
pub struct ManifestBuilder {
    command: String,
    config: serde_json::Value,
    out_dir: PathBuf,
    artifacts: Vec<ArtifactEntry>,
}

impl ManifestBuilder {
    pub fn new(command: &str, config: serde_json::Value, out_dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(out_dir)?;
        Ok(Self {
            command: command.to_string(),
            config,
            out_dir: out_dir.to_path_buf(),
            artifacts: Vec::new(),
        })
    }

    pub fn out_dir(&self) -> &Path {
        &self.out_dir
    }

    /// Register a file already written under the output directory.
    pub fn record(&mut self, rel_path: &str) -> Result<()> {
        let full = self.out_dir.join(rel_path);
        let bytes = std::fs::read(&full)?;
        self.artifacts.push(ArtifactEntry {
            path: rel_path.to_string(),
            bytes: bytes.len() as u64,
            sha256: blob_sha256(&bytes),
        });
        Ok(())
    }

    /// Serialize a JSON report into the output directory and record it.
    pub fn write_json<T: Serialize>(&mut self, rel_path: &str, value: &T) -> Result<()> {
        let full = self.out_dir.join(rel_path);
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        std::fs::write(&full, text)?;
        self.record(rel_path)
    }

    /// Write `manifest.json` and return the manifest.
    pub fn finish(self) -> Result<Manifest> {
        let manifest = Manifest {
            command: self.command,
            config_sha256: config_sha256(&self.config),
            config: self.config,
            artifacts: self.artifacts,
        };
        let mut text = serde_json::to_string_pretty(&manifest)?;
        text.push('\n');
        std::fs::write(self.out_dir.join("manifest.json"), text)?;
        Ok(manifest)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn blob_hash_matches_fixed_vector() {
        // Hash is prefix-framed, so content and length both matter.
        let a = blob_sha256(b"hello");
        let b = blob_sha256(b"hello");
        let c = blob_sha256(b"hello!");
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(a.len(), 64);
    }

    #[test]
    fn config_hash_is_key_order_independent() {
        let v1: serde_json::Value =
            serde_json::from_str(r#"{"b": 1, "a": {"y": 2, "x": [3, 4]}}"#).unwrap();
        let v2: serde_json::Value =
            serde_json::from_str(r#"{"a": {"x": [3, 4], "y": 2}, "b": 1}"#).unwrap();
        assert_eq!(config_sha256(&v1), config_sha256(&v2));
        let v3: serde_json::Value =
            serde_json::from_str(r#"{"a": {"x": [4, 3], "y": 2}, "b": 1}"#).unwrap();
        assert_ne!(config_sha256(&v1), config_sha256(&v3));
    }
}
