//! Run manifests: the resolved configuration, code version, wall clock and
//! content hashes of every artifact a run produced.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;

#[derive(Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub version: String,
    pub kind: String,
    pub seed: u64,
    pub wall_clock_seconds: f64,
    /// file name → fnv1a-64 hash of the bytes, hex.
    pub outputs: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub aborted: Option<String>,
    pub config: ExperimentConfig,
}

/// FNV-1a 64-bit over the raw bytes.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

pub fn hash_file(path: &Path) -> std::io::Result<String> {
    let bytes = std::fs::read(path)?;
    Ok(format!("{:016x}", fnv1a(&bytes)))
}

impl RunManifest {
    pub fn new(config: &ExperimentConfig, seed: u64, kind: &str) -> Self {
        Self {
            version: env!("CARGO_PKG_VERSION").into(),
            kind: kind.into(),
            seed,
            wall_clock_seconds: 0.0,
            outputs: BTreeMap::new(),
            aborted: None,
            config: config.clone(),
        }
    }

    pub fn record_output(&mut self, path: &Path) -> std::io::Result<()> {
        let name = path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        self.outputs.insert(name, hash_file(path)?);
        Ok(())
    }

    pub fn write(&self, path: &Path) -> anyhow::Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }
}
