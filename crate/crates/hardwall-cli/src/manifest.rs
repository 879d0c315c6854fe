//! Run manifests: a JSON record that fully reconstructs a run (canonical
//! config echo + command + overrides) and checksums its outputs.

use crate::config::RunConfig;
use crate::Result;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::path::Path;

pub const MANIFEST_SCHEMA: &str = "hardwall.run/v1";

#[derive(Debug, Serialize, Deserialize)]
pub struct OutputRecord {
    pub path: String,
    pub sha256: String,
    pub rows: usize,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema: String,
    pub version: String,
    pub command: String,
    pub csv_schema: String,
    /// canonical config text; parsing it reproduces the run inputs
    pub config_echo: String,
    pub seed: u64,
    pub n_list: Vec<u64>,
    pub num_samples: usize,
    pub wall_ms: u128,
    pub outputs: Vec<OutputRecord>,
    /// command-specific scalar results (expansion constants for `mgf`)
    pub constants: BTreeMap<String, f64>,
}

impl RunManifest {
    pub fn new(command: &str, csv_schema: &str, cfg: &RunConfig) -> Self {
        RunManifest {
            schema: MANIFEST_SCHEMA.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            csv_schema: csv_schema.to_string(),
            config_echo: crate::config::canonical_text(cfg),
            seed: cfg.seed,
            n_list: cfg.n_list.clone(),
            num_samples: cfg.num_samples,
            wall_ms: 0,
            outputs: Vec::new(),
            constants: BTreeMap::new(),
        }
    }

    /// Write `content` to `dir/name` and record its checksum.
    pub fn write_output(&mut self, dir: &Path, name: &str, content: &str) -> Result<()> {
        let digest = Sha256::digest(content.as_bytes());
        let rows = content.lines().count().saturating_sub(1);
        std::fs::write(dir.join(name), content)?;
        self.outputs.push(OutputRecord {
            path: name.to_string(),
            sha256: format!("{digest:x}"),
            rows,
        });
        Ok(())
    }

    pub fn save(&self, dir: &Path, name: &str) -> Result<()> {
        let text = serde_json::to_string_pretty(self).expect("manifest serializes");
        std::fs::write(dir.join(name), text)?;
        Ok(())
    }
}

/// Load a manifest and return its embedded config text (for replay).
pub fn replay_config_text(path: &Path) -> Result<String> {
    let text = std::fs::read_to_string(path)?;
    let manifest: RunManifest = serde_json::from_str(&text)
        .map_err(|e| crate::CliError::Config(format!("manifest parse: {e}")))?;
    Ok(manifest.config_echo)
}
