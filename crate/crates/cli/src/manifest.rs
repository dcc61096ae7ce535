use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

/// Provenance block embedded in every report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunManifest {
    pub version: String,
    pub subcommand: String,
    /// SHA-256 of the effective configuration as compact JSON.
    pub config_digest: String,
    /// SHA-256 of every input file, keyed by role.
    pub inputs: BTreeMap<String, String>,
    pub seeds: BTreeMap<String, u64>,
    pub timestamp: String,
}

impl RunManifest {
    pub fn new(subcommand: &str, config: &impl Serialize) -> CliResult<Self> {
        let json = serde_json::to_vec(config).map_err(CliError::data)?;
        Ok(RunManifest {
            version: env!("CARGO_PKG_VERSION").to_string(),
            subcommand: subcommand.to_string(),
            config_digest: sha256_hex(&json),
            inputs: BTreeMap::new(),
            seeds: BTreeMap::new(),
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        })
    }

    pub fn input(&mut self, role: &str, bytes: &[u8]) {
        self.inputs.insert(role.to_string(), sha256_hex(bytes));
    }

    pub fn seed(&mut self, name: &str, seed: u64) {
        self.seeds.insert(name.to_string(), seed);
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn file_digest(path: &Path) -> CliResult<String> {
    let bytes = std::fs::read(path).map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
    Ok(sha256_hex(&bytes))
}
