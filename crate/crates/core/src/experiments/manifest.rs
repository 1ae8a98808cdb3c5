use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value as Json;
use sha2::{Digest, Sha256};

use super::{ExperimentConfig, RunOutput};
use crate::error::{Error, Result};

/// Outcome of one built-in sanity check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileEntry {
    pub path: String,
    pub rows: usize,
    pub sha256: String,
}

/// Record of one run, written as `manifest_<id>.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub experiment: String,
    /// SHA-256 of the canonical JSON of experiment, seed and parameters.
    pub config_hash: String,
    pub seed: u64,
    pub parameters: BTreeMap<String, Json>,
    pub files: Vec<FileEntry>,
    pub checks: Vec<Check>,
}

impl Manifest {
    pub fn file_name(experiment: &str) -> String {
        format!("manifest_{experiment}.json")
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

pub(crate) fn config_hash(experiment: &str, seed: u64, parameters: &BTreeMap<String, Json>) -> String {
    let canonical = serde_json::json!({
        "experiment": experiment,
        "seed": seed,
        "parameters": parameters,
    });
    hex(&Sha256::digest(canonical.to_string().as_bytes()))
}

pub(crate) fn write_all(
    config: &ExperimentConfig,
    parameters: BTreeMap<String, Json>,
    output: RunOutput,
) -> Result<Manifest> {
    let experiment = config.id.as_str();
    let hash = config_hash(experiment, config.seed, &parameters);
    std::fs::create_dir_all(&config.out)?;
    let mut files = Vec::with_capacity(output.tables.len());
    for (name, table) in &output.tables {
        let text = format!(
            "# experiment={experiment}\n# config_hash={hash}\n# seed={}\n{}",
            config.seed,
            table.render()
        );
        std::fs::write(config.out.join(name), &text)?;
        files.push(FileEntry {
            path: name.clone(),
            rows: table.rows(),
            sha256: hex(&Sha256::digest(text.as_bytes())),
        });
    }
    let manifest = Manifest {
        experiment: experiment.to_string(),
        config_hash: hash,
        seed: config.seed,
        parameters,
        files,
        checks: output.checks,
    };
    let mut json = serde_json::to_string_pretty(&manifest).map_err(|e| Error::Config(e.to_string()))?;
    json.push('\n');
    std::fs::write(config.out.join(Manifest::file_name(experiment)), json)?;
    Ok(manifest)
}
