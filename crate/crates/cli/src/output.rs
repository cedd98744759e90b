//! Output files and the run manifest that lists them.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const MANIFEST: &str = "manifest.json";

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct OutputEntry {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    /// Resolved settings, flags and config file merged.
    pub spec: BTreeMap<String, String>,
    pub seed: Option<u64>,
    pub wall_clock_secs: f64,
    pub outputs: Vec<OutputEntry>,
}

/// Every run appends to `manifest.json` in the output directory.
#[derive(Debug, Default, Serialize, Deserialize)]
pub struct ManifestFile {
    pub runs: Vec<RunManifest>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

/// Collects the files one command writes.
pub struct Run {
    dir: PathBuf,
    command: String,
    spec: BTreeMap<String, String>,
    seed: Option<u64>,
    started: Instant,
    outputs: Vec<OutputEntry>,
}

impl Run {
    pub fn new(dir: &Path, command: &str) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            command: command.to_string(),
            spec: BTreeMap::new(),
            seed: None,
            started: Instant::now(),
            outputs: Vec::new(),
        })
    }

    pub fn set(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.spec.insert(key.to_string(), value.to_string());
        self
    }

    pub fn seed(&mut self, seed: u64) -> &mut Self {
        self.seed = Some(seed);
        self.set("seed", seed)
    }

    /// Writes `name` (relative to the output directory unless absolute).
    pub fn write(&mut self, name: &str, contents: &str) -> Result<PathBuf> {
        let path = self.dir.join(name);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
        let label = path
            .strip_prefix(&self.dir)
            .map(|p| p.to_string_lossy().into_owned())
            .unwrap_or_else(|_| path.to_string_lossy().into_owned());
        self.outputs.retain(|o| o.path != label);
        self.outputs.push(OutputEntry {
            path: label,
            sha256: sha256_hex(contents.as_bytes()),
        });
        Ok(path)
    }

    pub fn finish(self) -> Result<PathBuf> {
        let path = self.dir.join(MANIFEST);
        let mut file: ManifestFile = match fs::read_to_string(&path) {
            Ok(text) => serde_json::from_str(&text).with_context(|| format!("reading {}", path.display()))?,
            Err(_) => ManifestFile::default(),
        };
        file.runs.push(RunManifest {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: self.command,
            spec: self.spec,
            seed: self.seed,
            wall_clock_secs: self.started.elapsed().as_secs_f64(),
            outputs: self.outputs,
        });
        fs::write(&path, serde_json::to_string_pretty(&file)? + "\n")?;
        Ok(path)
    }
}
