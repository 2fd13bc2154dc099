//! Run manifests: every command that writes files also writes a manifest
//! recording the tool version, the fully resolved configuration, and the
//! SHA-256 of every input and output. The manifest holds no timestamps or
//! environment state, so a re-run over identical inputs reproduces it byte
//! for byte, and the stored configuration is everything needed to repeat
//! the run.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formats::{read_json, write_json};
use crate::hashing::{sha256_bytes, sha256_file};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileStamp {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub tool_version: String,
    pub command: String,
    /// The resolved configuration: defaults, config file, and flags merged,
    /// flags winning.
    pub config: serde_json::Value,
    pub inputs: BTreeMap<String, FileStamp>,
    pub outputs: BTreeMap<String, FileStamp>,
}

impl Manifest {
    pub fn new(command: &str, config: serde_json::Value) -> Manifest {
        Manifest {
            tool: "eex".to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            config,
            inputs: BTreeMap::new(),
            outputs: BTreeMap::new(),
        }
    }

    /// Hash of the resolved configuration; reports embed it so a report can
    /// be matched to the manifest that produced it.
    pub fn config_sha256(&self) -> Result<String> {
        let bytes = serde_json::to_vec(&self.config).map_err(|e| Error::Json {
            path: "<config>".into(),
            line: None,
            source: e,
        })?;
        Ok(sha256_bytes(&bytes))
    }

    pub fn stamp_input(&mut self, name: &str, path: &Path) -> Result<()> {
        let stamp = FileStamp { path: path.display().to_string(), sha256: sha256_file(path)? };
        self.inputs.insert(name.to_string(), stamp);
        Ok(())
    }

    pub fn stamp_output(&mut self, name: &str, path: &Path) -> Result<()> {
        let stamp = FileStamp { path: path.display().to_string(), sha256: sha256_file(path)? };
        self.outputs.insert(name.to_string(), stamp);
        Ok(())
    }
}

pub fn load_manifest(path: &Path) -> Result<Manifest> {
    read_json(path)
}

pub fn save_manifest(path: &Path, manifest: &Manifest) -> Result<()> {
    write_json(path, manifest)
}

/// `<file>.manifest.json` next to the main output of a command.
pub fn manifest_path(output: &Path) -> std::path::PathBuf {
    let mut name = output.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    name.push_str(".manifest.json");
    output.with_file_name(name)
}
