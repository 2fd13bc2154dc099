//! Subcommand implementations.
//!
//! Each submodule owns one subcommand: its clap argument struct and a
//! `run` function. Shared plumbing lives here: the optional JSON config
//! file (flat keys named after the long flags, dashes as underscores;
//! explicit flags win), corpus loading with content hashes, and the rayon
//! pool behind `--jobs`.

pub mod calibrate;
pub mod evaluate;
pub mod few_shot;
pub mod probe;
pub mod queries;
pub mod report;
pub mod synth;
pub mod train;

use std::path::{Path, PathBuf};

use eex_core::corpus::{Split, SentenceRecord};
use eex_core::ontology::Ontology;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::formats::corpus::load_corpus;
use crate::formats::ontology::load_ontology;
use crate::hashing::sha256_file;

/// A loaded `--config` file: one flat JSON object shared by all
/// subcommands. Keys mirror the long flag names with underscores; keys a
/// command does not know are ignored so one file can configure a whole
/// pipeline.
pub struct ConfigFile {
    path: Option<PathBuf>,
    values: serde_json::Map<String, Value>,
}

impl ConfigFile {
    pub fn load(path: Option<&Path>) -> Result<ConfigFile> {
        let Some(path) = path else {
            return Ok(ConfigFile { path: None, values: serde_json::Map::new() });
        };
        let values: Value = crate::formats::read_json(path)?;
        match values {
            Value::Object(values) => Ok(ConfigFile { path: Some(path.to_path_buf()), values }),
            _ => Err(Error::format(path, "config file must hold one JSON object")),
        }
    }

    pub fn empty() -> ConfigFile {
        ConfigFile { path: None, values: serde_json::Map::new() }
    }

    fn bad_key(&self, key: &str, expected: &str) -> Error {
        let path = self.path.clone().unwrap_or_else(|| PathBuf::from("<config>"));
        Error::format(&path, format!("config key {key:?} must be {expected}"))
    }

    pub fn f64_opt(&self, key: &str) -> Result<Option<f64>> {
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => v.as_f64().map(Some).ok_or_else(|| self.bad_key(key, "a number")),
        }
    }

    pub fn u64_opt(&self, key: &str) -> Result<Option<u64>> {
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => v.as_u64().map(Some).ok_or_else(|| self.bad_key(key, "a non-negative integer")),
        }
    }

    pub fn usize_opt(&self, key: &str) -> Result<Option<usize>> {
        Ok(self.u64_opt(key)?.map(|v| v as usize))
    }

    pub fn bool_opt(&self, key: &str) -> Result<Option<bool>> {
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => v.as_bool().map(Some).ok_or_else(|| self.bad_key(key, "a boolean")),
        }
    }

    pub fn string_opt(&self, key: &str) -> Result<Option<String>> {
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => {
                v.as_str().map(|s| Some(s.to_string())).ok_or_else(|| self.bad_key(key, "a string"))
            }
        }
    }

    pub fn u64_list_opt(&self, key: &str) -> Result<Option<Vec<u64>>> {
        match self.values.get(key) {
            None => Ok(None),
            Some(Value::Array(items)) => items
                .iter()
                .map(|v| v.as_u64().ok_or_else(|| self.bad_key(key, "an array of integers")))
                .collect::<Result<Vec<_>>>()
                .map(Some),
            Some(_) => Err(self.bad_key(key, "an array of integers")),
        }
    }

    pub fn usize_list_opt(&self, key: &str) -> Result<Option<Vec<usize>>> {
        Ok(self.u64_list_opt(key)?.map(|v| v.into_iter().map(|x| x as usize).collect()))
    }

    pub fn string_list_opt(&self, key: &str) -> Result<Option<Vec<String>>> {
        match self.values.get(key) {
            None => Ok(None),
            Some(Value::Array(items)) => items
                .iter()
                .map(|v| {
                    v.as_str()
                        .map(|s| s.to_string())
                        .ok_or_else(|| self.bad_key(key, "an array of strings"))
                })
                .collect::<Result<Vec<_>>>()
                .map(Some),
            Some(_) => Err(self.bad_key(key, "an array of strings")),
        }
    }
}

/// Ontology + corpus, loaded and hashed once per command.
pub struct CorpusInputs {
    pub ontology: Ontology,
    pub records: Vec<SentenceRecord>,
    pub ontology_sha256: String,
    pub corpus_sha256: String,
}

impl CorpusInputs {
    pub fn load(ontology_path: &Path, corpus_path: &Path) -> Result<CorpusInputs> {
        let ontology = load_ontology(ontology_path)?;
        let records = load_corpus(corpus_path, &ontology)?;
        Ok(CorpusInputs {
            ontology,
            records,
            ontology_sha256: sha256_file(ontology_path)?,
            corpus_sha256: sha256_file(corpus_path)?,
        })
    }

    /// Cache key covering both inputs, for the vocabulary cache.
    pub fn content_key(&self) -> String {
        crate::hashing::sha256_bytes(
            format!("{}\n{}", self.ontology_sha256, self.corpus_sha256).as_bytes(),
        )
    }

    pub fn split_records(&self, split: Split) -> Vec<SentenceRecord> {
        self.records.iter().filter(|r| r.split == split).cloned().collect()
    }
}

/// Parses a `--split` flag value.
pub fn parse_split(text: &str) -> Result<Split> {
    Split::parse(text)
        .ok_or_else(|| Error::usage(format!("unknown split {text:?}; expected train, dev, or test")))
}

/// Parses one query-kind name such as `TE_STATEMENT`.
pub fn parse_kind(text: &str) -> Result<eex_core::querygen::QueryKind> {
    eex_core::querygen::QueryKind::parse(text).ok_or_else(|| {
        let known: Vec<&str> =
            eex_core::querygen::QueryKind::ALL.iter().map(|k| k.name()).collect();
        Error::usage(format!("unknown query kind {text:?}; expected one of {}", known.join(", ")))
    })
}

/// Builds the rayon pool behind `--jobs N`. `N = 1` still goes through a
/// one-thread pool so both paths execute identical code.
pub fn thread_pool(jobs: usize) -> Result<rayon::ThreadPool> {
    if jobs == 0 {
        return Err(Error::usage("--jobs must be at least 1"));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::usage(format!("could not start {jobs} worker threads: {e}")))
}
