//! On-disk schemas: every file the tool reads or writes lives here as a
//! serde struct, kept separate from the core types so wire compatibility
//! concerns stay next to the I/O code.
//!
//! All writers are deterministic: struct field order fixes JSON key order,
//! floats serialize as their shortest round-trip decimal, and JSONL emits
//! one compact object per line. Re-running a writer on equal inputs
//! reproduces the file byte for byte.

pub mod checkpoint;
pub mod corpus;
pub mod manifest;
pub mod ontology;
pub mod queries;
pub mod report;
pub mod scores;

use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};

/// Reads a JSONL file into typed lines; the error names the failing line.
pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let file = std::fs::File::open(path).map_err(|e| Error::read(path, e))?;
    let reader = BufReader::new(file);
    let mut items = Vec::new();
    for (index, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::read(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let item = serde_json::from_str(&line).map_err(|e| Error::Json {
            path: path.into(),
            line: Some(index + 1),
            source: e,
        })?;
        items.push(item);
    }
    Ok(items)
}

/// Writes items as compact JSONL, one object per line, trailing newline.
pub fn write_jsonl<T: Serialize>(path: &Path, items: &[T]) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::write(path, e))?;
    let mut writer = BufWriter::new(file);
    for item in items {
        let line = serde_json::to_string(item)
            .map_err(|e| Error::Json { path: path.into(), line: None, source: e })?;
        writer.write_all(line.as_bytes()).map_err(|e| Error::write(path, e))?;
        writer.write_all(b"\n").map_err(|e| Error::write(path, e))?;
    }
    writer.flush().map_err(|e| Error::write(path, e))
}

/// Reads one pretty or compact JSON document.
pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let bytes = std::fs::read(path).map_err(|e| Error::read(path, e))?;
    serde_json::from_slice(&bytes).map_err(|e| Error::Json {
        path: path.into(),
        line: None,
        source: e,
    })
}

/// Writes a pretty-printed JSON document with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Json { path: path.into(), line: None, source: e })?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Error::write(path, e))
}
