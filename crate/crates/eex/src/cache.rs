//! Optional vocabulary cache keyed by content. With `EEX_CACHE_DIR` set,
//! built vocabularies are stored as JSON under a hash of the ontology and
//! corpus bytes; without it nothing is read or written. The cache is a pure
//! shortcut: a hit, a miss, and a disabled cache all produce the same
//! vocabulary, and a corrupt entry is rebuilt and overwritten rather than
//! surfaced.

use std::path::{Path, PathBuf};

use eex_core::encoding::Vocabulary;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::formats::{read_json, write_json};

pub const CACHE_DIR_VAR: &str = "EEX_CACHE_DIR";

#[derive(Debug, Serialize, Deserialize)]
struct VocabFile {
    tokens: Vec<String>,
}

fn cache_path(dir: &Path, content_key: &str) -> PathBuf {
    dir.join(format!("vocab-{content_key}.json"))
}

fn try_load(path: &Path) -> Option<Vocabulary> {
    let file: VocabFile = read_json(path).ok()?;
    Vocabulary::from_tokens(file.tokens).ok()
}

/// Returns the cached vocabulary for `content_key` or builds, stores, and
/// returns a fresh one. Cache write failures are reported on stderr and
/// ignored; outputs never depend on cache state.
pub fn vocabulary_cached(content_key: &str, build: impl FnOnce() -> Vocabulary) -> Vocabulary {
    let Some(dir) = std::env::var_os(CACHE_DIR_VAR) else {
        return build();
    };
    let dir = PathBuf::from(dir);
    let path = cache_path(&dir, content_key);
    if let Some(vocab) = try_load(&path) {
        return vocab;
    }
    let vocab = build();
    if let Err(e) = store(&dir, &path, &vocab) {
        eprintln!("warning: vocabulary cache write failed: {e}");
    }
    vocab
}

fn store(dir: &Path, path: &Path, vocab: &Vocabulary) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| crate::error::Error::write(dir, e))?;
    write_json(path, &VocabFile { tokens: vocab.tokens().to_vec() })
}

/// Saves a vocabulary to an explicit path (the adapter-directory layout).
pub fn save_vocabulary(path: &Path, vocab: &Vocabulary) -> Result<()> {
    write_json(path, &VocabFile { tokens: vocab.tokens().to_vec() })
}

/// Loads a vocabulary saved by [`save_vocabulary`].
pub fn load_vocabulary(path: &Path) -> Result<Vocabulary> {
    let file: VocabFile = read_json(path)?;
    Ok(Vocabulary::from_tokens(file.tokens)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn build_vocab() -> Vocabulary {
        Vocabulary::build(["the attack happened", "marry me"])
    }

    #[test]
    fn vocabulary_round_trips_through_a_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("vocab.json");
        let vocab = build_vocab();
        save_vocabulary(&path, &vocab).unwrap();
        let loaded = load_vocabulary(&path).unwrap();
        assert_eq!(loaded.tokens(), vocab.tokens());
    }

    #[test]
    fn corrupt_cache_entries_are_rebuilt() {
        let dir = tempfile::tempdir().unwrap();
        let path = cache_path(dir.path(), "k");
        std::fs::write(&path, "not json").unwrap();
        assert!(try_load(&path).is_none());
    }
}
