//! Encoder selection by URI and the saved-model ("adapter") directory
//! layout.
//!
//! URIs: `mock:<seed>` (fixed hash encoder), `tiny:<seed>` (trainable),
//! `adapter:<dir>` (a directory written by `eex train`), and `oracle` (an
//! answer-keyed test double for plumbing checks). The seed defaults to 0
//! when omitted.
//!
//! An adapter directory holds `checkpoint.eex` (the tensors), `vocab.json`
//! (the tokenizer state), and `meta.json` (training provenance). Probing
//! with an adapter uses the adapter's own vocabulary, never one rebuilt
//! from the corpus.

use std::path::{Path, PathBuf};

use eex_core::corpus::SentenceRecord;
use eex_core::encoding::{
    Encoder, MockEncoder, OracleEncoder, TinyEncoder, Vocabulary, ORACLE_DIM,
};
use eex_core::heads::PolarParams;
use eex_core::ontology::Ontology;
use eex_core::probing::ProbeHeads;
use eex_core::querygen::vocabulary_seed_texts;
use eex_core::training::{Shortfall, TrainedHeads};
use serde::{Deserialize, Serialize};

use crate::cache::{load_vocabulary, save_vocabulary, vocabulary_cached};
use crate::error::{Error, Result};
use crate::formats::checkpoint::{load_checkpoint, save_checkpoint, Checkpoint};
use crate::formats::{read_json, write_json};

pub const ADAPTER_CHECKPOINT_FILE: &str = "checkpoint.eex";
pub const ADAPTER_VOCAB_FILE: &str = "vocab.json";
pub const ADAPTER_META_FILE: &str = "meta.json";

/// A parsed encoder URI.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EncoderSpec {
    Mock { seed: u64 },
    Tiny { seed: u64 },
    Adapter { dir: PathBuf },
    Oracle,
}

impl EncoderSpec {
    /// Parses `mock[:<seed>]`, `tiny[:<seed>]`, `adapter:<dir>`, `oracle`.
    pub fn parse(uri: &str) -> Result<EncoderSpec> {
        let (scheme, rest) = match uri.split_once(':') {
            Some((scheme, rest)) => (scheme, Some(rest)),
            None => (uri, None),
        };
        let seed = |rest: Option<&str>| -> Result<u64> {
            match rest {
                None | Some("") => Ok(0),
                Some(text) => text
                    .parse()
                    .map_err(|_| Error::usage(format!("encoder seed {text:?} is not an integer"))),
            }
        };
        match scheme {
            "mock" => Ok(EncoderSpec::Mock { seed: seed(rest)? }),
            "tiny" => Ok(EncoderSpec::Tiny { seed: seed(rest)? }),
            "adapter" => match rest {
                Some(dir) if !dir.is_empty() => Ok(EncoderSpec::Adapter { dir: dir.into() }),
                _ => Err(Error::usage("adapter URI needs a directory: adapter:<dir>")),
            },
            "oracle" => match rest {
                None | Some("") => Ok(EncoderSpec::Oracle),
                Some(_) => Err(Error::usage("the oracle encoder takes no argument")),
            },
            other => Err(Error::usage(format!(
                "unknown encoder scheme {other:?}; expected mock:<seed>, tiny:<seed>, adapter:<dir>, or oracle"
            ))),
        }
    }

    /// Canonical URI text, stored in manifests.
    pub fn describe(&self) -> String {
        match self {
            EncoderSpec::Mock { seed } => format!("mock:{seed}"),
            EncoderSpec::Tiny { seed } => format!("tiny:{seed}"),
            EncoderSpec::Adapter { dir } => format!("adapter:{}", dir.display()),
            EncoderSpec::Oracle => "oracle".to_string(),
        }
    }
}

/// Builds the closed vocabulary for a corpus: every record text plus the
/// ontology's query-template surface forms, so generated queries tokenize
/// without unknowns.
pub fn build_vocabulary(records: &[SentenceRecord], ontology: &Ontology) -> Vocabulary {
    let seeds = vocabulary_seed_texts(ontology);
    Vocabulary::build(
        records.iter().map(|r| r.text.as_str()).chain(seeds.iter().map(String::as_str)),
    )
}

/// [`build_vocabulary`] through the content-keyed cache.
pub fn build_vocabulary_cached(
    records: &[SentenceRecord],
    ontology: &Ontology,
    content_key: &str,
) -> Vocabulary {
    vocabulary_cached(content_key, || build_vocabulary(records, ontology))
}

/// Everything the probe pipeline needs from an encoder URI.
pub struct ProbeSetup {
    pub encoder: Box<dyn Encoder + Send + Sync>,
    pub vocab: Vocabulary,
    pub heads: ProbeHeads,
}

/// Resolves an encoder URI for zero-shot probing over the given corpus.
///
/// Fixed encoders get seeded probe heads; the oracle gets its matched
/// saturating heads; an adapter gets its own trained heads, with the unused
/// polar head zeroed.
pub fn probe_setup(
    spec: &EncoderSpec,
    records: &[SentenceRecord],
    ontology: &Ontology,
    content_key: &str,
    head_seed: u64,
    max_desc_sentences: usize,
) -> Result<ProbeSetup> {
    match spec {
        EncoderSpec::Mock { seed } => {
            let vocab = build_vocabulary_cached(records, ontology, content_key);
            let encoder = MockEncoder::new(*seed, vocab.len());
            let heads = ProbeHeads::seeded(encoder.dim(), head_seed);
            Ok(ProbeSetup { encoder: Box::new(encoder), vocab, heads })
        }
        EncoderSpec::Tiny { seed } => {
            let vocab = build_vocabulary_cached(records, ontology, content_key);
            let encoder = TinyEncoder::new(*seed, vocab.len())?;
            let heads = ProbeHeads::seeded(encoder.dim(), head_seed);
            Ok(ProbeSetup { encoder: Box::new(encoder), vocab, heads })
        }
        EncoderSpec::Oracle => {
            let vocab = build_vocabulary_cached(records, ontology, content_key);
            let encoder = OracleEncoder::from_records(records, ontology, &vocab, max_desc_sentences)?;
            Ok(ProbeSetup {
                encoder: Box::new(encoder),
                vocab,
                heads: ProbeHeads::oracle(ORACLE_DIM),
            })
        }
        EncoderSpec::Adapter { dir } => {
            let adapter = load_adapter(dir)?;
            let dim = adapter.heads.entailment.dim;
            let heads = ProbeHeads {
                entailment: adapter.heads.entailment.clone(),
                polar: PolarParams::zeros(dim),
                span: adapter.heads.span.clone(),
            };
            Ok(ProbeSetup { encoder: adapter.encoder, vocab: adapter.vocab, heads })
        }
    }
}

/// A trainable encoder family: few-shot runs build one fresh encoder per
/// seed, offsetting the URI's base seed by the run seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrainableKind {
    Mock { base: u64 },
    Tiny { base: u64 },
}

impl TrainableKind {
    pub fn from_spec(spec: &EncoderSpec) -> Result<TrainableKind> {
        match spec {
            EncoderSpec::Mock { seed } => Ok(TrainableKind::Mock { base: *seed }),
            EncoderSpec::Tiny { seed } => Ok(TrainableKind::Tiny { base: *seed }),
            _ => Err(Error::usage(
                "training needs a trainable encoder URI: mock:<seed> or tiny:<seed>",
            )),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            TrainableKind::Mock { .. } => "mock",
            TrainableKind::Tiny { .. } => "tiny",
        }
    }

    pub fn seed_for(self, run_seed: u64) -> u64 {
        match self {
            TrainableKind::Mock { base } | TrainableKind::Tiny { base } => {
                base.wrapping_add(run_seed)
            }
        }
    }

    pub fn build(self, run_seed: u64, vocab_len: usize) -> Result<Box<dyn Encoder + Send + Sync>> {
        let seed = self.seed_for(run_seed);
        match self {
            TrainableKind::Mock { .. } => Ok(Box::new(MockEncoder::new(seed, vocab_len))),
            TrainableKind::Tiny { .. } => Ok(Box::new(TinyEncoder::new(seed, vocab_len)?)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShortfallFile {
    pub event: String,
    pub requested: usize,
    pub available: usize,
}

/// Training provenance stored next to the checkpoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdapterMeta {
    pub encoder: String,
    pub dim: usize,
    pub vocab_size: usize,
    pub epoch_losses: Vec<f64>,
    pub shortfalls: Vec<ShortfallFile>,
    /// Resolved configuration of the training run.
    pub train_config: serde_json::Value,
}

/// A loaded adapter directory.
pub struct Adapter {
    pub encoder: Box<dyn Encoder + Send + Sync>,
    pub vocab: Vocabulary,
    pub heads: TrainedHeads,
    pub meta: AdapterMeta,
}

/// Writes the three-file adapter layout.
pub fn save_adapter(
    dir: &Path,
    kind: TrainableKind,
    run_seed: u64,
    encoder: &dyn Encoder,
    vocab: &Vocabulary,
    heads: &TrainedHeads,
    shortfalls: &[Shortfall],
    train_config: serde_json::Value,
) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::write(dir, e))?;
    let checkpoint = Checkpoint::from_trained(
        kind.name(),
        kind.seed_for(run_seed),
        vocab.len(),
        encoder,
        heads,
    );
    save_checkpoint(&dir.join(ADAPTER_CHECKPOINT_FILE), &checkpoint)?;
    save_vocabulary(&dir.join(ADAPTER_VOCAB_FILE), vocab)?;
    let meta = AdapterMeta {
        encoder: kind.name().to_string(),
        dim: checkpoint.dim,
        vocab_size: vocab.len(),
        epoch_losses: heads.epoch_losses.clone(),
        shortfalls: shortfalls
            .iter()
            .map(|s| ShortfallFile {
                event: s.event.clone(),
                requested: s.requested,
                available: s.available,
            })
            .collect(),
        train_config,
    };
    write_json(&dir.join(ADAPTER_META_FILE), &meta)
}

/// Loads and cross-checks an adapter directory.
pub fn load_adapter(dir: &Path) -> Result<Adapter> {
    let checkpoint_path = dir.join(ADAPTER_CHECKPOINT_FILE);
    let checkpoint = load_checkpoint(&checkpoint_path)?;
    let vocab = load_vocabulary(&dir.join(ADAPTER_VOCAB_FILE))?;
    let meta: AdapterMeta = read_json(&dir.join(ADAPTER_META_FILE))?;
    if checkpoint.vocab_size != vocab.len() {
        return Err(Error::format(
            &checkpoint_path,
            format!(
                "checkpoint was trained over {} tokens but vocab.json holds {}",
                checkpoint.vocab_size,
                vocab.len()
            ),
        ));
    }
    let mut encoder: Box<dyn Encoder + Send + Sync> = match checkpoint.encoder.as_str() {
        "mock" => Box::new(MockEncoder::new(checkpoint.encoder_seed, vocab.len())),
        "tiny" => Box::new(TinyEncoder::new(checkpoint.encoder_seed, vocab.len())?),
        other => {
            return Err(Error::format(
                &checkpoint_path,
                format!("unknown encoder family {other:?}"),
            ));
        }
    };
    let params = checkpoint.encoder_params(&checkpoint_path, &encoder.param_specs())?;
    encoder.set_params(&params)?;
    let heads = checkpoint.heads(&checkpoint_path, meta.epoch_losses.clone())?;
    Ok(Adapter { encoder, vocab, heads, meta })
}
