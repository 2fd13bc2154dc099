//! `eex train`: fits a trainable encoder plus task heads on a K-shot
//! sample of the train split and writes an adapter directory.

use std::path::PathBuf;

use clap::Args;
use eex_core::corpus::Split;
use eex_core::training::{sample_few_shot, train_few_shot, FewShotConfig};
use serde_json::json;

use crate::encoders::{build_vocabulary_cached, save_adapter, EncoderSpec, TrainableKind};
use crate::error::Result;
use crate::formats::manifest::{save_manifest, Manifest};

use super::{parse_kind, ConfigFile, CorpusInputs};

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Ontology JSON file.
    #[arg(long)]
    pub ontology: PathBuf,
    /// Corpus JSONL file.
    #[arg(long)]
    pub corpus: PathBuf,
    /// Trainable encoder URI: mock:<seed> or tiny:<seed>.
    #[arg(long)]
    pub encoder: Option<String>,
    /// Adapter directory to write.
    #[arg(long)]
    pub out: PathBuf,
    /// Positive sentences sampled per event.
    #[arg(long)]
    pub k: Option<usize>,
    /// Negative statements per positive.
    #[arg(long)]
    pub negative_ratio: Option<usize>,
    /// Adam learning rate.
    #[arg(long)]
    pub lr: Option<f64>,
    /// Training epochs.
    #[arg(long)]
    pub epochs: Option<usize>,
    /// Batch size (gradients are averaged per batch).
    #[arg(long)]
    pub batch_size: Option<usize>,
    /// Description sentences appended to entailment statements.
    #[arg(long)]
    pub max_desc: Option<usize>,
    /// Argument query kind to train the span head with.
    #[arg(long)]
    pub arg_kind: Option<String>,
    /// Sampling and shuffling seed.
    #[arg(long)]
    pub seed: Option<u64>,
}

/// Resolves the shared training knobs (flags over config over defaults).
pub fn resolve_config(
    args_k: Option<usize>,
    args_negative_ratio: Option<usize>,
    args_lr: Option<f64>,
    args_epochs: Option<usize>,
    args_batch_size: Option<usize>,
    args_max_desc: Option<usize>,
    args_arg_kind: Option<&str>,
    args_seed: Option<u64>,
    config: &ConfigFile,
) -> crate::error::Result<FewShotConfig> {
    let defaults = FewShotConfig::default();
    let arg_kind = match args_arg_kind.map(str::to_string).or(config.string_opt("arg_kind")?) {
        Some(name) => parse_kind(&name)?,
        None => defaults.arg_kind,
    };
    Ok(FewShotConfig {
        k: args_k.or(config.usize_opt("k")?).unwrap_or(defaults.k),
        negative_ratio: args_negative_ratio
            .or(config.usize_opt("negative_ratio")?)
            .unwrap_or(defaults.negative_ratio),
        learning_rate: args_lr.or(config.f64_opt("lr")?).unwrap_or(defaults.learning_rate),
        epochs: args_epochs.or(config.usize_opt("epochs")?).unwrap_or(defaults.epochs),
        batch_size: args_batch_size
            .or(config.usize_opt("batch_size")?)
            .unwrap_or(defaults.batch_size),
        max_desc_sentences: args_max_desc
            .or(config.usize_opt("max_desc")?)
            .unwrap_or(defaults.max_desc_sentences),
        arg_kind,
        seed: args_seed.or(config.u64_opt("seed")?).unwrap_or(defaults.seed),
        ..defaults
    })
}

pub fn run(args: &TrainArgs, config: &ConfigFile) -> Result<()> {
    let encoder_uri = args
        .encoder
        .clone()
        .or(config.string_opt("encoder")?)
        .unwrap_or_else(|| "tiny:0".to_string());
    let run_config = resolve_config(
        args.k,
        args.negative_ratio,
        args.lr,
        args.epochs,
        args.batch_size,
        args.max_desc,
        args.arg_kind.as_deref(),
        args.seed,
        config,
    )?;
    run_config.validate()?;

    let spec = EncoderSpec::parse(&encoder_uri)?;
    let kind = TrainableKind::from_spec(&spec)?;
    let inputs = CorpusInputs::load(&args.ontology, &args.corpus)?;
    let vocab = build_vocabulary_cached(&inputs.records, &inputs.ontology, &inputs.content_key());

    let train_records = inputs.split_records(Split::Train);
    let sample = sample_few_shot(&train_records, &inputs.ontology, &vocab, &run_config)?;
    for shortfall in &sample.shortfalls {
        eprintln!(
            "note: event {:?} has only {} train sentences for K={}",
            shortfall.event, shortfall.available, shortfall.requested
        );
    }

    let mut encoder = kind.build(0, vocab.len())?;
    let heads = train_few_shot(&mut *encoder, &sample.instances, &vocab, &run_config)?;

    let resolved = json!({
        "ontology": args.ontology.display().to_string(),
        "corpus": args.corpus.display().to_string(),
        "encoder": encoder_uri,
        "out": args.out.display().to_string(),
        "k": run_config.k,
        "negative_ratio": run_config.negative_ratio,
        "lr": run_config.learning_rate,
        "epochs": run_config.epochs,
        "batch_size": run_config.batch_size,
        "max_desc": run_config.max_desc_sentences,
        "arg_kind": run_config.arg_kind.name(),
        "seed": run_config.seed,
    });
    save_adapter(
        &args.out,
        kind,
        0,
        &*encoder,
        &vocab,
        &heads,
        &sample.shortfalls,
        resolved.clone(),
    )?;

    let mut manifest = Manifest::new("train", resolved);
    manifest.stamp_input("ontology", &args.ontology)?;
    manifest.stamp_input("corpus", &args.corpus)?;
    manifest.stamp_output("checkpoint", &args.out.join(crate::encoders::ADAPTER_CHECKPOINT_FILE))?;
    manifest.stamp_output("vocab", &args.out.join(crate::encoders::ADAPTER_VOCAB_FILE))?;
    manifest.stamp_output("meta", &args.out.join(crate::encoders::ADAPTER_META_FILE))?;
    save_manifest(&args.out.join("manifest.json"), &manifest)?;

    let final_loss = heads.epoch_losses.last().copied().unwrap_or(f64::NAN);
    println!(
        "trained {} on {} instances for {} epochs (final loss {:.4}); adapter at {}",
        kind.name(),
        sample.instances.len(),
        run_config.epochs,
        final_loss,
        args.out.display()
    );
    Ok(())
}
