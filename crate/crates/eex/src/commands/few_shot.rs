//! `eex few-shot`: the full K-shot protocol. For each K and each seed it
//! trains a fresh encoder on a K-shot sample and evaluates event and
//! argument detection on the test split, then reports mean and spread
//! across seeds.

use std::path::PathBuf;

use clap::Args;
use eex_core::training::{run_one_k_shot, summarize_k_shot, FewShotConfig, KShotOutcome};
use serde_json::json;

use crate::encoders::{build_vocabulary_cached, EncoderSpec, TrainableKind};
use crate::error::{Error, Result};
use crate::formats::manifest::{manifest_path, save_manifest, Manifest};
use crate::formats::report::{save_report, FewShotReport, Report};

use super::{thread_pool, ConfigFile, CorpusInputs};

#[derive(Debug, Args)]
pub struct FewShotArgs {
    /// Ontology JSON file.
    #[arg(long)]
    pub ontology: PathBuf,
    /// Corpus JSONL file.
    #[arg(long)]
    pub corpus: PathBuf,
    /// Trainable encoder URI: mock:<base> or tiny:<base>; each run seeds
    /// the encoder with base + run seed.
    #[arg(long)]
    pub encoder: Option<String>,
    /// Comma-separated K values.
    #[arg(long, value_delimiter = ',')]
    pub k: Vec<usize>,
    /// Comma-separated run seeds (at least two).
    #[arg(long, value_delimiter = ',')]
    pub seeds: Vec<u64>,
    /// Pick the event threshold on dev instead of using the fixed one.
    #[arg(long)]
    pub calibrate: bool,
    /// Worker threads across (K, seed) runs.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Report JSON file to write.
    #[arg(long)]
    pub out: PathBuf,
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
    /// Argument query kind for span training and extraction.
    #[arg(long)]
    pub arg_kind: Option<String>,
}

pub fn run(args: &FewShotArgs, config: &ConfigFile) -> Result<()> {
    let encoder_uri = args
        .encoder
        .clone()
        .or(config.string_opt("encoder")?)
        .unwrap_or_else(|| "tiny:0".to_string());
    let ks = if args.k.is_empty() {
        config.usize_list_opt("k")?.unwrap_or_else(|| vec![FewShotConfig::default().k])
    } else {
        args.k.clone()
    };
    let seeds = if args.seeds.is_empty() {
        config.u64_list_opt("seeds")?.unwrap_or_else(|| vec![1, 2, 3])
    } else {
        args.seeds.clone()
    };
    if seeds.len() < 2 {
        return Err(Error::usage("need at least two seeds to report a mean and spread"));
    }
    let calibrate = args.calibrate || config.bool_opt("calibrate")?.unwrap_or(false);
    let jobs = args.jobs.or(config.usize_opt("jobs")?).unwrap_or(1);
    let base_config = super::train::resolve_config(
        None,
        args.negative_ratio,
        args.lr,
        args.epochs,
        args.batch_size,
        args.max_desc,
        args.arg_kind.as_deref(),
        None,
        config,
    )?;
    let base_config = FewShotConfig { calibrate_on_dev: calibrate, ..base_config };

    let spec = EncoderSpec::parse(&encoder_uri)?;
    let kind = TrainableKind::from_spec(&spec)?;
    let inputs = CorpusInputs::load(&args.ontology, &args.corpus)?;
    let vocab = build_vocabulary_cached(&inputs.records, &inputs.ontology, &inputs.content_key());
    let pool = thread_pool(jobs)?;

    let resolved = json!({
        "ontology": args.ontology.display().to_string(),
        "corpus": args.corpus.display().to_string(),
        "encoder": encoder_uri,
        "k": ks,
        "seeds": seeds,
        "calibrate": calibrate,
        "jobs": jobs,
        "out": args.out.display().to_string(),
        "negative_ratio": base_config.negative_ratio,
        "lr": base_config.learning_rate,
        "epochs": base_config.epochs,
        "batch_size": base_config.batch_size,
        "max_desc": base_config.max_desc_sentences,
        "arg_kind": base_config.arg_kind.name(),
    });
    let mut manifest = Manifest::new("few-shot", resolved);
    manifest.stamp_input("ontology", &args.ontology)?;
    manifest.stamp_input("corpus", &args.corpus)?;

    let mut report = Report::new("few-shot", manifest.config_sha256()?);
    report.ontology_sha256 = Some(inputs.ontology_sha256.clone());
    report.corpus_sha256 = Some(inputs.corpus_sha256.clone());

    for &k in &ks {
        use rayon::prelude::*;
        let outcomes: Vec<Result<KShotOutcome>> = pool.install(|| {
            seeds
                .par_iter()
                .map(|&seed| {
                    let run_config = FewShotConfig { k, seed, ..base_config.clone() };
                    let mut encoder = kind.build(seed, vocab.len())?;
                    run_one_k_shot(
                        &mut *encoder,
                        &inputs.records,
                        &inputs.ontology,
                        &vocab,
                        &run_config,
                    )
                    .map_err(Error::from)
                })
                .collect()
        });
        let outcomes: Vec<KShotOutcome> = outcomes.into_iter().collect::<Result<_>>()?;
        let summary = summarize_k_shot(k, outcomes);
        println!(
            "K={k}: event F1 {:.4} +- {:.4}, argument F1 {:.4} +- {:.4} over {} seeds",
            summary.event_f1_mean,
            summary.event_f1_std,
            summary.argument_f1_mean,
            summary.argument_f1_std,
            seeds.len()
        );
        report.few_shot.push(FewShotReport::from_summary(&summary));
    }

    save_report(&args.out, &report)?;
    manifest.stamp_output("report", &args.out)?;
    save_manifest(&manifest_path(&args.out), &manifest)?;
    Ok(())
}
