//! `eex synth`: writes a synthetic labeled corpus for a given ontology.

use std::path::PathBuf;

use clap::Args;
use eex_core::corpus::{compute_stats, generate_synthetic_with, Split, SynthConfig};
use serde_json::json;

use crate::error::Result;
use crate::formats::corpus::save_corpus;
use crate::formats::manifest::{manifest_path, save_manifest, Manifest};
use crate::formats::ontology::load_ontology;

use super::ConfigFile;

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Ontology JSON file.
    #[arg(long)]
    pub ontology: PathBuf,
    /// Corpus JSONL file to write.
    #[arg(long)]
    pub out: PathBuf,
    /// Number of sentences.
    #[arg(long)]
    pub n: Option<usize>,
    /// Generator seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Fraction of sentences with no event.
    #[arg(long)]
    pub no_event_rate: Option<f64>,
    /// Fraction of sentences with two events.
    #[arg(long)]
    pub two_event_rate: Option<f64>,
    /// Probability that a role after the first stays unfilled.
    #[arg(long)]
    pub role_dropout: Option<f64>,
}

pub fn run(args: &SynthArgs, config: &ConfigFile) -> Result<()> {
    let n = args.n.or(config.usize_opt("n")?).unwrap_or(1500);
    let seed = args.seed.or(config.u64_opt("seed")?).unwrap_or(7);
    let defaults = SynthConfig::default();
    let synth = SynthConfig {
        no_event_rate: args
            .no_event_rate
            .or(config.f64_opt("no_event_rate")?)
            .unwrap_or(defaults.no_event_rate),
        two_event_rate: args
            .two_event_rate
            .or(config.f64_opt("two_event_rate")?)
            .unwrap_or(defaults.two_event_rate),
        role_dropout: args
            .role_dropout
            .or(config.f64_opt("role_dropout")?)
            .unwrap_or(defaults.role_dropout),
        ..defaults
    };

    let ontology = load_ontology(&args.ontology)?;
    let records = generate_synthetic_with(&ontology, n, seed, &synth)?;
    save_corpus(&args.out, &records)?;

    let mut manifest = Manifest::new(
        "synth",
        json!({
            "ontology": args.ontology.display().to_string(),
            "out": args.out.display().to_string(),
            "n": n,
            "seed": seed,
            "no_event_rate": synth.no_event_rate,
            "two_event_rate": synth.two_event_rate,
            "role_dropout": synth.role_dropout,
        }),
    );
    manifest.stamp_input("ontology", &args.ontology)?;
    manifest.stamp_output("corpus", &args.out)?;
    save_manifest(&manifest_path(&args.out), &manifest)?;

    let stats = compute_stats(&records);
    println!(
        "wrote {} records to {} (train {} / dev {} / test {}; {} event mentions)",
        records.len(),
        args.out.display(),
        stats.split(Split::Train).sentences,
        stats.split(Split::Dev).sentences,
        stats.split(Split::Test).sentences,
        stats.total().events,
    );
    Ok(())
}
