//! `eex calibrate`: picks the F1-maximizing decision threshold for a score
//! file over one corpus split.

use std::collections::BTreeSet;
use std::path::PathBuf;

use clap::Args;
use eex_core::corpus::index_by_id;
use eex_core::probing::calibrate;
use serde_json::json;

use crate::error::{Error, Result};
use crate::formats::manifest::{manifest_path, save_manifest, Manifest};
use crate::formats::report::{save_report, MethodReport, MetricTriple, Report};
use crate::formats::scores::load_scores;

use super::{parse_split, ConfigFile, CorpusInputs};

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    /// Score JSONL file (as written by probe).
    #[arg(long)]
    pub scores: PathBuf,
    /// Ontology JSON file.
    #[arg(long)]
    pub ontology: PathBuf,
    /// Corpus JSONL file, used to select the split.
    #[arg(long)]
    pub corpus: PathBuf,
    /// Split to calibrate on.
    #[arg(long)]
    pub split: Option<String>,
    /// Report JSON file to write.
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(args: &CalibrateArgs, config: &ConfigFile) -> Result<()> {
    let split_name =
        args.split.clone().or(config.string_opt("split")?).unwrap_or_else(|| "dev".to_string());
    let split = parse_split(&split_name)?;

    let inputs = CorpusInputs::load(&args.ontology, &args.corpus)?;
    let index = index_by_id(&inputs.records)?;
    let scores = load_scores(&args.scores)?;

    let mut kinds = BTreeSet::new();
    let mut picked = Vec::new();
    for score in &scores {
        let Some(record) = index.get(score.sentence_id.as_str()) else {
            return Err(Error::format(
                &args.scores,
                format!("sentence id {:?} is not in the corpus", score.sentence_id),
            ));
        };
        if record.split == split {
            kinds.insert(score.kind.name());
            picked.push((score.score, score.gold));
        }
    }
    if kinds.len() > 1 {
        let names: Vec<&str> = kinds.iter().copied().collect();
        return Err(Error::format(
            &args.scores,
            format!("scores file mixes methods ({}); calibrate one at a time", names.join(", ")),
        ));
    }
    let method = kinds.into_iter().next().unwrap_or("EMPTY").to_string();
    let calibration = calibrate(&picked)?;

    let mut manifest = Manifest::new(
        "calibrate",
        json!({
            "scores": args.scores.display().to_string(),
            "ontology": args.ontology.display().to_string(),
            "corpus": args.corpus.display().to_string(),
            "split": split.as_str(),
            "out": args.out.display().to_string(),
        }),
    );
    manifest.stamp_input("scores", &args.scores)?;
    manifest.stamp_input("ontology", &args.ontology)?;
    manifest.stamp_input("corpus", &args.corpus)?;

    let triple = MetricTriple {
        precision: calibration.precision,
        recall: calibration.recall,
        f1: calibration.f1,
    };
    let mut report = Report::new("calibrate", manifest.config_sha256()?);
    report.ontology_sha256 = Some(inputs.ontology_sha256.clone());
    report.corpus_sha256 = Some(inputs.corpus_sha256.clone());
    report.methods.push(MethodReport {
        method: method.clone(),
        threshold: Some(calibration.threshold),
        dev: if split == eex_core::corpus::Split::Test { None } else { Some(triple) },
        test: if split == eex_core::corpus::Split::Test { Some(triple) } else { None },
        ks_statistic: None,
        ks_p_value: None,
    });
    save_report(&args.out, &report)?;

    manifest.stamp_output("report", &args.out)?;
    save_manifest(&manifest_path(&args.out), &manifest)?;

    println!(
        "{method}: threshold {:.2} on {} ({} pairs), F1 {:.4}",
        calibration.threshold,
        split.as_str(),
        picked.len(),
        calibration.f1
    );
    Ok(())
}
