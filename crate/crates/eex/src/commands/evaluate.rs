//! `eex evaluate`: turns a score file (events) or a prediction file
//! (argument spans) into micro precision/recall/F1 on one corpus split.

use std::path::PathBuf;

use clap::Args;
use eex_core::corpus::index_by_id;
use eex_core::evaluation::{
    evaluate_arguments, evaluate_arguments_overlap, evaluate_events, ArgumentPrediction,
    EventPrediction,
};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::formats::manifest::{manifest_path, save_manifest, Manifest};
use crate::formats::read_jsonl;
use crate::formats::report::{save_report, MethodReport, MetricTriple, Report};
use crate::formats::scores::load_scores;

use super::{parse_split, ConfigFile, CorpusInputs};

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Ontology JSON file.
    #[arg(long)]
    pub ontology: PathBuf,
    /// Corpus JSONL file.
    #[arg(long)]
    pub corpus: PathBuf,
    /// Score JSONL file; pairs above the threshold become event predictions.
    #[arg(long, required_unless_present = "args", conflicts_with = "args")]
    pub scores: Option<PathBuf>,
    /// Decision threshold for --scores.
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Argument-prediction JSONL file (sentence_id, event, role, start, end).
    #[arg(long)]
    pub args: Option<PathBuf>,
    /// Also score argument spans by Jaccard overlap at this minimum.
    #[arg(long)]
    pub overlap: Option<f64>,
    /// Split to evaluate on.
    #[arg(long)]
    pub split: Option<String>,
    /// Report JSON file to write.
    #[arg(long)]
    pub out: PathBuf,
}

/// One predicted argument span in a `--args` file; `start`/`end` are both
/// absent for a predicted no-answer.
#[derive(Debug, Serialize, Deserialize)]
struct ArgPredLine {
    sentence_id: String,
    event: String,
    role: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    start: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    end: Option<usize>,
}

pub fn run(args: &EvaluateArgs, config: &ConfigFile) -> Result<()> {
    let split_name =
        args.split.clone().or(config.string_opt("split")?).unwrap_or_else(|| "test".to_string());
    let split = parse_split(&split_name)?;
    let threshold = args.threshold.or(config.f64_opt("threshold")?).unwrap_or(0.5);

    let inputs = CorpusInputs::load(&args.ontology, &args.corpus)?;
    let index = index_by_id(&inputs.records)?;
    let split_records = inputs.split_records(split);

    let mut resolved = json!({
        "ontology": args.ontology.display().to_string(),
        "corpus": args.corpus.display().to_string(),
        "split": split.as_str(),
        "out": args.out.display().to_string(),
    });
    let mut manifest_inputs: Vec<(&str, &PathBuf)> = Vec::new();
    let mut methods: Vec<MethodReport> = Vec::new();

    if let Some(scores_path) = &args.scores {
        let scores = load_scores(scores_path)?;
        let mut kind = None;
        let mut predictions = Vec::new();
        for score in &scores {
            let Some(record) = index.get(score.sentence_id.as_str()) else {
                return Err(Error::format(
                    scores_path,
                    format!("sentence id {:?} is not in the corpus", score.sentence_id),
                ));
            };
            if record.split != split {
                continue;
            }
            kind.get_or_insert(score.kind.name());
            if score.score > threshold {
                predictions.push(EventPrediction {
                    sentence_id: score.sentence_id.clone(),
                    event: score.event.clone(),
                });
            }
        }
        let metrics = evaluate_events(&split_records, &predictions)?;
        methods.push(MethodReport {
            method: kind.unwrap_or("EMPTY").to_string(),
            threshold: Some(threshold),
            dev: (split == eex_core::corpus::Split::Dev)
                .then(|| MetricTriple::from(&metrics)),
            test: (split != eex_core::corpus::Split::Dev)
                .then(|| MetricTriple::from(&metrics)),
            ks_statistic: None,
            ks_p_value: None,
        });
        resolved["scores"] = json!(scores_path.display().to_string());
        resolved["threshold"] = json!(threshold);
        manifest_inputs.push(("scores", scores_path));
        println!(
            "events on {}: P {:.4} R {:.4} F1 {:.4} ({} predictions)",
            split.as_str(),
            metrics.precision,
            metrics.recall,
            metrics.f1,
            predictions.len()
        );
    }

    if let Some(args_path) = &args.args {
        let lines: Vec<ArgPredLine> = read_jsonl(args_path)?;
        let mut predictions = Vec::new();
        for line in &lines {
            let Some(record) = index.get(line.sentence_id.as_str()) else {
                return Err(Error::format(
                    args_path,
                    format!("sentence id {:?} is not in the corpus", line.sentence_id),
                ));
            };
            if record.split != split {
                continue;
            }
            let span = match (line.start, line.end) {
                (Some(start), Some(end)) => Some((start, end)),
                (None, None) => None,
                _ => {
                    return Err(Error::format(
                        args_path,
                        format!(
                            "prediction for {:?} role {:?} has only one of start/end",
                            line.sentence_id, line.role
                        ),
                    ));
                }
            };
            predictions.push(ArgumentPrediction {
                sentence_id: line.sentence_id.clone(),
                event: line.event.clone(),
                role: line.role.clone(),
                span,
            });
        }
        let exact = evaluate_arguments(&split_records, &predictions)?;
        let exact_triple = MetricTriple::from(&exact);
        methods.push(MethodReport {
            method: "arguments".to_string(),
            threshold: None,
            dev: (split == eex_core::corpus::Split::Dev).then_some(exact_triple),
            test: (split != eex_core::corpus::Split::Dev).then_some(exact_triple),
            ks_statistic: None,
            ks_p_value: None,
        });
        println!(
            "arguments on {}: P {:.4} R {:.4} F1 {:.4} (exact span)",
            split.as_str(),
            exact.precision,
            exact.recall,
            exact.f1
        );
        if let Some(min_jaccard) = args.overlap.or(config.f64_opt("overlap")?) {
            let loose = evaluate_arguments_overlap(&split_records, &predictions, min_jaccard)?;
            let loose_triple = MetricTriple::from(&loose);
            methods.push(MethodReport {
                method: "arguments-overlap".to_string(),
                threshold: Some(min_jaccard),
                dev: (split == eex_core::corpus::Split::Dev).then_some(loose_triple),
                test: (split != eex_core::corpus::Split::Dev).then_some(loose_triple),
                ks_statistic: None,
                ks_p_value: None,
            });
            resolved["overlap"] = json!(min_jaccard);
            println!(
                "arguments on {}: P {:.4} R {:.4} F1 {:.4} (Jaccard >= {})",
                split.as_str(),
                loose.precision,
                loose.recall,
                loose.f1,
                min_jaccard
            );
        }
        resolved["args"] = json!(args_path.display().to_string());
        manifest_inputs.push(("args", args_path));
    }

    let mut manifest = Manifest::new("evaluate", resolved);
    manifest.stamp_input("ontology", &args.ontology)?;
    manifest.stamp_input("corpus", &args.corpus)?;
    for (name, path) in manifest_inputs {
        manifest.stamp_input(name, path)?;
    }

    let mut report = Report::new("evaluate", manifest.config_sha256()?);
    report.ontology_sha256 = Some(inputs.ontology_sha256.clone());
    report.corpus_sha256 = Some(inputs.corpus_sha256.clone());
    report.methods = methods;
    save_report(&args.out, &report)?;

    manifest.stamp_output("report", &args.out)?;
    save_manifest(&manifest_path(&args.out), &manifest)?;
    Ok(())
}
