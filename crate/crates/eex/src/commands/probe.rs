//! `eex probe`: zero-shot event scoring with a frozen encoder, calibrated
//! on dev and reported on test.
//!
//! The pipeline scores every (sentence, event) pair on dev and test,
//! picks the dev-F1-maximizing threshold on the 0.01 grid, applies it to
//! test, and runs the two-sample KS separation test on the test scores.

use std::path::PathBuf;

use clap::Args;
use eex_core::corpus::{SentenceRecord, Split};
use eex_core::probing::{
    apply_threshold, calibrate, ks_for_scores, probe_corpus, random_baseline, EventScore, ScoreKind,
};
use eex_core::querygen::QueryKind;
use serde_json::json;

use crate::encoders::{probe_setup, EncoderSpec, ProbeSetup};
use crate::error::{Error, Result};
use crate::formats::manifest::{manifest_path, save_manifest, Manifest};
use crate::formats::report::{save_report, MethodReport, MetricTriple, Report};
use crate::formats::scores::save_scores;

use super::{parse_kind, thread_pool, ConfigFile, CorpusInputs};

#[derive(Debug, Args)]
pub struct ProbeArgs {
    /// Ontology JSON file.
    #[arg(long)]
    pub ontology: PathBuf,
    /// Corpus JSONL file.
    #[arg(long)]
    pub corpus: PathBuf,
    /// Encoder URI: mock:<seed>, tiny:<seed>, adapter:<dir>, oracle.
    #[arg(long, conflicts_with = "baseline")]
    pub encoder: Option<String>,
    /// Event query kind to probe with.
    #[arg(long)]
    pub kind: Option<String>,
    /// Score with a label-free baseline instead of an encoder ("random").
    #[arg(long)]
    pub baseline: Option<String>,
    /// Baseline seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Probe-head seed for fixed encoders.
    #[arg(long)]
    pub head_seed: Option<u64>,
    /// Description sentences appended to entailment statements.
    #[arg(long)]
    pub max_desc: Option<usize>,
    /// Worker threads for per-sentence scoring.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Report JSON file to write.
    #[arg(long)]
    pub out: PathBuf,
    /// Score JSONL file to write (default: report path with a .scores.jsonl
    /// extension).
    #[arg(long)]
    pub scores: Option<PathBuf>,
}

/// Scores records in input order, fanning sentences out across the pool.
fn score_split(
    setup: &ProbeSetup,
    records: &[SentenceRecord],
    ontology: &eex_core::ontology::Ontology,
    kind: QueryKind,
    max_desc: usize,
    pool: &rayon::ThreadPool,
) -> Result<Vec<EventScore>> {
    use rayon::prelude::*;
    let per_record: Vec<Result<Vec<EventScore>>> = pool.install(|| {
        records
            .par_iter()
            .map(|record| {
                probe_corpus(
                    &*setup.encoder,
                    &setup.heads,
                    &setup.vocab,
                    std::slice::from_ref(record),
                    ontology,
                    kind,
                    max_desc,
                )
                .map_err(Error::from)
            })
            .collect()
    });
    let mut all = Vec::new();
    for chunk in per_record {
        all.extend(chunk?);
    }
    Ok(all)
}

pub fn run(args: &ProbeArgs, config: &ConfigFile) -> Result<()> {
    let encoder_uri = args
        .encoder
        .clone()
        .or(config.string_opt("encoder")?)
        .unwrap_or_else(|| "mock:0".to_string());
    let kind_name = args
        .kind
        .clone()
        .or(config.string_opt("kind")?)
        .unwrap_or_else(|| QueryKind::TeStatement.name().to_string());
    let baseline = args.baseline.clone().or(config.string_opt("baseline")?);
    let seed = args.seed.or(config.u64_opt("seed")?).unwrap_or(0);
    let head_seed = args.head_seed.or(config.u64_opt("head_seed")?).unwrap_or(0);
    let max_desc = args.max_desc.or(config.usize_opt("max_desc")?).unwrap_or(0);
    let jobs = args.jobs.or(config.usize_opt("jobs")?).unwrap_or(1);
    let scores_path =
        args.scores.clone().unwrap_or_else(|| args.out.with_extension("scores.jsonl"));

    if let Some(name) = &baseline {
        if name != "random" {
            return Err(Error::usage(format!("unknown baseline {name:?}; expected random")));
        }
    }
    let kind = parse_kind(&kind_name)?;

    let inputs = CorpusInputs::load(&args.ontology, &args.corpus)?;
    let dev = inputs.split_records(Split::Dev);
    let test = inputs.split_records(Split::Test);
    let pool = thread_pool(jobs)?;

    let (method, dev_scores, test_scores) = if baseline.is_some() {
        let dev_scores = random_baseline(&dev, &inputs.ontology, seed);
        let test_scores = random_baseline(&test, &inputs.ontology, seed.wrapping_add(1));
        (ScoreKind::Random.name().to_string(), dev_scores, test_scores)
    } else {
        let spec = EncoderSpec::parse(&encoder_uri)?;
        let setup = probe_setup(
            &spec,
            &inputs.records,
            &inputs.ontology,
            &inputs.content_key(),
            head_seed,
            max_desc,
        )?;
        let dev_scores = score_split(&setup, &dev, &inputs.ontology, kind, max_desc, &pool)?;
        let test_scores = score_split(&setup, &test, &inputs.ontology, kind, max_desc, &pool)?;
        (kind.name().to_string(), dev_scores, test_scores)
    };

    let calibration = calibrate(
        &dev_scores.iter().map(|s| (s.score, s.gold)).collect::<Vec<_>>(),
    )?;
    let (tp, fp, fn_) = apply_threshold(&test_scores, calibration.threshold);
    let (test_p, test_r, test_f1) = eex_core::evaluation::micro_prf(tp, fp, fn_);
    let ks = ks_for_scores(&test_scores)?;

    let mut all_scores = dev_scores;
    all_scores.extend(test_scores);
    save_scores(&scores_path, &all_scores)?;

    let resolved = json!({
        "ontology": args.ontology.display().to_string(),
        "corpus": args.corpus.display().to_string(),
        "encoder": if baseline.is_some() { serde_json::Value::Null } else { json!(encoder_uri) },
        "kind": kind.name(),
        "baseline": baseline,
        "seed": seed,
        "head_seed": head_seed,
        "max_desc": max_desc,
        "jobs": jobs,
        "out": args.out.display().to_string(),
        "scores": scores_path.display().to_string(),
    });
    let mut manifest = Manifest::new("probe", resolved);
    manifest.stamp_input("ontology", &args.ontology)?;
    manifest.stamp_input("corpus", &args.corpus)?;

    let mut report = Report::new("probe", manifest.config_sha256()?);
    report.ontology_sha256 = Some(inputs.ontology_sha256.clone());
    report.corpus_sha256 = Some(inputs.corpus_sha256.clone());
    report.methods.push(MethodReport {
        method: method.clone(),
        threshold: Some(calibration.threshold),
        dev: Some(MetricTriple {
            precision: calibration.precision,
            recall: calibration.recall,
            f1: calibration.f1,
        }),
        test: Some(MetricTriple { precision: test_p, recall: test_r, f1: test_f1 }),
        ks_statistic: Some(ks.statistic),
        ks_p_value: Some(ks.p_value),
    });
    save_report(&args.out, &report)?;

    manifest.stamp_output("report", &args.out)?;
    manifest.stamp_output("scores", &scores_path)?;
    save_manifest(&manifest_path(&args.out), &manifest)?;

    println!(
        "{method}: threshold {:.2}, dev F1 {:.4}, test F1 {:.4}, KS D {:.4} p {:.4}",
        calibration.threshold, calibration.f1, test_f1, ks.statistic, ks.p_value
    );
    Ok(())
}
