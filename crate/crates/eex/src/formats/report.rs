//! Experiment report JSON, schema version `eex-report/1`: identifying
//! hashes, one entry per probed method, and one entry per few-shot K with
//! per-seed arrays and mean plus sample standard deviation. The `report`
//! subcommand renders the same document as a plain-text table.

use std::fmt::Write as _;
use std::path::Path;

use eex_core::evaluation::Metrics;
use eex_core::training::{KShotOutcome, KShotSummary};
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::formats::{read_json, write_json};

pub const REPORT_VERSION: &str = "eex-report/1";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricTriple {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl From<&Metrics> for MetricTriple {
    fn from(m: &Metrics) -> MetricTriple {
        MetricTriple { precision: m.precision, recall: m.recall, f1: m.f1 }
    }
}

/// One probed or evaluated scoring method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodReport {
    /// Query-family name, or `RANDOM` for the baseline.
    pub method: String,
    /// Decision threshold applied on the test split; absent for methods
    /// with no threshold (argument span evaluation).
    pub threshold: Option<f64>,
    /// Metrics at the threshold on the calibration (dev) scores.
    pub dev: Option<MetricTriple>,
    /// Metrics at the threshold on the test scores.
    pub test: Option<MetricTriple>,
    pub ks_statistic: Option<f64>,
    pub ks_p_value: Option<f64>,
}

/// One seed of one few-shot run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FewShotRun {
    pub seed: u64,
    pub event: MetricTriple,
    pub argument: MetricTriple,
    pub event_threshold: f64,
    pub final_loss: f64,
}

/// Aggregate over seeds at one K.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FewShotReport {
    pub k: usize,
    pub event_f1_mean: f64,
    pub event_f1_std: f64,
    pub argument_f1_mean: f64,
    pub argument_f1_std: f64,
    pub runs: Vec<FewShotRun>,
}

impl FewShotReport {
    pub fn from_summary(summary: &KShotSummary) -> FewShotReport {
        FewShotReport {
            k: summary.k,
            event_f1_mean: summary.event_f1_mean,
            event_f1_std: summary.event_f1_std,
            argument_f1_mean: summary.argument_f1_mean,
            argument_f1_std: summary.argument_f1_std,
            runs: summary.outcomes.iter().map(FewShotRun::from_outcome).collect(),
        }
    }
}

impl FewShotRun {
    pub fn from_outcome(outcome: &KShotOutcome) -> FewShotRun {
        FewShotRun {
            seed: outcome.seed,
            event: MetricTriple::from(&outcome.event_metrics),
            argument: MetricTriple::from(&outcome.argument_metrics),
            event_threshold: outcome.event_threshold,
            final_loss: outcome.final_loss,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub version: String,
    /// Subcommand that produced the report.
    pub command: String,
    /// SHA-256 of the resolved configuration JSON.
    pub config_sha256: String,
    pub ontology_sha256: Option<String>,
    pub corpus_sha256: Option<String>,
    pub methods: Vec<MethodReport>,
    pub few_shot: Vec<FewShotReport>,
}

impl Report {
    pub fn new(command: &str, config_sha256: String) -> Report {
        Report {
            version: REPORT_VERSION.to_string(),
            command: command.to_string(),
            config_sha256,
            ontology_sha256: None,
            corpus_sha256: None,
            methods: Vec::new(),
            few_shot: Vec::new(),
        }
    }
}

pub fn load_report(path: &Path) -> Result<Report> {
    read_json(path)
}

pub fn save_report(path: &Path, report: &Report) -> Result<()> {
    write_json(path, report)
}

fn metric_cell(m: Option<MetricTriple>) -> String {
    match m {
        Some(m) => format!("{:.4} {:.4} {:.4}", m.precision, m.recall, m.f1),
        None => "-".to_string(),
    }
}

/// Renders the report as a fixed-width text table, one section per result
/// family present.
pub fn render_table(report: &Report) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "report {} ({})", report.version, report.command);
    let _ = writeln!(out, "config sha256: {}", report.config_sha256);
    if let Some(hash) = &report.ontology_sha256 {
        let _ = writeln!(out, "ontology sha256: {hash}");
    }
    if let Some(hash) = &report.corpus_sha256 {
        let _ = writeln!(out, "corpus sha256: {hash}");
    }
    if !report.methods.is_empty() {
        let _ = writeln!(out);
        let _ = writeln!(
            out,
            "{:<18} {:>9} {:>30} {:>30} {:>8} {:>10}",
            "method", "threshold", "dev P / R / F1", "test P / R / F1", "ks D", "ks p"
        );
        for m in &report.methods {
            let _ = writeln!(
                out,
                "{:<18} {:>9} {:>30} {:>30} {:>8} {:>10}",
                m.method,
                m.threshold.map_or("-".to_string(), |t| format!("{t:.2}")),
                metric_cell(m.dev),
                metric_cell(m.test),
                m.ks_statistic.map_or("-".to_string(), |d| format!("{d:.4}")),
                m.ks_p_value.map_or("-".to_string(), |p| format!("{p:.2e}")),
            );
        }
    }
    if !report.few_shot.is_empty() {
        let _ = writeln!(out);
        let _ = writeln!(
            out,
            "{:<4} {:>22} {:>22}  {}",
            "K", "event F1 mean+-std", "argument F1 mean+-std", "seeds"
        );
        for f in &report.few_shot {
            let seeds: Vec<String> = f.runs.iter().map(|r| r.seed.to_string()).collect();
            let _ = writeln!(
                out,
                "{:<4} {:>22} {:>22}  {}",
                f.k,
                format!("{:.4}+-{:.4}", f.event_f1_mean, f.event_f1_std),
                format!("{:.4}+-{:.4}", f.argument_f1_mean, f.argument_f1_std),
                seeds.join(","),
            );
        }
    }
    out
}
