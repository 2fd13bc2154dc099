//! `eex generate-queries`: expands the ontology's query templates over a
//! corpus and writes the result as JSONL.

use std::path::PathBuf;

use clap::Args;
use eex_core::querygen::{expand_queries, QueryKind};
use serde_json::json;

use crate::error::Result;
use crate::formats::manifest::{manifest_path, save_manifest, Manifest};
use crate::formats::queries::save_queries;

use super::{parse_kind, ConfigFile, CorpusInputs};

#[derive(Debug, Args)]
pub struct QueriesArgs {
    /// Ontology JSON file.
    #[arg(long)]
    pub ontology: PathBuf,
    /// Corpus JSONL file.
    #[arg(long)]
    pub corpus: PathBuf,
    /// Query JSONL file to write.
    #[arg(long)]
    pub out: PathBuf,
    /// Comma-separated query kinds (default: all).
    #[arg(long, value_delimiter = ',')]
    pub kinds: Vec<String>,
    /// Description sentences appended to entailment statements (0, 1, or 5).
    #[arg(long)]
    pub max_desc: Option<usize>,
}

pub fn run(args: &QueriesArgs, config: &ConfigFile) -> Result<()> {
    let kind_names = if args.kinds.is_empty() {
        config.string_list_opt("kinds")?.unwrap_or_default()
    } else {
        args.kinds.clone()
    };
    let kinds: Vec<QueryKind> = if kind_names.is_empty() {
        QueryKind::ALL.to_vec()
    } else {
        kind_names.iter().map(|name| parse_kind(name)).collect::<Result<_>>()?
    };
    let max_desc = args.max_desc.or(config.usize_opt("max_desc")?).unwrap_or(0);

    let inputs = CorpusInputs::load(&args.ontology, &args.corpus)?;
    let mut queries = Vec::new();
    for record in &inputs.records {
        queries.extend(expand_queries(record, &inputs.ontology, &kinds, max_desc)?);
    }
    save_queries(&args.out, &queries)?;

    let mut manifest = Manifest::new(
        "generate-queries",
        json!({
            "ontology": args.ontology.display().to_string(),
            "corpus": args.corpus.display().to_string(),
            "out": args.out.display().to_string(),
            "kinds": kinds.iter().map(|k| k.name()).collect::<Vec<_>>(),
            "max_desc": max_desc,
        }),
    );
    manifest.stamp_input("ontology", &args.ontology)?;
    manifest.stamp_input("corpus", &args.corpus)?;
    manifest.stamp_output("queries", &args.out)?;
    save_manifest(&manifest_path(&args.out), &manifest)?;

    println!(
        "wrote {} queries ({} kinds x {} sentences) to {}",
        queries.len(),
        kinds.len(),
        inputs.records.len(),
        args.out.display()
    );
    Ok(())
}
