//! `eex report`: renders a report JSON file as a fixed-width text table.

use std::path::PathBuf;

use clap::Args;

use crate::error::{Error, Result};
use crate::formats::report::{load_report, render_table};

use super::ConfigFile;

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Report JSON file to render.
    pub report: PathBuf,
    /// Write the table here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(args: &ReportArgs, _config: &ConfigFile) -> Result<()> {
    let report = load_report(&args.report)?;
    let table = render_table(&report);
    match &args.out {
        Some(path) => std::fs::write(path, &table).map_err(|e| Error::write(path, e))?,
        None => print!("{table}"),
    }
    Ok(())
}
