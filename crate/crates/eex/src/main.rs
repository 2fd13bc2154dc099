use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use eex::commands::{self, ConfigFile};

/// Event extraction by reading comprehension: query generation, zero-shot
/// probing, few-shot training, and evaluation.
#[derive(Parser)]
#[command(name = "eex", version, about)]
struct Cli {
    /// JSON config file; flat keys named after the long flags
    /// (underscores for dashes). Explicit flags win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic labeled corpus for an ontology.
    Synth(commands::synth::SynthArgs),
    /// Expand query templates over a corpus into JSONL.
    GenerateQueries(commands::queries::QueriesArgs),
    /// Score events zero-shot, calibrate on dev, report on test.
    Probe(commands::probe::ProbeArgs),
    /// Pick the F1-maximizing threshold for a score file.
    Calibrate(commands::calibrate::CalibrateArgs),
    /// Train an encoder and task heads on a K-shot sample.
    Train(commands::train::TrainArgs),
    /// Run the full K-shot protocol over several seeds.
    FewShot(commands::few_shot::FewShotArgs),
    /// Compute micro P/R/F1 for score or prediction files.
    Evaluate(commands::evaluate::EvaluateArgs),
    /// Render a report JSON file as a text table.
    Report(commands::report::ReportArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = ConfigFile::load(cli.config.as_deref()).and_then(|config| match &cli.command {
        Command::Synth(args) => commands::synth::run(args, &config),
        Command::GenerateQueries(args) => commands::queries::run(args, &config),
        Command::Probe(args) => commands::probe::run(args, &config),
        Command::Calibrate(args) => commands::calibrate::run(args, &config),
        Command::Train(args) => commands::train::run(args, &config),
        Command::FewShot(args) => commands::few_shot::run(args, &config),
        Command::Evaluate(args) => commands::evaluate::run(args, &config),
        Command::Report(args) => commands::report::run(args, &config),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(error) => {
            eprintln!("error: {error}");
            ExitCode::from(error.exit_code())
        }
    }
}
