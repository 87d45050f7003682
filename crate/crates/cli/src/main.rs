//! `mamprop`: ingestion, evaluation, tuning, attribution and power-law discovery
//! for additively manufactured metal property data.
//!
//! Every subcommand writes a JSON report and a CSV table. Reports carry
//! `format_version`, the resolved settings and SHA-256 digests of the inputs.
//! Failures print `error: code=<E_IO|E_SCHEMA|E_VALIDATION|E_CONVERGENCE> msg=...`
//! and exit with 2, 3, 4 or 5 respectively.

mod commands;
mod fail;
mod resolve;
mod session;
mod settings;

use clap::{Parser, Subcommand};

use crate::fail::CliError;

#[derive(Debug, Parser)]
#[command(name = "mamprop", version, about = "Property prediction toolkit for metal additive manufacturing")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Validate the material, element and record tables
    Ingest(commands::IngestArgs),
    /// Category counts and histograms
    Stats(commands::StatsArgs),
    /// k-fold cross-validation of one learner
    Cv(commands::ModelArgs),
    /// Fit on all complete records and save the model
    Train(commands::ModelArgs),
    /// Hyperparameter search (TPE, random or grid)
    Tune(commands::TuneArgs),
    /// Drop-column, gain or SHAP importance
    Importance(commands::ImportanceArgs),
    /// SHAP values and plot data for a trained model
    Shap(commands::ShapArgs),
    /// Fit a dimensionally constrained power law
    Discover(commands::DiscoverArgs),
    /// Error against training-set size
    LearningCurve(commands::CurveArgs),
    /// Pearson correlations between labels
    Corr(commands::CorrArgs),
    /// Best model per task from stored cv reports
    Report(commands::ReportArgs),
    /// Generate synthetic records
    Synth(commands::SynthArgs),
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            std::process::exit(0);
        }
        Err(e) => {
            let first = e.to_string().lines().next().unwrap_or_default().trim_start_matches("error: ").to_string();
            let err = CliError::validation(first);
            eprintln!("{err}");
            std::process::exit(err.exit_code());
        }
    };
    let result = match cli.command {
        Command::Ingest(a) => commands::ingest(a),
        Command::Stats(a) => commands::stats(a),
        Command::Cv(a) => commands::cv(a),
        Command::Train(a) => commands::train(a),
        Command::Tune(a) => commands::tune(a),
        Command::Importance(a) => commands::importance(a),
        Command::Shap(a) => commands::shap(a),
        Command::Discover(a) => commands::discover(a),
        Command::LearningCurve(a) => commands::learning_curve_cmd(a),
        Command::Corr(a) => commands::corr(a),
        Command::Report(a) => commands::report(a),
        Command::Synth(a) => commands::synth(a),
    };
    if let Err(e) = result {
        eprintln!("{e}");
        std::process::exit(e.exit_code());
    }
}
