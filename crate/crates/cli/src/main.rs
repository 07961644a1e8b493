//! `debias`: train, evaluate and analyze adversarial graph dropout models.

mod commands;
mod dataset;
mod plot;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "debias", version, about = "Adversarial graph dropout for debiased recommendation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Where the dataset lives and how validation is carved out of it.
#[derive(Args, Clone, Debug)]
pub struct DatasetArgs {
    /// Dataset bundle, Coat directory (`train.ascii`, `test.ascii`) or a
    /// directory with `train.tsv` / `test.tsv` rating triples.
    #[arg(long)]
    pub dataset: PathBuf,
    /// Ratings at or above this count as positive (raw rating files only).
    #[arg(long, default_value_t = 4.0)]
    pub threshold: f64,
    /// Per-user fraction of training interactions held out for validation
    /// when the dataset has no validation split.
    #[arg(long, default_value_t = 0.1)]
    pub validation_fraction: f64,
    #[arg(long, default_value_t = 0)]
    pub split_seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Train one model and write a run directory.
    Train(commands::train::TrainArgs),
    /// Ranking metrics and prediction bias of a checkpoint.
    Eval(commands::eval::EvalArgs),
    /// Bias-probability report, embedding export and plots.
    Analyze(commands::analyze::AnalyzeArgs),
    /// Write a synthetic dataset bundle with popularity-biased exposure.
    GenSynthetic(commands::synth::SynthArgs),
}

fn exit_code(category: &str) -> u8 {
    match category {
        "config" => 3,
        "data" => 4,
        "shape" => 5,
        "training" => 6,
        "io" => 7,
        _ => 1,
    }
}

/// Joins the error chain, skipping causes a message already quotes.
fn render(err: &anyhow::Error) -> String {
    let mut out = String::new();
    for cause in err.chain() {
        let msg = cause.to_string();
        if !out.ends_with(&msg) {
            if !out.is_empty() {
                out.push_str(": ");
            }
            out.push_str(&msg);
        }
    }
    out
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Train(a) => commands::train::run(a),
        Command::Eval(a) => commands::eval::run(a),
        Command::Analyze(a) => commands::analyze::run(a),
        Command::GenSynthetic(a) => commands::synth::run(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let category = err
                .chain()
                .find_map(|e| e.downcast_ref::<debias_core::Error>())
                .map_or("internal", |e| e.category());
            eprintln!("error[{category}]: {}", render(&err));
            ExitCode::from(exit_code(category))
        }
    }
}
