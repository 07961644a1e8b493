use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use clap::Args;
use debias_core::optim::config::{parse_assignment, parse_flat};
use debias_core::optim::{Checkpoint, Preset, TrainConfig, Trainer, Variant};
use debias_core::report::{bias_csv, metrics_csv, write_atomic};
use serde::Serialize;

use crate::commands::{evaluate, print_evaluation};
use crate::dataset::{ensure_dir, load};
use crate::DatasetArgs;

#[derive(Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub data: DatasetArgs,
    /// Flat `key = value` config file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Hyperparameter preset (coat, yahoo, kuairec, yelp2018, douban,
    /// synthetic). Defaults to the one matching the dataset kind.
    #[arg(long)]
    pub preset: Option<String>,
    /// `key=value` override; wins over the config file and preset.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    /// Named variant applied after all overrides.
    #[arg(long, default_value = "advdrop")]
    pub ablation: String,
    /// Run directory name under `$DEBIAS_RUNS_DIR` (default `./runs`).
    #[arg(long)]
    pub run_name: Option<String>,
    /// Cutoffs for the final test metrics.
    #[arg(long, default_value = "3,5,20", value_delimiter = ',', value_parser = clap::builder::RangedU64ValueParser::<usize>::new().range(1..))]
    pub k: Vec<usize>,
}

#[derive(Serialize)]
struct RunManifest<'a> {
    variant: &'a str,
    config: &'a TrainConfig,
    dataset: String,
    dataset_hash: &'a str,
    validation_fraction: f64,
    split_seed: u64,
    threshold: f64,
    seed: u64,
    version: &'static str,
    rounds_run: usize,
    best_round: Option<usize>,
    best_val_ndcg: Option<f64>,
    train_seconds: f64,
    outputs: Vec<&'static str>,
}

fn resolve_config(args: &TrainArgs, default: Preset) -> Result<(Variant, TrainConfig)> {
    let preset = match &args.preset {
        Some(p) => p.parse()?,
        None => default,
    };
    let mut config = TrainConfig::preset(preset);
    if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        config = config
            .merge(&parse_flat(&text)?)
            .with_context(|| format!("in {}", path.display()))?;
    }
    let mut table = toml::Table::new();
    for s in &args.overrides {
        let (k, v) = parse_assignment(s)?;
        table.insert(k, v);
    }
    config = config.merge(&table)?;
    let variant: Variant = args.ablation.parse()?;
    Ok((variant, variant.apply(&config)))
}

fn run_dir(name: &str) -> Result<PathBuf> {
    let root = std::env::var_os("DEBIAS_RUNS_DIR").map_or_else(|| PathBuf::from("runs"), PathBuf::from);
    ensure_dir(&root)?;
    let mut dir = root.join(name);
    let mut n = 1;
    while dir.exists() {
        dir = root.join(format!("{name}-{n}"));
        n += 1;
    }
    ensure_dir(&dir)?;
    Ok(dir)
}

pub fn run(args: TrainArgs) -> Result<()> {
    let loaded = load(&args.data)?;
    let (variant, config) = resolve_config(&args, loaded.preset)?;
    let data = loaded.train_data()?;
    let graph = data.graph.clone();
    let dir = run_dir(args.run_name.as_deref().unwrap_or(&format!("{}-seed{}", variant.name(), config.seed)))?;
    log::info!("run directory {}", dir.display());
    write_atomic(&dir.join("config.toml"), config.to_flat_string().as_bytes())?;

    let start = Instant::now();
    let outcome = Trainer::new(config.clone(), data)?.run()?;
    let train_seconds = start.elapsed().as_secs_f64();
    log::info!("trained {} rounds in {train_seconds:.1}s", outcome.rounds_run);

    Checkpoint::new(&config, &outcome.model, &outcome.head, Some(&outcome.rng)).save(&dir.join("checkpoint.json"))?;
    outcome.history.write_csv(&dir.join("history.csv"))?;
    let evaluation = evaluate(&outcome.model, &loaded.dataset, &graph, &args.k)?;
    write_atomic(&dir.join("metrics.csv"), metrics_csv(&evaluation.metrics).as_bytes())?;
    write_atomic(&dir.join("bias.csv"), bias_csv(&evaluation.bias).as_bytes())?;
    print_evaluation(&evaluation);

    let manifest = RunManifest {
        variant: variant.name(),
        config: &config,
        dataset: display_path(&args.data.dataset),
        dataset_hash: &loaded.hash,
        validation_fraction: args.data.validation_fraction,
        split_seed: args.data.split_seed,
        threshold: args.data.threshold,
        seed: config.seed,
        version: env!("CARGO_PKG_VERSION"),
        rounds_run: outcome.rounds_run,
        best_round: outcome.best_round,
        best_val_ndcg: outcome.best_val_ndcg,
        train_seconds,
        outputs: vec!["config.toml", "checkpoint.json", "history.csv", "metrics.csv", "bias.csv"],
    };
    write_atomic(&dir.join("manifest.json"), serde_json::to_string_pretty(&manifest)?.as_bytes())?;
    println!("run written to {}", dir.display());
    Ok(())
}

fn display_path(p: &Path) -> String {
    std::fs::canonicalize(p).unwrap_or_else(|_| p.to_path_buf()).display().to_string()
}
