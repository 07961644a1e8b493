use std::path::PathBuf;

use anyhow::Result;
use clap::Args;
use debias_core::optim::Checkpoint;
use debias_core::report::{bias_csv, metrics_csv, write_atomic};

use crate::commands::{evaluate, print_evaluation};
use crate::dataset::{ensure_dir, load};
use crate::DatasetArgs;

#[derive(Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub checkpoint: PathBuf,
    /// Must be split the same way as for training (same validation
    /// fraction and split seed).
    #[command(flatten)]
    pub data: DatasetArgs,
    #[arg(long, default_value = "3,5,20", value_delimiter = ',', value_parser = clap::builder::RangedU64ValueParser::<usize>::new().range(1..))]
    pub k: Vec<usize>,
    /// Directory for metrics.csv and bias.csv; printed only when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(args: EvalArgs) -> Result<()> {
    let loaded = load(&args.data)?;
    let checkpoint = Checkpoint::load(&args.checkpoint)?;
    let model = checkpoint.model()?;
    let data = loaded.train_data()?;
    let evaluation = evaluate(&model, &loaded.dataset, &data.graph, &args.k)?;
    print_evaluation(&evaluation);
    if let Some(out) = &args.out {
        ensure_dir(out)?;
        write_atomic(&out.join("metrics.csv"), metrics_csv(&evaluation.metrics).as_bytes())?;
        if !evaluation.bias.is_empty() {
            write_atomic(&out.join("bias.csv"), bias_csv(&evaluation.bias).as_bytes())?;
        }
    }
    Ok(())
}
