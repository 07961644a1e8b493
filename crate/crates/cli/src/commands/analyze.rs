use std::path::PathBuf;

use anyhow::Result;
use clap::Args;
use debias_core::eval::popularity_groups;
use debias_core::optim::{Checkpoint, History};
use debias_core::report::{edge_probability_csv, group_summary, group_summary_csv, write_atomic};

use crate::dataset::{ensure_dir, load};
use crate::plot;
use crate::DatasetArgs;

#[derive(Args)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub checkpoint: PathBuf,
    #[command(flatten)]
    pub data: DatasetArgs,
    /// Training history; defaults to `history.csv` next to the checkpoint.
    #[arg(long)]
    pub history: Option<PathBuf>,
    /// Number of item popularity groups.
    #[arg(long, default_value_t = 4)]
    pub groups: usize,
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(args: AnalyzeArgs) -> Result<()> {
    let loaded = load(&args.data)?;
    let checkpoint = Checkpoint::load(&args.checkpoint)?;
    let model = checkpoint.model()?;
    let head = checkpoint.head()?;
    let graph = loaded.train_data()?.graph;
    ensure_dir(&args.out)?;

    let p_b = head.probabilities(&model, &graph)?;
    let groups = popularity_groups(&graph, args.groups)?;
    write_atomic(&args.out.join("pb_edges.csv"), edge_probability_csv(&graph, &p_b, &groups)?.as_bytes())?;
    let summary = group_summary(&graph, &p_b, &groups);
    write_atomic(&args.out.join("pb_quartiles.csv"), group_summary_csv(&summary).as_bytes())?;
    for s in &summary {
        let mean = s.mean.map_or_else(|| "n/a".to_string(), |m| format!("{m:.4}"));
        println!("popularity group {}\t{} edges\tmean P_B {mean}", s.group, s.n_edges);
    }
    plot::group_bars(&args.out.join("pb_quartiles.svg"), &summary)?;

    let reps = model.infer(&graph.normalize())?;
    model.export_csv(&reps, &args.out.join("embeddings.csv"))?;

    let history_path = args
        .history
        .clone()
        .unwrap_or_else(|| args.checkpoint.with_file_name("history.csv"));
    if !history_path.is_file() {
        eprintln!("note: no history at {}; trajectory plot skipped", history_path.display());
        return Ok(());
    }
    let history = History::read_csv(&history_path)?;
    let Some(attribute) = history.attributes.first().cloned() else {
        eprintln!("note: history tracks no attributes; trajectory plot skipped");
        return Ok(());
    };
    let points: Vec<(f64, f64)> = history
        .eval_rows()
        .filter_map(|r| Some((r.pred_bias.first().copied().flatten()?, r.val_ndcg?)))
        .collect();
    if points.is_empty() {
        eprintln!("note: history has no evaluated rounds; trajectory plot skipped");
        return Ok(());
    }
    plot::trajectory(&args.out.join("trajectory.svg"), &points, &attribute, history.val_k)?;
    Ok(())
}
