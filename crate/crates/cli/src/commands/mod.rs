pub mod analyze;
pub mod eval;
pub mod synth;
pub mod train;

use anyhow::Result;
use debias_core::eval::{evaluate_ranking, prediction_bias, relevant_by_user, RankingMetrics};
use debias_core::{Dataset, EmbeddingModel, InteractionGraph};

pub struct Evaluation {
    pub metrics: RankingMetrics,
    pub bias: Vec<(String, f64)>,
}

/// Test-split metrics on the undropped training graph.
pub fn evaluate(model: &EmbeddingModel, ds: &Dataset, graph: &InteractionGraph, ks: &[usize]) -> Result<Evaluation> {
    let reps = model.infer(&graph.normalize())?;
    let relevant = relevant_by_user(ds.n_users, &ds.test);
    let metrics = evaluate_ranking(&reps, graph, &relevant, ks)?;
    let scores = reps.score_matrix();
    let mut bias = Vec::new();
    if ds.attributes.is_empty() {
        eprintln!("note: dataset has no attribute tables; prediction bias skipped");
    }
    for a in &ds.attributes {
        match prediction_bias(&scores, a) {
            Ok(b) => bias.push((a.name.clone(), b)),
            Err(e) => eprintln!("note: prediction bias for {} skipped: {e}", a.name),
        }
    }
    Ok(Evaluation { metrics, bias })
}

pub fn print_evaluation(e: &Evaluation) {
    for &(k, ndcg, recall) in &e.metrics.at_k {
        println!("ndcg@{k}\t{ndcg:.4}\trecall@{k}\t{recall:.4}");
    }
    for (name, b) in &e.bias {
        println!("prediction_bias[{name}]\t{b:.4}");
    }
    println!("evaluated users\t{}", e.metrics.n_users);
}
