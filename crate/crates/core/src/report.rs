//! CSV reports written by training, evaluation and analysis.
//!
//! | file | header |
//! |------|--------|
//! | metrics | `metric,K,value` |
//! | bias | `attribute,prediction_bias` |
//! | P_B per edge | `edge_index,user,item,p_b,item_popularity_group` |
//! | P_B by group | `item_popularity_group,n_edges,mean_p_b` |

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::eval::{AttributeTable, RankingMetrics};
use crate::graph::InteractionGraph;

pub fn metrics_csv(metrics: &RankingMetrics) -> String {
    let mut out = String::from("metric,K,value\n");
    for &(k, ndcg, _) in &metrics.at_k {
        out.push_str(&format!("ndcg,{k},{ndcg}\n"));
    }
    for &(k, _, recall) in &metrics.at_k {
        out.push_str(&format!("recall,{k},{recall}\n"));
    }
    out
}

pub fn bias_csv(rows: &[(String, f64)]) -> String {
    let mut out = String::from("attribute,prediction_bias\n");
    for (name, value) in rows {
        out.push_str(&format!("{name},{value}\n"));
    }
    out
}

/// One row per training edge with its bias probability and the popularity
/// group of its item.
pub fn edge_probability_csv(graph: &InteractionGraph, p_b: &[f64], groups: &AttributeTable) -> Result<String> {
    if p_b.len() != graph.n_edges() {
        return Err(Error::MaskLength {
            expected: graph.n_edges(),
            got: p_b.len(),
        });
    }
    let mut out = String::from("edge_index,user,item,p_b,item_popularity_group\n");
    for (e, (&(u, i), &p)) in graph.edges().iter().zip(p_b).enumerate() {
        let g = groups.labels.get(i).copied().flatten();
        let g = g.map(|g| g.to_string()).unwrap_or_default();
        out.push_str(&format!("{e},{u},{i},{p},{g}\n"));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupSummary {
    pub group: usize,
    pub n_edges: usize,
    pub mean: Option<f64>,
}

/// Mean P_B over the edges of each item popularity group.
pub fn group_summary(graph: &InteractionGraph, p_b: &[f64], groups: &AttributeTable) -> Vec<GroupSummary> {
    let means = crate::eval::group_means(graph, p_b, groups);
    let mut counts = vec![0; groups.domain.len()];
    for &(_, i) in graph.edges() {
        if let Some(g) = groups.labels[i] {
            counts[g] += 1;
        }
    }
    means
        .into_iter()
        .zip(counts)
        .enumerate()
        .map(|(group, (mean, n_edges))| GroupSummary { group, n_edges, mean })
        .collect()
}

pub fn group_summary_csv(rows: &[GroupSummary]) -> String {
    let mut out = String::from("item_popularity_group,n_edges,mean_p_b\n");
    for r in rows {
        let mean = r.mean.map(|m| m.to_string()).unwrap_or_default();
        out.push_str(&format!("{},{},{}\n", r.group, r.n_edges, mean));
    }
    out
}

/// Writes through a sibling temp file and renames, so readers never see a
/// partial file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let tmp = path.with_extension(format!(
        "{}.tmp",
        path.extension().and_then(|e| e.to_str()).unwrap_or("")
    ));
    let mut f = std::fs::File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
    f.write_all(contents).map_err(|e| Error::io(&tmp, e))?;
    f.sync_all().map_err(|e| Error::io(&tmp, e))?;
    std::fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}
