//! Ranking metrics (NDCG@K, Recall@K) under the full-ranking protocol, and
//! group prediction bias over categorical node attributes.

use std::collections::BTreeMap;

use ndarray::Array2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::InteractionGraph;
use crate::model::Representations;

/// Which node type an attribute labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    User,
    Item,
}

impl Side {
    pub fn as_str(self) -> &'static str {
        match self {
            Side::User => "user",
            Side::Item => "item",
        }
    }
}

impl std::str::FromStr for Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "user" => Ok(Side::User),
            "item" => Ok(Side::Item),
            other => Err(Error::Invalid(format!("unknown attribute side {other:?}"))),
        }
    }
}

/// One categorical attribute over users or items. Unlabeled nodes are `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributeTable {
    pub name: String,
    pub side: Side,
    /// Human-readable label for each label index.
    pub domain: Vec<String>,
    pub labels: Vec<Option<usize>>,
}

impl AttributeTable {
    pub fn new(name: impl Into<String>, side: Side, domain: Vec<String>, labels: Vec<Option<usize>>) -> Result<Self> {
        let name = name.into();
        if let Some(bad) = labels.iter().flatten().find(|&&l| l >= domain.len()) {
            return Err(Error::Invalid(format!(
                "attribute {name}: label {bad} outside domain of size {}",
                domain.len()
            )));
        }
        Ok(Self {
            name,
            side,
            domain,
            labels,
        })
    }

    pub fn group_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.domain.len()];
        for l in self.labels.iter().flatten() {
            sizes[*l] += 1;
        }
        sizes
    }
}

/// Top-`k` unseen items for one user, by descending score; ties go to the
/// lower item index. `exclude` must be sorted.
pub fn rank_items(scores: &[f64], exclude: &[usize], k: usize) -> Vec<usize> {
    let mut candidates: Vec<usize> = (0..scores.len())
        .filter(|i| exclude.binary_search(i).is_err())
        .collect();
    let order = |a: &usize, b: &usize| scores[*b].total_cmp(&scores[*a]).then(a.cmp(b));
    let k = k.min(candidates.len());
    if k == 0 {
        return Vec::new();
    }
    if k < candidates.len() {
        candidates.select_nth_unstable_by(k - 1, order);
        candidates.truncate(k);
    }
    candidates.sort_by(order);
    candidates
}

/// NDCG@K with binary gains and `1/log2(rank + 1)` discounts (1-based ranks).
/// `relevant` must be sorted. Returns `None` when there is nothing relevant.
pub fn ndcg_at_k(ranked: &[usize], relevant: &[usize], k: usize) -> Option<f64> {
    if relevant.is_empty() || k == 0 {
        return None;
    }
    let dcg: f64 = ranked
        .iter()
        .take(k)
        .enumerate()
        .filter(|(_, item)| relevant.binary_search(item).is_ok())
        .map(|(pos, _)| 1.0 / ((pos + 2) as f64).log2())
        .sum();
    let ideal: f64 = (0..relevant.len().min(k)).map(|pos| 1.0 / ((pos + 2) as f64).log2()).sum();
    Some(dcg / ideal)
}

/// Fraction of relevant items found in the top K. `relevant` must be sorted.
pub fn recall_at_k(ranked: &[usize], relevant: &[usize], k: usize) -> Option<f64> {
    if relevant.is_empty() || k == 0 {
        return None;
    }
    let hits = ranked
        .iter()
        .take(k)
        .filter(|item| relevant.binary_search(item).is_ok())
        .count();
    Some(hits as f64 / relevant.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankingMetrics {
    /// `(K, NDCG@K, Recall@K)` in the order the cutoffs were requested.
    pub at_k: Vec<(usize, f64, f64)>,
    /// Users with at least one relevant held-out item.
    pub n_users: usize,
}

impl RankingMetrics {
    pub fn ndcg(&self, k: usize) -> Option<f64> {
        self.at_k.iter().find(|r| r.0 == k).map(|r| r.1)
    }

    pub fn recall(&self, k: usize) -> Option<f64> {
        self.at_k.iter().find(|r| r.0 == k).map(|r| r.2)
    }
}

/// Groups held-out `(user, item)` pairs into sorted per-user item lists.
pub fn relevant_by_user(n_users: usize, pairs: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut by_user = vec![Vec::new(); n_users];
    for &(u, i) in pairs {
        by_user[u].push(i);
    }
    for items in &mut by_user {
        items.sort_unstable();
        items.dedup();
    }
    by_user
}

/// Full-ranking evaluation: every item the user did not interact with in
/// `train` is a candidate. Users without held-out items are skipped.
pub fn evaluate_ranking(
    reps: &Representations,
    train: &InteractionGraph,
    relevant: &[Vec<usize>],
    ks: &[usize],
) -> Result<RankingMetrics> {
    if ks.contains(&0) {
        return Err(Error::Invalid("K must be at least 1".into()));
    }
    if relevant.len() != reps.n_users() {
        return Err(Error::Dimension("relevance lists do not cover all users".into()));
    }
    let max_k = ks.iter().copied().max().unwrap_or(0);
    let scores = reps.score_matrix();
    let per_user: Vec<Option<Vec<(f64, f64)>>> = (0..reps.n_users())
        .into_par_iter()
        .map(|u| {
            if relevant[u].is_empty() {
                return None;
            }
            let seen: Vec<usize> = train.user_items(u).collect();
            let row = scores.row(u);
            let ranked = rank_items(row.as_slice().expect("row-major"), &seen, max_k);
            Some(
                ks.iter()
                    .map(|&k| {
                        (
                            ndcg_at_k(&ranked, &relevant[u], k).unwrap_or(0.0),
                            recall_at_k(&ranked, &relevant[u], k).unwrap_or(0.0),
                        )
                    })
                    .collect(),
            )
        })
        .collect();
    let evaluated: Vec<&Vec<(f64, f64)>> = per_user.iter().flatten().collect();
    let n = evaluated.len();
    let at_k = ks
        .iter()
        .enumerate()
        .map(|(idx, &k)| {
            let (mut ndcg, mut recall) = (0.0, 0.0);
            for row in &evaluated {
                ndcg += row[idx].0;
                recall += row[idx].1;
            }
            let denom = n.max(1) as f64;
            (k, ndcg / denom, recall / denom)
        })
        .collect();
    Ok(RankingMetrics { at_k, n_users: n })
}

/// Mean over the opposite side of the largest gap between per-label average
/// scores. `scores` is `n_users x n_items`.
pub fn prediction_bias(scores: &Array2<f64>, attrs: &AttributeTable) -> Result<f64> {
    let (n_labeled_axis, other) = match attrs.side {
        Side::User => (scores.nrows(), scores.ncols()),
        Side::Item => (scores.ncols(), scores.nrows()),
    };
    if attrs.labels.len() != n_labeled_axis {
        return Err(Error::Dimension(format!(
            "attribute {} labels {} nodes, score matrix has {}",
            attrs.name,
            attrs.labels.len(),
            n_labeled_axis
        )));
    }
    let sizes = attrs.group_sizes();
    if sizes.iter().filter(|&&s| s > 0).count() < 2 {
        return Err(Error::Invalid(format!(
            "attribute {} has fewer than two populated groups",
            attrs.name
        )));
    }
    let mut total = 0.0;
    for o in 0..other {
        let mut sums = vec![0.0; sizes.len()];
        for (node, label) in attrs.labels.iter().enumerate() {
            if let Some(l) = label {
                sums[*l] += match attrs.side {
                    Side::User => scores[[node, o]],
                    Side::Item => scores[[o, node]],
                };
            }
        }
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for (s, &n) in sums.iter().zip(&sizes) {
            if n > 0 {
                let avg = s / n as f64;
                lo = lo.min(avg);
                hi = hi.max(avg);
            }
        }
        total += hi - lo;
    }
    Ok(total / other as f64)
}

/// Items split into `n_groups` equal-size groups of ascending training
/// popularity; ties broken by item index.
pub fn popularity_groups(graph: &InteractionGraph, n_groups: usize) -> Result<AttributeTable> {
    if n_groups < 2 {
        return Err(Error::Invalid("need at least two popularity groups".into()));
    }
    let n_items = graph.n_items();
    if n_items < n_groups {
        return Err(Error::Invalid(format!(
            "{n_items} items cannot fill {n_groups} popularity groups"
        )));
    }
    let mut order: Vec<usize> = (0..n_items).collect();
    order.sort_by_key(|&i| (graph.item_degree(i), i));
    let mut labels = vec![None; n_items];
    for (pos, &item) in order.iter().enumerate() {
        labels[item] = Some(pos * n_groups / n_items);
    }
    let domain = (0..n_groups).map(|g| g.to_string()).collect();
    AttributeTable::new("popularity", Side::Item, domain, labels)
}

/// Mean of per-edge values grouped by the item label of each edge.
pub fn group_means(graph: &InteractionGraph, values: &[f64], groups: &AttributeTable) -> Vec<Option<f64>> {
    let mut acc: BTreeMap<usize, (f64, usize)> = BTreeMap::new();
    for (&(_, i), &v) in graph.edges().iter().zip(values) {
        if let Some(g) = groups.labels[i] {
            let entry = acc.entry(g).or_insert((0.0, 0));
            entry.0 += v;
            entry.1 += 1;
        }
    }
    (0..groups.domain.len())
        .map(|g| acc.get(&g).map(|&(s, n)| s / n as f64))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use proptest::prelude::*;

    #[test]
    fn ndcg_examples() {
        assert_eq!(ndcg_at_k(&[1, 2, 3], &[1, 2, 3, 4], 3), Some(1.0));
        assert_eq!(ndcg_at_k(&[5, 6, 7], &[1, 2], 3), Some(0.0));
        let v = ndcg_at_k(&[5, 6, 1], &[1], 3).unwrap();
        assert!((v - 0.5).abs() < 1e-15);
        assert_eq!(ndcg_at_k(&[1], &[], 3), None);
    }

    #[test]
    fn recall_examples() {
        assert_eq!(recall_at_k(&[1, 2], &[1, 2], 2), Some(1.0));
        assert_eq!(recall_at_k(&[3, 4], &[1, 2], 2), Some(0.0));
        assert_eq!(recall_at_k(&[1, 9, 3, 8], &[1, 2, 3, 4], 4), Some(0.5));
        assert_eq!(recall_at_k(&[1], &[], 1), None);
    }

    #[test]
    fn ranking_excludes_seen_and_breaks_ties_by_index() {
        let scores = [0.5, 0.9, 0.5, 0.1, 0.9];
        assert_eq!(rank_items(&scores, &[1], 3), vec![4, 0, 2]);
        assert_eq!(rank_items(&scores, &[], 10).len(), 5);
        assert!(rank_items(&scores, &[0, 1, 2, 3, 4], 2).is_empty());
    }

    #[test]
    fn prediction_bias_examples() {
        let scores = Array2::from_elem((4, 3), 0.7);
        let gender = AttributeTable::new(
            "gender",
            Side::User,
            vec!["m".into(), "f".into()],
            vec![Some(0), Some(1), Some(0), Some(1)],
        )
        .unwrap();
        assert_eq!(prediction_bias(&scores, &gender).unwrap(), 0.0);

        let split = array![[1.0, 1.0], [3.5, 3.5], [1.0, 1.0]];
        let groups = AttributeTable::new(
            "g",
            Side::User,
            vec!["a".into(), "b".into(), "c".into()],
            vec![Some(0), Some(1), Some(0)],
        )
        .unwrap();
        assert_eq!(prediction_bias(&split, &groups).unwrap(), 2.5);

        let one_group = AttributeTable::new("g", Side::User, vec!["a".into()], vec![Some(0); 3]).unwrap();
        assert!(prediction_bias(&split, &one_group).is_err());
        assert!(AttributeTable::new("g", Side::User, vec![], vec![Some(0)]).is_err());
    }

    #[test]
    fn item_side_bias_is_transpose() {
        let scores = array![[0.1, 2.0, -1.0], [0.5, 0.4, 3.0]];
        let items = AttributeTable::new("c", Side::Item, vec!["x".into(), "y".into()], vec![Some(0), Some(1), Some(0)]).unwrap();
        let users = AttributeTable { side: Side::User, ..items.clone() };
        let a = prediction_bias(&scores, &items).unwrap();
        let b = prediction_bias(&scores.t().to_owned(), &users).unwrap();
        assert!((a - b).abs() < 1e-15);
    }

    #[test]
    fn popularity_groups_examples() {
        // Degrees 3, 1, 4, 2 for items 0..4.
        let edges = [(0, 0), (1, 0), (2, 0), (0, 1), (0, 2), (1, 2), (2, 2), (3, 2), (0, 3), (1, 3)];
        let g = InteractionGraph::from_interactions(&edges).unwrap();
        let groups = popularity_groups(&g, 4).unwrap();
        assert_eq!(groups.labels, vec![Some(2), Some(0), Some(3), Some(1)]);

        let eight: Vec<(usize, usize)> = (0..8).map(|i| (0, i)).collect();
        let g8 = InteractionGraph::from_interactions(&eight).unwrap();
        assert_eq!(popularity_groups(&g8, 4).unwrap().group_sizes(), vec![2; 4]);
        assert!(popularity_groups(&g8, 1).is_err());
        assert!(popularity_groups(&g8, 9).is_err());
    }

    #[test]
    fn group_means_average_edges() {
        let g = InteractionGraph::from_interactions(&[(0, 0), (0, 1), (1, 1)]).unwrap();
        let groups = popularity_groups(&g, 2).unwrap();
        assert_eq!(group_means(&g, &[0.2, 0.4, 0.8], &groups), vec![Some(0.2), Some(0.6000000000000001)]);
    }

    proptest! {
        #[test]
        fn metrics_are_bounded(scores in proptest::collection::vec(-5.0f64..5.0, 8), rel in proptest::collection::btree_set(0usize..8, 1..5), k in 1usize..9) {
            let relevant: Vec<usize> = rel.into_iter().collect();
            let ranked = rank_items(&scores, &[], 8);
            let n = ndcg_at_k(&ranked, &relevant, k).unwrap();
            let r = recall_at_k(&ranked, &relevant, k).unwrap();
            prop_assert!((0.0..=1.0 + 1e-12).contains(&n));
            prop_assert!((0.0..=1.0).contains(&r));
        }

        #[test]
        fn ndcg_ignores_order_below_k(perm in Just((3usize..8).collect::<Vec<_>>()).prop_shuffle(), k in 1usize..4) {
            let relevant = vec![0, 4, 6];
            let mut a = vec![0, 1, 2];
            a.extend(&perm);
            let mut tail: Vec<usize> = perm.clone();
            tail.reverse();
            let mut b = vec![0, 1, 2];
            b.extend(tail);
            // Items below rank K may move freely when K <= 3.
            prop_assert_eq!(ndcg_at_k(&a, &relevant, k), ndcg_at_k(&b, &relevant, k));
        }

        #[test]
        fn bias_is_label_permutation_invariant(vals in proptest::collection::vec(-3.0f64..3.0, 12), labels in proptest::collection::vec(0usize..3, 4)) {
            prop_assume!(labels.iter().collect::<std::collections::BTreeSet<_>>().len() >= 2);
            let scores = Array2::from_shape_vec((4, 3), vals).unwrap();
            let domain: Vec<String> = vec!["a".into(), "b".into(), "c".into()];
            let t1 = AttributeTable::new("x", Side::User, domain.clone(), labels.iter().map(|&l| Some(l)).collect()).unwrap();
            let t2 = AttributeTable::new("x", Side::User, domain, labels.iter().map(|&l| Some((l + 1) % 3)).collect()).unwrap();
            let b1 = prediction_bias(&scores, &t1).unwrap();
            let b2 = prediction_bias(&scores, &t2).unwrap();
            prop_assert!(b1 >= 0.0);
            prop_assert!((b1 - b2).abs() < 1e-12);
        }
    }
}
