//! BPR ranking loss, the cross-view InfoNCE invariance loss, and their
//! analytic gradients w.r.t. final node representations.

use ndarray::{Array1, Array2};
use rand::seq::index::sample;
use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::InteractionGraph;
use crate::model::Representations;

/// Numerically stable `ln(1 + e^x)`.
#[inline]
pub fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// `(user, positive item, negative item)` triplets.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TripletBatch {
    pub triplets: Vec<(usize, usize, usize)>,
}

impl TripletBatch {
    /// One triplet per listed training edge; negatives drawn uniformly from
    /// the items the user has not interacted with.
    pub fn sample<R: Rng + ?Sized>(
        graph: &InteractionGraph,
        edge_ids: &[usize],
        rng: &mut R,
    ) -> Result<Self> {
        let n_items = graph.n_items();
        let mut triplets = Vec::with_capacity(edge_ids.len());
        for &e in edge_ids {
            let (u, i) = graph.edges()[e];
            if graph.user_degree(u) >= n_items {
                return Err(Error::Invalid(format!("user {u} has no unobserved items")));
            }
            let j = loop {
                let j = rng.random_range(0..n_items);
                if !graph.has_edge(u, j) {
                    break j;
                }
            };
            triplets.push((u, i, j));
        }
        Ok(Self { triplets })
    }

    pub fn len(&self) -> usize {
        self.triplets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triplets.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BprOutput {
    pub loss: f64,
    pub grad_pos: Vec<f64>,
    pub grad_neg: Vec<f64>,
}

/// `sum -ln sigmoid(pos - neg)` and its gradients w.r.t. each score.
pub fn bpr_loss(scores_pos: &[f64], scores_neg: &[f64]) -> Result<BprOutput> {
    if scores_pos.len() != scores_neg.len() {
        return Err(Error::Dimension(format!(
            "{} positive vs {} negative scores",
            scores_pos.len(),
            scores_neg.len()
        )));
    }
    let mut loss = 0.0;
    let mut grad_pos = Vec::with_capacity(scores_pos.len());
    let mut grad_neg = Vec::with_capacity(scores_pos.len());
    for (&p, &n) in scores_pos.iter().zip(scores_neg) {
        let diff = p - n;
        loss += softplus(-diff);
        // d/d diff of softplus(-diff) = -sigmoid(-diff)
        let g = -crate::bias::sigmoid(-diff);
        grad_pos.push(g);
        grad_neg.push(-g);
    }
    Ok(BprOutput {
        loss,
        grad_pos,
        grad_neg,
    })
}

/// BPR over the triplets scored on one view. The readout gradient is
/// accumulated into `grad` (same shape as the representation matrix).
pub fn bpr_on_view(
    reps: &Representations,
    batch: &TripletBatch,
    grad: Option<&mut Array2<f64>>,
) -> Result<f64> {
    let (pos, neg): (Vec<f64>, Vec<f64>) = batch
        .triplets
        .iter()
        .map(|&(u, i, j)| (reps.score(u, i), reps.score(u, j)))
        .unzip();
    let out = bpr_loss(&pos, &neg)?;
    if let Some(grad) = grad {
        let n_users = reps.n_users();
        for (k, &(u, i, j)) in batch.triplets.iter().enumerate() {
            let g = out.grad_pos[k];
            // d(pos - neg)/d z_u = z_i - z_j; d/dz_i = z_u; d/dz_j = -z_u
            let zu = reps.user(u).to_owned();
            let diff = &reps.item(i) - &reps.item(j);
            grad.row_mut(u).scaled_add(g, &diff);
            grad.row_mut(n_users + i).scaled_add(g, &zu);
            grad.row_mut(n_users + j).scaled_add(-g, &zu);
        }
    }
    Ok(out.loss)
}

/// Nodes whose two view representations are contrasted, and the temperature.
#[derive(Debug, Clone, PartialEq)]
pub struct ContrastBatch {
    pub users: Vec<usize>,
    pub items: Vec<usize>,
    pub tau: f64,
}

impl ContrastBatch {
    pub fn new(users: Vec<usize>, items: Vec<usize>, tau: f64) -> Result<Self> {
        if tau.is_nan() || tau <= 0.0 {
            return Err(Error::Config(format!("temperature must be positive, got {tau}")));
        }
        Ok(Self { users, items, tau })
    }

    /// Up to `size` users and `size` items drawn without replacement.
    pub fn sample<R: Rng + ?Sized>(
        n_users: usize,
        n_items: usize,
        size: usize,
        tau: f64,
        rng: &mut R,
    ) -> Result<Self> {
        let users = sample(rng, n_users, size.min(n_users)).into_vec();
        let items = sample(rng, n_items, size.min(n_items)).into_vec();
        Self::new(users, items, tau)
    }

    /// Every user and every item.
    pub fn all(n_users: usize, n_items: usize, tau: f64) -> Result<Self> {
        Self::new((0..n_users).collect(), (0..n_items).collect(), tau)
    }
}

/// Gradients of the invariance loss w.r.t. both views' representations.
#[derive(Debug, Clone, PartialEq)]
pub struct InfoNceGrad {
    pub plus: Array2<f64>,
    pub minus: Array2<f64>,
}

/// Cross-view InfoNCE summed over the sampled users and items.
///
/// For anchor `a` the logits are `cos(z+_a, z-_b) / tau` over every sampled
/// node `b` of the same type; the positive is `b = a`.
pub fn infonce_loss(
    plus: &Representations,
    minus: &Representations,
    batch: &ContrastBatch,
    want_grad: bool,
) -> Result<(f64, Option<InfoNceGrad>)> {
    if plus.matrix().dim() != minus.matrix().dim() || plus.n_users() != minus.n_users() {
        return Err(Error::Dimension("views cover different node sets".into()));
    }
    let n_users = plus.n_users();
    if batch.users.iter().any(|&u| u >= n_users) || batch.items.iter().any(|&i| i >= plus.n_items()) {
        return Err(Error::Dimension("contrast batch index out of range".into()));
    }
    let mut grads = want_grad.then(|| InfoNceGrad {
        plus: Array2::zeros(plus.matrix().dim()),
        minus: Array2::zeros(plus.matrix().dim()),
    });
    let user_nodes: Vec<usize> = batch.users.clone();
    let item_nodes: Vec<usize> = batch.items.iter().map(|&i| n_users + i).collect();
    let mut loss = 0.0;
    for nodes in [&user_nodes, &item_nodes] {
        loss += infonce_block(plus.matrix(), minus.matrix(), nodes, batch.tau, grads.as_mut());
    }
    Ok((loss, grads))
}

struct Unit {
    dir: Array1<f64>,
    inv_norm: f64,
}

fn unit(v: ndarray::ArrayView1<'_, f64>) -> Unit {
    let norm = v.dot(&v).sqrt();
    if norm > 0.0 {
        Unit {
            dir: &v / norm,
            inv_norm: 1.0 / norm,
        }
    } else {
        log::warn!("zero representation in contrastive loss; cosine treated as 0");
        Unit {
            dir: Array1::zeros(v.len()),
            inv_norm: 0.0,
        }
    }
}

fn infonce_block(
    plus: &Array2<f64>,
    minus: &Array2<f64>,
    nodes: &[usize],
    tau: f64,
    grads: Option<&mut InfoNceGrad>,
) -> f64 {
    let n = nodes.len();
    if n == 0 {
        return 0.0;
    }
    let anchors: Vec<Unit> = nodes.iter().map(|&r| unit(plus.row(r))).collect();
    let cands: Vec<Unit> = nodes.iter().map(|&r| unit(minus.row(r))).collect();
    let mut cos = Array2::<f64>::zeros((n, n));
    for (a, x) in anchors.iter().enumerate() {
        for (b, y) in cands.iter().enumerate() {
            cos[[a, b]] = x.dir.dot(&y.dir);
        }
    }
    let mut loss = 0.0;
    // dL/dcos, reused in place of the softmax matrix.
    let mut g = Array2::<f64>::zeros((n, n));
    for a in 0..n {
        let row = cos.row(a);
        let max = row.iter().fold(f64::NEG_INFINITY, |m, &c| m.max(c / tau));
        let sum: f64 = row.iter().map(|&c| (c / tau - max).exp()).sum();
        let lse = max + sum.ln();
        loss += lse - cos[[a, a]] / tau;
        for b in 0..n {
            let softmax = (cos[[a, b]] / tau - lse).exp();
            g[[a, b]] = (softmax - if a == b { 1.0 } else { 0.0 }) / tau;
        }
    }
    if let Some(grads) = grads {
        let d = plus.ncols();
        for a in 0..n {
            // dcos(x, y)/dx = (y_hat - cos x_hat) / |x|
            let mut acc = Array1::<f64>::zeros(d);
            let mut diag = 0.0;
            for b in 0..n {
                acc.scaled_add(g[[a, b]], &cands[b].dir);
                diag += g[[a, b]] * cos[[a, b]];
            }
            acc.scaled_add(-diag, &anchors[a].dir);
            grads.plus.row_mut(nodes[a]).scaled_add(anchors[a].inv_norm, &acc);
        }
        for b in 0..n {
            let mut acc = Array1::<f64>::zeros(d);
            let mut diag = 0.0;
            for a in 0..n {
                acc.scaled_add(g[[a, b]], &anchors[a].dir);
                diag += g[[a, b]] * cos[[a, b]];
            }
            acc.scaled_add(-diag, &cands[b].dir);
            grads.minus.row_mut(nodes[b]).scaled_add(cands[b].inv_norm, &acc);
        }
    }
    loss
}

/// `(rec_plus + rec_minus) + lambda * inv`.
pub fn combined_objective(rec_plus: f64, rec_minus: f64, inv: f64, lambda: f64) -> f64 {
    rec_plus + rec_minus + lambda * inv
}
