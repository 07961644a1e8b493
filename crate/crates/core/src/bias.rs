//! Per-edge bias measurement, Bernoulli view sampling, and the ARM
//! (augment-REINFORCE-merge) gradient estimator used to train the head.
//!
//! The head is a single affine layer over the concatenated layer-0 user and
//! item embeddings. Its logit `phi_e` parameterizes two independent Bernoulli
//! masks per edge: the bias-aware view keeps an edge with probability
//! `sigmoid(phi_e)`, the bias-mitigated view with `sigmoid(-phi_e)`.

use ndarray::{s, Array1};
use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{InteractionGraph, MaskPair};
use crate::model::EmbeddingModel;

#[inline]
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Affine bias head `phi = w . [z_u || z_i] + b`.
#[derive(Debug, Clone, PartialEq)]
pub struct BiasHead {
    pub weight: Array1<f64>,
    pub bias: f64,
}

/// Gradient of a scalar w.r.t. the head parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct HeadGradient {
    pub weight: Array1<f64>,
    pub bias: f64,
}

impl BiasHead {
    /// All-zero head: every edge gets probability 0.5.
    pub fn zeros(dim: usize) -> Self {
        Self {
            weight: Array1::zeros(2 * dim),
            bias: 0.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.weight.len() / 2
    }

    fn check(&self, model: &EmbeddingModel, graph: &InteractionGraph) -> Result<()> {
        if self.weight.len() != 2 * model.dim() {
            return Err(Error::Dimension(format!(
                "bias head expects embedding size {}, model has {}",
                self.dim(),
                model.dim()
            )));
        }
        if graph.n_users() != model.n_users() || graph.n_items() != model.n_items() {
            return Err(Error::Dimension("graph and model node counts differ".into()));
        }
        Ok(())
    }

    /// Per-edge logits from layer-0 embeddings.
    pub fn logits(&self, model: &EmbeddingModel, graph: &InteractionGraph) -> Result<Vec<f64>> {
        self.check(model, graph)?;
        let d = model.dim();
        let w_user = self.weight.slice(s![..d]);
        let w_item = self.weight.slice(s![d..]);
        let user_part: Vec<f64> = (0..graph.n_users()).map(|u| w_user.dot(&model.user(u))).collect();
        let item_part: Vec<f64> = (0..graph.n_items()).map(|i| w_item.dot(&model.item(i))).collect();
        Ok(graph
            .edges()
            .iter()
            .map(|&(u, i)| user_part[u] + item_part[i] + self.bias)
            .collect())
    }

    /// Per-edge probabilities `P_B = sigmoid(phi)`.
    pub fn probabilities(&self, model: &EmbeddingModel, graph: &InteractionGraph) -> Result<Vec<f64>> {
        Ok(self.logits(model, graph)?.into_iter().map(sigmoid).collect())
    }

    /// Chain rule from per-edge logit gradients to the head parameters,
    /// holding the embeddings fixed.
    pub fn backward(
        &self,
        model: &EmbeddingModel,
        graph: &InteractionGraph,
        grad_logits: &[f64],
    ) -> Result<HeadGradient> {
        self.check(model, graph)?;
        if grad_logits.len() != graph.n_edges() {
            return Err(Error::MaskLength {
                expected: graph.n_edges(),
                got: grad_logits.len(),
            });
        }
        let d = model.dim();
        // Accumulate per node first, then one axpy per node.
        let mut user_acc = vec![0.0; graph.n_users()];
        let mut item_acc = vec![0.0; graph.n_items()];
        for (&(u, i), &g) in graph.edges().iter().zip(grad_logits) {
            user_acc[u] += g;
            item_acc[i] += g;
        }
        let mut weight = Array1::zeros(2 * d);
        {
            let mut w_user = weight.slice_mut(s![..d]);
            for (u, &g) in user_acc.iter().enumerate() {
                if g != 0.0 {
                    w_user.scaled_add(g, &model.user(u));
                }
            }
        }
        {
            let mut w_item = weight.slice_mut(s![d..]);
            for (i, &g) in item_acc.iter().enumerate() {
                if g != 0.0 {
                    w_item.scaled_add(g, &model.item(i));
                }
            }
        }
        Ok(HeadGradient {
            weight,
            bias: grad_logits.iter().sum(),
        })
    }
}

/// Draws independent masks: `plus ~ Bern(p)`, `minus ~ Bern(1 - p)`.
pub fn sample_masks<R: Rng + ?Sized>(p_b: &[f64], rng: &mut R) -> MaskPair {
    let mut plus = Vec::with_capacity(p_b.len());
    let mut minus = Vec::with_capacity(p_b.len());
    for &p in p_b {
        plus.push(rng.random::<f64>() < p);
        minus.push(rng.random::<f64>() < 1.0 - p);
    }
    MaskPair { plus, minus }
}

/// Antithetic uniforms for one ARM estimate: `v1` drives the bias-aware
/// view, `v2` the bias-mitigated one.
#[derive(Debug, Clone, PartialEq)]
pub struct ArmSample {
    pub v1: Vec<f64>,
    pub v2: Vec<f64>,
}

impl ArmSample {
    pub fn draw<R: Rng + ?Sized>(n_edges: usize, rng: &mut R) -> Self {
        let v1 = (0..n_edges).map(|_| rng.random::<f64>()).collect();
        let v2 = (0..n_edges).map(|_| rng.random::<f64>()).collect();
        Self { v1, v2 }
    }

    pub fn len(&self) -> usize {
        self.v1.len()
    }

    pub fn is_empty(&self) -> bool {
        self.v1.is_empty()
    }

    /// Reflected sample `(1 - v1, 1 - v2)`.
    pub fn reflect(&self) -> Self {
        Self {
            v1: self.v1.iter().map(|v| 1.0 - v).collect(),
            v2: self.v2.iter().map(|v| 1.0 - v).collect(),
        }
    }

    /// The two mask pairs the ARM estimator evaluates the loss on.
    ///
    /// "Greater" pair: `plus = [v1 > s(-phi)]`, `minus = [v2 > s(phi)]`.
    /// "Less" pair: `plus = [v1 < s(phi)]`, `minus = [v2 < s(-phi)]`.
    pub fn mask_pairs(&self, logits: &[f64]) -> Result<(MaskPair, MaskPair)> {
        if logits.len() != self.v1.len() || self.v2.len() != self.v1.len() {
            return Err(Error::MaskLength {
                expected: self.v1.len(),
                got: logits.len(),
            });
        }
        let n = logits.len();
        let mut gt = MaskPair {
            plus: Vec::with_capacity(n),
            minus: Vec::with_capacity(n),
        };
        let mut lt = gt.clone();
        for ((&phi, &v1), &v2) in logits.iter().zip(&self.v1).zip(&self.v2) {
            let keep = sigmoid(phi);
            let drop = sigmoid(-phi);
            gt.plus.push(v1 > drop);
            gt.minus.push(v2 > keep);
            lt.plus.push(v1 < keep);
            lt.minus.push(v2 < drop);
        }
        Ok((gt, lt))
    }

    /// Single-sample unbiased estimate of `d E[L] / d phi`:
    /// `(L_gt - L_lt) * (v1 - v2)` per edge.
    pub fn gradient(&self, loss_gt: f64, loss_lt: f64) -> Vec<f64> {
        let diff = loss_gt - loss_lt;
        self.v1
            .iter()
            .zip(&self.v2)
            .map(|(v1, v2)| diff * (v1 - v2))
            .collect()
    }
}
