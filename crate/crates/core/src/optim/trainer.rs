//! Alternating min-max training.
//!
//! Each outer round runs `k_stage1` representation epochs with the bias head
//! frozen (minimizing BPR on both views plus `lambda` times the invariance
//! loss over the embeddings), then `k_stage2` bias-identification steps with
//! the embeddings frozen (ascending the invariance loss over the head through
//! the ARM estimator), then a validation pass on the undropped graph.

use ndarray::Array2;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bias::{sample_masks, ArmSample, BiasHead};
use crate::error::{Error, Result};
use crate::eval::{evaluate_ranking, prediction_bias, AttributeTable};
use crate::graph::{InteractionGraph, MaskPair, NormalizedAdjacency};
use crate::losses::{bpr_on_view, infonce_loss, ContrastBatch, TripletBatch};
use crate::model::EmbeddingModel;
use crate::optim::adam::AdamState;
use crate::optim::config::{DropoutMode, TrainConfig};
use crate::optim::history::{History, HistoryRow, Stage};

/// Training interactions plus what validation needs.
#[derive(Debug, Clone)]
pub struct TrainData {
    pub graph: InteractionGraph,
    /// Held-out relevant items per user, sorted; empty lists are skipped.
    pub validation: Vec<Vec<usize>>,
    /// Attributes whose prediction bias is tracked every round.
    pub attributes: Vec<AttributeTable>,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub model: EmbeddingModel,
    pub head: BiasHead,
    pub history: History,
    pub rounds_run: usize,
    /// Round whose parameters were kept (best validation NDCG).
    pub best_round: Option<usize>,
    pub best_val_ndcg: Option<f64>,
    pub rng: ChaCha8Rng,
}

/// Losses of one bias-identification step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdversarialStep {
    pub loss_gt: f64,
    pub loss_lt: f64,
}

/// Invariance loss of the two views defined by `masks`, embeddings fixed.
pub fn invariance_loss(
    model: &EmbeddingModel,
    graph: &InteractionGraph,
    masks: &MaskPair,
    contrast: &ContrastBatch,
) -> Result<f64> {
    let adj_plus = graph.normalize_masked(&masks.plus)?;
    let adj_minus = graph.normalize_masked(&masks.minus)?;
    let plus = model.propagate(&adj_plus)?.readout(model.n_users());
    let minus = model.propagate(&adj_minus)?.readout(model.n_users());
    Ok(infonce_loss(&plus, &minus, contrast, false)?.0)
}

/// One ARM gradient-ascent step on the bias head.
pub fn adversarial_step(
    model: &EmbeddingModel,
    head: &mut BiasHead,
    graph: &InteractionGraph,
    adam: &mut AdamState,
    contrast: &ContrastBatch,
    rng: &mut ChaCha8Rng,
) -> Result<AdversarialStep> {
    let logits = head.logits(model, graph)?;
    let sample = ArmSample::draw(graph.n_edges(), rng);
    let (gt, lt) = sample.mask_pairs(&logits)?;
    let loss_gt = invariance_loss(model, graph, &gt, contrast)?;
    let loss_lt = invariance_loss(model, graph, &lt, contrast)?;
    let grad_logits = sample.gradient(loss_gt, loss_lt);
    let grad = head.backward(model, graph, &grad_logits)?;

    // Ascent: descend on the negated gradient.
    let mut params: Vec<f64> = head.weight.iter().copied().chain([head.bias]).collect();
    let neg: Vec<f64> = grad.weight.iter().map(|g| -g).chain([-grad.bias]).collect();
    adam.step(&mut params, &neg)?;
    let d2 = head.weight.len();
    head.weight.assign(&ndarray::ArrayView1::from(&params[..d2]));
    head.bias = params[d2];
    Ok(AdversarialStep { loss_gt, loss_lt })
}

/// Keep probabilities proportional to item popularity, `deg(i) / max deg`.
pub fn popularity_probabilities(graph: &InteractionGraph) -> Vec<f64> {
    let max = graph.item_degrees().iter().copied().max().unwrap_or(1).max(1) as f64;
    graph
        .edges()
        .iter()
        .map(|&(_, i)| graph.item_degree(i) as f64 / max)
        .collect()
}

#[derive(Debug, Clone)]
struct Snapshot {
    round: usize,
    ndcg: f64,
    model: EmbeddingModel,
    head: BiasHead,
}

pub struct Trainer {
    config: TrainConfig,
    data: TrainData,
    full_adj: NormalizedAdjacency,
    fixed_probabilities: Option<Vec<f64>>,
    model: EmbeddingModel,
    head: BiasHead,
    adam_main: AdamState,
    adam_adv: AdamState,
    rng: ChaCha8Rng,
    history: History,
    round: usize,
    best: Option<Snapshot>,
    stale_rounds: usize,
}

impl Trainer {
    pub fn new(config: TrainConfig, data: TrainData) -> Result<Self> {
        config.validate()?;
        if data.validation.len() != data.graph.n_users() {
            return Err(Error::Dimension(format!(
                "validation covers {} users, graph has {}",
                data.validation.len(),
                data.graph.n_users()
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let graph = &data.graph;
        let model = EmbeddingModel::random(
            graph.n_users(),
            graph.n_items(),
            config.dim,
            config.n_layers,
            config.init_std,
            &mut rng,
        )?;
        let head = BiasHead::zeros(config.dim);
        let fixed_probabilities = match config.dropout {
            DropoutMode::Random => Some(vec![0.5; graph.n_edges()]),
            DropoutMode::Popularity => Some(popularity_probabilities(graph)),
            DropoutMode::Adversarial | DropoutMode::None => None,
        };
        let history = History::new(
            config.val_k,
            data.attributes.iter().map(|a| a.name.clone()).collect(),
        );
        Ok(Self {
            full_adj: graph.normalize(),
            adam_main: AdamState::new(model.embeddings().len(), config.lr_main),
            adam_adv: AdamState::new(head.weight.len() + 1, config.lr_adv),
            fixed_probabilities,
            model,
            head,
            rng,
            history,
            round: 0,
            best: None,
            stale_rounds: 0,
            config,
            data,
        })
    }

    pub fn config(&self) -> &TrainConfig {
        &self.config
    }

    pub fn model(&self) -> &EmbeddingModel {
        &self.model
    }

    pub fn head(&self) -> &BiasHead {
        &self.head
    }

    pub fn history(&self) -> &History {
        &self.history
    }

    pub fn data(&self) -> &TrainData {
        &self.data
    }

    pub fn round(&self) -> usize {
        self.round
    }

    /// Current per-edge keep probabilities of the bias-aware view, or `None`
    /// when training on the undropped graph.
    pub fn edge_probabilities(&self) -> Result<Option<Vec<f64>>> {
        match self.config.dropout {
            DropoutMode::None => Ok(None),
            DropoutMode::Adversarial => Ok(Some(self.head.probabilities(&self.model, &self.data.graph)?)),
            DropoutMode::Random | DropoutMode::Popularity => Ok(self.fixed_probabilities.clone()),
        }
    }

    /// Representation learning: `k_stage1` epochs over the embeddings.
    pub fn stage1(&mut self) -> Result<()> {
        for epoch in 0..self.config.k_stage1 {
            let (loss_rec, loss_inv) = self.representation_epoch()?;
            self.history.push(HistoryRow {
                round: self.round,
                stage: Stage::Representation,
                epoch,
                loss_rec: Some(loss_rec),
                loss_inv: (self.config.lambda > 0.0 && self.config.dropout != DropoutMode::None)
                    .then_some(loss_inv),
                val_ndcg: None,
                pred_bias: Vec::new(),
            });
        }
        Ok(())
    }

    fn representation_epoch(&mut self) -> Result<(f64, f64)> {
        let graph = &self.data.graph;
        let n_users = graph.n_users();
        let masks = match self.edge_probabilities()? {
            Some(p) => Some(sample_masks(&p, &mut self.rng)),
            None => None,
        };
        let views: Option<(NormalizedAdjacency, NormalizedAdjacency)> = match &masks {
            Some(m) => Some((graph.normalize_masked(&m.plus)?, graph.normalize_masked(&m.minus)?)),
            None => None,
        };
        let use_inv = self.config.lambda > 0.0 && views.is_some();

        let mut order: Vec<usize> = (0..graph.n_edges()).collect();
        order.shuffle(&mut self.rng);
        let (mut total_rec, mut total_inv) = (0.0, 0.0);
        for chunk in order.chunks(self.config.batch_size) {
            let triplets = TripletBatch::sample(graph, chunk, &mut self.rng)?;
            let shape = self.model.embeddings().dim();
            let grad0 = match &views {
                None => {
                    let trace = self.model.propagate(&self.full_adj)?;
                    let reps = trace.readout(n_users);
                    let mut g = Array2::zeros(shape);
                    total_rec += bpr_on_view(&reps, &triplets, Some(&mut g))?;
                    trace.backward(&g)?
                }
                Some((adj_plus, adj_minus)) => {
                    let trace_plus = self.model.propagate(adj_plus)?;
                    let trace_minus = self.model.propagate(adj_minus)?;
                    let reps_plus = trace_plus.readout(n_users);
                    let reps_minus = trace_minus.readout(n_users);
                    let mut g_plus = Array2::zeros(shape);
                    let mut g_minus = Array2::zeros(shape);
                    total_rec += bpr_on_view(&reps_plus, &triplets, Some(&mut g_plus))?;
                    total_rec += bpr_on_view(&reps_minus, &triplets, Some(&mut g_minus))?;
                    if use_inv {
                        let contrast = ContrastBatch::sample(
                            n_users,
                            graph.n_items(),
                            self.config.contrast_size,
                            self.config.tau,
                            &mut self.rng,
                        )?;
                        let (inv, grads) = infonce_loss(&reps_plus, &reps_minus, &contrast, true)?;
                        let grads = grads.expect("requested");
                        total_inv += inv;
                        g_plus.scaled_add(self.config.lambda, &grads.plus);
                        g_minus.scaled_add(self.config.lambda, &grads.minus);
                    }
                    trace_plus.backward(&g_plus)? + trace_minus.backward(&g_minus)?
                }
            };
            if !(total_rec.is_finite() && total_inv.is_finite()) {
                return Err(Error::Diverged(format!(
                    "round {}: loss became non-finite",
                    self.round
                )));
            }
            let grads = grad0.as_standard_layout();
            self.adam_main.step(
                self.model.embeddings_mut().as_slice_mut().expect("contiguous"),
                grads.as_slice().expect("contiguous"),
            )?;
        }
        let n_batches = order.len().div_ceil(self.config.batch_size).max(1) as f64;
        Ok((total_rec / n_batches, total_inv / n_batches))
    }

    /// Bias identification: `k_stage2` ARM ascent steps over the head. A
    /// no-op unless the dropout is adversarial.
    pub fn stage2(&mut self) -> Result<()> {
        if self.config.dropout != DropoutMode::Adversarial {
            return Ok(());
        }
        for epoch in 0..self.config.k_stage2 {
            let contrast = ContrastBatch::sample(
                self.data.graph.n_users(),
                self.data.graph.n_items(),
                self.config.contrast_size,
                self.config.tau,
                &mut self.rng,
            )?;
            let step = adversarial_step(
                &self.model,
                &mut self.head,
                &self.data.graph,
                &mut self.adam_adv,
                &contrast,
                &mut self.rng,
            )?;
            let loss_inv = 0.5 * (step.loss_gt + step.loss_lt);
            if !loss_inv.is_finite() {
                return Err(Error::Diverged(format!("round {}: invariance loss non-finite", self.round)));
            }
            self.history.push(HistoryRow {
                round: self.round,
                stage: Stage::BiasIdentification,
                epoch,
                loss_rec: None,
                loss_inv: Some(loss_inv),
                val_ndcg: None,
                pred_bias: Vec::new(),
            });
        }
        Ok(())
    }

    /// Validation NDCG and tracked prediction biases on the undropped graph.
    pub fn evaluate(&self) -> Result<(Option<f64>, Vec<Option<f64>>)> {
        let reps = self.model.infer(&self.full_adj)?;
        let has_validation = self.data.validation.iter().any(|v| !v.is_empty());
        let ndcg = if has_validation {
            let k = self.config.val_k;
            evaluate_ranking(&reps, &self.data.graph, &self.data.validation, &[k])?.ndcg(k)
        } else {
            None
        };
        let scores = reps.score_matrix();
        let biases = self
            .data
            .attributes
            .iter()
            .map(|a| prediction_bias(&scores, a).ok())
            .collect();
        Ok((ndcg, biases))
    }

    /// One full outer round. Returns `false` once early stopping triggers.
    pub fn run_round(&mut self) -> Result<bool> {
        self.stage1()?;
        self.stage2()?;
        let (ndcg, biases) = self.evaluate()?;
        self.history.push(HistoryRow {
            round: self.round,
            stage: Stage::Eval,
            epoch: 0,
            loss_rec: None,
            loss_inv: None,
            val_ndcg: ndcg,
            pred_bias: biases,
        });
        log::info!(
            "round {}: val ndcg@{} {}",
            self.round,
            self.config.val_k,
            ndcg.map_or_else(|| "n/a".to_string(), |v| format!("{v:.4}"))
        );
        let mut keep_going = true;
        if let Some(ndcg) = ndcg {
            let improved = self
                .best
                .as_ref()
                .is_none_or(|b| ndcg > b.ndcg + self.config.min_delta);
            if improved {
                self.best = Some(Snapshot {
                    round: self.round,
                    ndcg,
                    model: self.model.clone(),
                    head: self.head.clone(),
                });
                self.stale_rounds = 0;
            } else {
                self.stale_rounds += 1;
                if self.config.early_stopping && self.stale_rounds >= self.config.patience {
                    keep_going = false;
                }
            }
        }
        self.round += 1;
        Ok(keep_going)
    }

    pub fn run(mut self) -> Result<TrainOutcome> {
        while self.round < self.config.max_rounds {
            if !self.run_round()? {
                break;
            }
        }
        log::info!(
            "finished after {} rounds (best round {:?})",
            self.round,
            self.best.as_ref().map(|b| b.round)
        );
        Ok(self.finish())
    }

    /// Final parameters: the best validation snapshot when early stopping is
    /// on, otherwise the last iterate.
    pub fn finish(self) -> TrainOutcome {
        let (model, head, best_round, best_val_ndcg) = match self.best {
            Some(best) if self.config.early_stopping => {
                (best.model, best.head, Some(best.round), Some(best.ndcg))
            }
            best => (
                self.model,
                self.head,
                best.as_ref().map(|b| b.round),
                best.as_ref().map(|b| b.ndcg),
            ),
        };
        TrainOutcome {
            model,
            head,
            history: self.history,
            rounds_run: self.round,
            best_round,
            best_val_ndcg,
            rng: self.rng,
        }
    }
}

/// Convenience wrapper around [`Trainer`].
pub fn train(config: TrainConfig, data: TrainData) -> Result<TrainOutcome> {
    Trainer::new(config, data)?.run()
}
