//! Versioned JSON checkpoint of all trainable parameters and the RNG state.
//!
//! Layout (version 1):
//! `{ "version", "config", "n_users", "n_items", "n_layers", "dim",
//!    "embeddings": [row-major n_nodes * dim], "head_weight": [2 * dim],
//!    "head_bias", "rng" }`

use std::path::Path;

use ndarray::{Array1, Array2};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bias::BiasHead;
use crate::error::{Error, Result};
use crate::model::EmbeddingModel;
use crate::optim::config::TrainConfig;

pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub version: u32,
    pub config: TrainConfig,
    pub n_users: usize,
    pub n_items: usize,
    pub n_layers: usize,
    pub dim: usize,
    pub embeddings: Vec<f64>,
    pub head_weight: Vec<f64>,
    pub head_bias: f64,
    pub rng: Option<ChaCha8Rng>,
}

impl Checkpoint {
    pub fn new(config: &TrainConfig, model: &EmbeddingModel, head: &BiasHead, rng: Option<&ChaCha8Rng>) -> Self {
        Self {
            version: CHECKPOINT_VERSION,
            config: config.clone(),
            n_users: model.n_users(),
            n_items: model.n_items(),
            n_layers: model.n_layers(),
            dim: model.dim(),
            embeddings: model.embeddings().iter().copied().collect(),
            head_weight: head.weight.to_vec(),
            head_bias: head.bias,
            rng: rng.cloned(),
        }
    }

    pub fn model(&self) -> Result<EmbeddingModel> {
        let rows = self.n_users + self.n_items;
        let emb = Array2::from_shape_vec((rows, self.dim), self.embeddings.clone())
            .map_err(|e| Error::Dimension(format!("checkpoint embeddings: {e}")))?;
        EmbeddingModel::new(emb, self.n_users, self.n_layers)
    }

    pub fn head(&self) -> Result<BiasHead> {
        if self.head_weight.len() != 2 * self.dim {
            return Err(Error::Dimension(format!(
                "checkpoint head has {} weights for embedding size {}",
                self.head_weight.len(),
                self.dim
            )));
        }
        Ok(BiasHead {
            weight: Array1::from(self.head_weight.clone()),
            bias: self.head_bias,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_vec(self)?;
        std::fs::write(path, json).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        let ckpt: Self = serde_json::from_slice(&bytes)?;
        if ckpt.version != CHECKPOINT_VERSION {
            return Err(Error::Invalid(format!(
                "checkpoint version {} is not supported (expected {CHECKPOINT_VERSION})",
                ckpt.version
            )));
        }
        Ok(ckpt)
    }
}
