//! Adversarial graph dropout for debiasing graph collaborative filtering.
//!
//! A learned head assigns every training edge a probability of being
//! bias-driven. Two subgraph views are sampled from it, a LightGCN-style
//! encoder is trained to rank well on both and to agree across them, and the
//! head is trained adversarially to make the views disagree.

pub mod bias;
pub mod data;
pub mod error;
pub mod eval;
pub mod graph;
pub mod losses;
pub mod model;
pub mod optim;
pub mod report;

pub use bias::{sigmoid, ArmSample, BiasHead};
pub use data::{Dataset, SyntheticSpec};
pub use error::{Error, Result};
pub use eval::{AttributeTable, RankingMetrics, Side};
pub use graph::{InteractionGraph, MaskPair, NormalizedAdjacency};
pub use model::{EmbeddingModel, Representations};
pub use optim::{Checkpoint, DropoutMode, History, Preset, TrainConfig, TrainData, TrainOutcome, Trainer, Variant};
