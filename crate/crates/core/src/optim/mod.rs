pub mod adam;
pub mod checkpoint;
pub mod config;
pub mod history;
pub mod trainer;

pub use adam::AdamState;
pub use checkpoint::Checkpoint;
pub use config::{DropoutMode, Preset, TrainConfig, Variant};
pub use history::{History, HistoryRow, Stage};
pub use trainer::{adversarial_step, invariance_loss, train, TrainData, TrainOutcome, Trainer};
