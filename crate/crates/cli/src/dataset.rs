use std::path::Path;

use anyhow::{bail, Context, Result};
use debias_core::data::{load_coat, load_tsv_pair, BundleManifest};
use debias_core::optim::Preset;
use debias_core::eval::relevant_by_user;
use debias_core::optim::TrainData;
use debias_core::{Dataset, InteractionGraph};

use crate::DatasetArgs;

/// A dataset with its validation split in place.
pub struct Loaded {
    pub dataset: Dataset,
    /// Content hash of the dataset as loaded, before the validation split.
    pub hash: String,
    /// Built-in hyperparameters matching the dataset kind.
    pub preset: Preset,
}

pub fn load(args: &DatasetArgs) -> Result<Loaded> {
    let dir = &args.dataset;
    let (mut dataset, preset) = if dir.join("manifest.json").is_file() {
        let text = std::fs::read_to_string(dir.join("manifest.json"))?;
        let manifest: BundleManifest = serde_json::from_str(&text)?;
        let preset = manifest.source.parse().unwrap_or(Preset::Coat);
        (Dataset::read_bundle(dir)?, preset)
    } else if dir.join("train.ascii").is_file() {
        (load_coat(dir, args.threshold)?, Preset::Coat)
    } else if dir.join("train.tsv").is_file() {
        let ds = load_tsv_pair(&dir.join("train.tsv"), &dir.join("test.tsv"), args.threshold)?;
        (ds, Preset::Yahoo)
    } else {
        bail!(debias_core::Error::Invalid(format!(
            "{}: not a dataset bundle, Coat directory or TSV pair",
            dir.display()
        )));
    };
    let hash = dataset.content_hash()?;
    dataset
        .ensure_validation(args.validation_fraction, args.split_seed)
        .with_context(|| format!("splitting validation out of {}", dir.display()))?;
    log::info!(
        "dataset {}: {} users, {} items, {} train / {} validation / {} test",
        dir.display(),
        dataset.n_users,
        dataset.n_items,
        dataset.train.len(),
        dataset.validation.len(),
        dataset.test.len()
    );
    Ok(Loaded { dataset, hash, preset })
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

impl Loaded {
    pub fn train_data(&self) -> Result<TrainData> {
        let ds = &self.dataset;
        Ok(TrainData {
            graph: InteractionGraph::build(ds.n_users, ds.n_items, &ds.train)?,
            validation: relevant_by_user(ds.n_users, &ds.validation),
            attributes: ds.attributes.clone(),
        })
    }
}
