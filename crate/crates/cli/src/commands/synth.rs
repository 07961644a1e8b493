use std::path::PathBuf;

use anyhow::Result;
use clap::Args;
use debias_core::data::{generate_synthetic, SyntheticSpec};
use debias_core::optim::config::parse_assignment;
use debias_core::Error;

#[derive(Args)]
pub struct SynthArgs {
    /// Bundle directory to create.
    #[arg(long)]
    pub out: PathBuf,
    /// Generator parameter, e.g. `popularity_exponent=0.5`. Keys: n_users,
    /// n_items, latent_dim, popularity_exponent, popularity_skew,
    /// noise_rate, positive_fraction, train_exposures, test_exposures, seed.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
}

pub fn run(args: SynthArgs) -> Result<()> {
    let mut table = toml::Table::try_from(SyntheticSpec::default()).map_err(|e| Error::Config(e.to_string()))?;
    for s in &args.overrides {
        let (k, v) = parse_assignment(s)?;
        if !table.contains_key(&k) {
            let keys: Vec<&str> = table.keys().map(String::as_str).collect();
            return Err(Error::Config(format!("unknown key {k:?}; valid keys: {}", keys.join(", "))).into());
        }
        table.insert(k, v);
    }
    let spec: SyntheticSpec = table
        .try_into()
        .map_err(|e: toml::de::Error| Error::Config(e.message().to_string()))?;
    spec.validate()?;
    let ds = generate_synthetic(&spec)?;
    let hash = ds.write_bundle(&args.out, "synthetic")?;
    println!(
        "wrote {}: {} users, {} items, {} train / {} test interactions, hash {hash}",
        args.out.display(),
        ds.n_users,
        ds.n_items,
        ds.train.len(),
        ds.test.len()
    );
    Ok(())
}
