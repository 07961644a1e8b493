//! Training hyperparameters, dataset presets, ablation variants, and the
//! flat `key = value` config format.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How the two graph views are drawn each epoch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DropoutMode {
    /// Learned per-edge probabilities, trained adversarially.
    Adversarial,
    /// Every edge kept with probability 0.5 in each view.
    Random,
    /// Keep probability proportional to the item's training popularity.
    Popularity,
    /// Single undropped view.
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainConfig {
    pub dropout: DropoutMode,
    /// Representation-learning epochs per outer round.
    pub k_stage1: usize,
    /// Bias-identification steps per outer round.
    pub k_stage2: usize,
    pub lr_main: f64,
    pub lr_adv: f64,
    /// Weight of the invariance loss.
    pub lambda: f64,
    pub tau: f64,
    pub dim: usize,
    pub batch_size: usize,
    pub n_layers: usize,
    /// Users and items sampled per contrastive batch.
    pub contrast_size: usize,
    pub max_rounds: usize,
    pub early_stopping: bool,
    /// Rounds without validation improvement before stopping.
    pub patience: usize,
    /// Minimum NDCG gain that counts as an improvement.
    pub min_delta: f64,
    /// Cutoff of the validation NDCG used for early stopping.
    pub val_k: usize,
    pub init_std: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            dropout: DropoutMode::Adversarial,
            k_stage1: 7,
            k_stage2: 10,
            lr_main: 1e-3,
            lr_adv: 1e-2,
            lambda: 1.0,
            tau: 0.1,
            dim: 30,
            batch_size: 128,
            n_layers: 2,
            contrast_size: 100,
            max_rounds: 500,
            early_stopping: true,
            patience: 10,
            min_delta: 0.0,
            val_k: 3,
            init_std: 0.1,
            seed: 2024,
        }
    }
}

pub const CONFIG_KEYS: &[&str] = &[
    "dropout",
    "k_stage1",
    "k_stage2",
    "lr_main",
    "lr_adv",
    "lambda",
    "tau",
    "dim",
    "batch_size",
    "n_layers",
    "contrast_size",
    "max_rounds",
    "early_stopping",
    "patience",
    "min_delta",
    "val_k",
    "init_std",
    "seed",
];

/// Per-dataset values from the published hyperparameter table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Coat,
    Yahoo,
    KuaiRec,
    Yelp2018,
    Douban,
    Synthetic,
}

impl std::str::FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "coat" => Preset::Coat,
            "yahoo" => Preset::Yahoo,
            "kuairec" => Preset::KuaiRec,
            "yelp2018" => Preset::Yelp2018,
            "douban" => Preset::Douban,
            "synthetic" => Preset::Synthetic,
            other => return Err(Error::Config(format!("unknown preset {other:?}"))),
        })
    }
}

impl TrainConfig {
    pub fn preset(preset: Preset) -> Self {
        let base = Self::default();
        // (k_stage1, k_stage2, lr_main, lr_adv, dim, batch_size)
        let (k1, k2, lr_main, lr_adv, dim, batch_size) = match preset {
            Preset::Coat => (7, 10, 1e-3, 1e-2, 30, 128),
            Preset::Yahoo => (15, 5, 3e-3, 1e-3, 30, 128),
            Preset::KuaiRec => (3, 5, 5e-4, 1e-3, 30, 512),
            Preset::Yelp2018 => (7, 15, 5e-4, 1e-2, 64, 1024),
            Preset::Douban => (10, 3, 5e-4, 1e-2, 64, 4096),
            Preset::Synthetic => {
                return Self {
                    k_stage1: 5,
                    k_stage2: 10,
                    lr_main: 5e-3,
                    lr_adv: 1e-2,
                    dim: 16,
                    batch_size: 128,
                    val_k: 20,
                    max_rounds: 40,
                    patience: 5,
                    ..base
                }
            }
        };
        Self {
            k_stage1: k1,
            k_stage2: k2,
            lr_main,
            lr_adv,
            dim,
            batch_size,
            ..base
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("dim", self.dim),
            ("batch_size", self.batch_size),
            ("max_rounds", self.max_rounds),
            ("val_k", self.val_k),
        ];
        if let Some((name, _)) = positive.iter().find(|(_, v)| *v == 0) {
            return Err(Error::Config(format!("{name} must be positive")));
        }
        let rates = [
            ("lr_main", self.lr_main),
            ("lr_adv", self.lr_adv),
            ("tau", self.tau),
            ("init_std", self.init_std),
        ];
        if let Some((name, v)) = rates.iter().find(|(_, v)| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::Config(format!("{name} must be positive and finite, got {v}")));
        }
        if !(self.lambda.is_finite() && self.lambda >= 0.0) {
            return Err(Error::Config(format!("lambda must be >= 0, got {}", self.lambda)));
        }
        if self.lambda > 0.0 && self.contrast_size == 0 {
            return Err(Error::Config("contrast_size must be positive when lambda > 0".into()));
        }
        Ok(())
    }

    /// Applies `key = value` entries on top of `self`. Unknown keys are an
    /// error listing the valid ones.
    pub fn merge(&self, table: &toml::Table) -> Result<Self> {
        if let Some(bad) = table.keys().find(|k| !CONFIG_KEYS.contains(&k.as_str())) {
            return Err(Error::Config(format!(
                "unknown key {bad:?}; valid keys: {}",
                CONFIG_KEYS.join(", ")
            )));
        }
        let mut base = toml::Table::try_from(self).map_err(|e| Error::Config(e.to_string()))?;
        for (k, v) in table {
            base.insert(k.clone(), v.clone());
        }
        let merged: Self = base.try_into().map_err(|e: toml::de::Error| Error::Config(e.message().to_string()))?;
        merged.validate()?;
        Ok(merged)
    }

    /// Flat text form, one `key = value` per line.
    pub fn to_flat_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

/// Parses a flat config file body.
pub fn parse_flat(text: &str) -> Result<toml::Table> {
    text.parse::<toml::Table>().map_err(|e| Error::Config(e.to_string()))
}

/// Parses a `key=value` override. Values that are not valid TOML scalars
/// are taken as bare strings, so `dropout=random` works unquoted.
pub fn parse_assignment(s: &str) -> Result<(String, toml::Value)> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("override {s:?} is not key=value")))?;
    let (k, v) = (k.trim(), v.trim());
    if k.is_empty() {
        return Err(Error::Config(format!("override {s:?} has an empty key")));
    }
    let value = match format!("x = {v}").parse::<toml::Table>() {
        Ok(mut t) => t.remove("x").expect("key present"),
        Err(_) => toml::Value::String(v.to_string()),
    };
    Ok((k.to_string(), value))
}

/// Named configurations compared in the ablation and baseline studies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// Full method: adversarial bias head, both views, invariance loss.
    AdvDrop,
    /// Bias head frozen at 0.5: random dropout views plus invariance loss.
    NoPb,
    /// Random dropout views without the invariance loss.
    NoPbNoInv,
    /// Fixed popularity-proportional dropout plus invariance loss.
    PopDrop,
    /// Same as `NoPb`, under the name used for the dropout-strategy study.
    RandomDrop,
    LightGcn,
    /// LightGCN with zero propagation layers.
    Mf,
}

impl Variant {
    pub const ALL: [Variant; 7] = [
        Variant::AdvDrop,
        Variant::NoPb,
        Variant::NoPbNoInv,
        Variant::PopDrop,
        Variant::RandomDrop,
        Variant::LightGcn,
        Variant::Mf,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variant::AdvDrop => "advdrop",
            Variant::NoPb => "no_pb",
            Variant::NoPbNoInv => "no_pb_no_inv",
            Variant::PopDrop => "pop_drop",
            Variant::RandomDrop => "random_drop",
            Variant::LightGcn => "lightgcn",
            Variant::Mf => "mf",
        }
    }

    /// Overwrites the knobs that define the variant; everything else is kept.
    pub fn apply(self, config: &TrainConfig) -> TrainConfig {
        let mut c = config.clone();
        match self {
            Variant::AdvDrop => c.dropout = DropoutMode::Adversarial,
            Variant::NoPb | Variant::RandomDrop => {
                c.dropout = DropoutMode::Random;
                c.k_stage2 = 0;
            }
            Variant::NoPbNoInv => {
                c.dropout = DropoutMode::Random;
                c.k_stage2 = 0;
                c.lambda = 0.0;
            }
            Variant::PopDrop => {
                c.dropout = DropoutMode::Popularity;
                c.k_stage2 = 0;
            }
            Variant::LightGcn => {
                c.dropout = DropoutMode::None;
                c.k_stage2 = 0;
                c.lambda = 0.0;
            }
            Variant::Mf => {
                c.dropout = DropoutMode::None;
                c.k_stage2 = 0;
                c.lambda = 0.0;
                c.n_layers = 0;
            }
        }
        c
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Variant::ALL.iter().map(|v| v.name()).collect();
                Error::Config(format!("unknown variant {s:?}; expected one of {}", names.join(", ")))
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coat_preset_matches_table() {
        let c = TrainConfig::preset(Preset::Coat);
        assert_eq!((c.k_stage1, c.k_stage2, c.dim, c.batch_size), (7, 10, 30, 128));
        assert_eq!((c.lr_main, c.lr_adv), (1e-3, 1e-2));
        assert_eq!((c.lambda, c.tau, c.n_layers, c.contrast_size), (1.0, 0.1, 2, 100));
    }

    #[test]
    fn keys_list_matches_struct() {
        let table = toml::Table::try_from(TrainConfig::default()).unwrap();
        let mut keys: Vec<&str> = table.keys().map(String::as_str).collect();
        let mut expected = CONFIG_KEYS.to_vec();
        keys.sort_unstable();
        expected.sort_unstable();
        assert_eq!(keys, expected);
    }

    #[test]
    fn merge_overrides_and_rejects_unknown() {
        let base = TrainConfig::preset(Preset::Coat);
        let table = parse_flat("seed = 7\ndropout = \"random\"\n# comment\nlambda = 0.5").unwrap();
        let c = base.merge(&table).unwrap();
        assert_eq!((c.seed, c.dropout, c.lambda), (7, DropoutMode::Random, 0.5));
        assert_eq!(c.k_stage1, 7);

        let err = base.merge(&parse_flat("learning_rate = 1").unwrap()).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("learning_rate") && msg.contains("lr_main") && msg.contains("seed"));
        assert!(base.merge(&parse_flat("tau = -1.0").unwrap()).is_err());
    }

    #[test]
    fn assignments() {
        assert_eq!(parse_assignment("seed=1").unwrap(), ("seed".into(), toml::Value::Integer(1)));
        assert_eq!(
            parse_assignment("dropout=random").unwrap().1,
            toml::Value::String("random".into())
        );
        assert_eq!(parse_assignment(" lr_main = 1e-3").unwrap().1, toml::Value::Float(1e-3));
        assert!(parse_assignment("novalue").is_err());
    }

    #[test]
    fn flat_string_round_trips() {
        let c = TrainConfig::preset(Preset::Yahoo);
        let back = TrainConfig::default().merge(&parse_flat(&c.to_flat_string()).unwrap()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn variants() {
        let base = TrainConfig::default();
        let lgn = Variant::LightGcn.apply(&base);
        assert_eq!((lgn.dropout, lgn.lambda, lgn.k_stage2), (DropoutMode::None, 0.0, 0));
        let nopb = Variant::NoPb.apply(&base);
        assert_eq!((nopb.dropout, nopb.lambda), (DropoutMode::Random, 1.0));
        assert_eq!(Variant::NoPbNoInv.apply(&base).lambda, 0.0);
        assert_eq!(Variant::Mf.apply(&base).n_layers, 0);
        assert_eq!("no_pb".parse::<Variant>().unwrap(), Variant::NoPb);
        assert!("nope".parse::<Variant>().is_err());
    }
}
