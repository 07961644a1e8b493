//! Dataset ingestion, id remapping, holdout splits, the on-disk bundle
//! format, and a synthetic generator with popularity-skewed exposure.
//!
//! Bundle directory layout:
//!
//! ```text
//! manifest.json      counts, attribute names, sha256 content hash
//! train.tsv          user<TAB>item (contiguous indices)
//! validation.tsv     same; may be empty
//! test.tsv           same
//! user_ids.tsv       index<TAB>raw id
//! item_ids.tsv       index<TAB>raw id
//! attributes.json    categorical attribute tables
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use ndarray::Array2;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::eval::{AttributeTable, Side};

/// Raw-id interaction as read from disk.
pub type RawPair = (u64, u64);

/// Bijection between raw ids and contiguous indices; indices follow raw id
/// order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct IdMap {
    ids: Vec<u64>,
    index: BTreeMap<u64, usize>,
}

impl IdMap {
    pub fn from_ids(ids: impl IntoIterator<Item = u64>) -> Self {
        let index: BTreeMap<u64, usize> = ids.into_iter().map(|id| (id, 0)).collect();
        let ids: Vec<u64> = index.keys().copied().collect();
        let index = ids.iter().enumerate().map(|(k, &id)| (id, k)).collect();
        Self { ids, index }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn index_of(&self, raw: u64) -> Option<usize> {
        self.index.get(&raw).copied()
    }

    pub fn raw_id(&self, index: usize) -> u64 {
        self.ids[index]
    }

    pub fn raw_ids(&self) -> &[u64] {
        &self.ids
    }
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn parse_err(path: &Path, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        msg: msg.into(),
    }
}

/// Reads `user<TAB>item<TAB>rating` rows and keeps those rated at least
/// `threshold`. Blank lines and `#` comments are skipped.
pub fn load_tsv(path: &Path, threshold: f64) -> Result<Vec<RawPair>> {
    let text = read_text(path)?;
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 {
            return Err(parse_err(path, n + 1, format!("expected 3 tab-separated fields, got {}", fields.len())));
        }
        let user = fields[0]
            .trim()
            .parse::<u64>()
            .map_err(|_| parse_err(path, n + 1, format!("bad user id {:?}", fields[0])))?;
        let item = fields[1]
            .trim()
            .parse::<u64>()
            .map_err(|_| parse_err(path, n + 1, format!("bad item id {:?}", fields[1])))?;
        let rating = fields[2]
            .trim()
            .parse::<f64>()
            .map_err(|_| parse_err(path, n + 1, format!("bad rating {:?}", fields[2])))?;
        if rating >= threshold {
            out.push((user, item));
        }
    }
    Ok(out)
}

/// Dense whitespace-separated rating matrix (rows users, columns items,
/// 0 = unrated) converted to positive `(row, column)` pairs.
pub fn load_rating_matrix(path: &Path, threshold: f64) -> Result<Vec<RawPair>> {
    let rows = read_numeric_rows(path)?;
    let mut out = Vec::new();
    for (u, row) in rows.iter().enumerate() {
        for (i, &r) in row.iter().enumerate() {
            if r > 0.0 && r >= threshold {
                out.push((u as u64, i as u64));
            }
        }
    }
    Ok(out)
}

fn read_numeric_rows(path: &Path) -> Result<Vec<Vec<f64>>> {
    let text = read_text(path)?;
    let mut rows = Vec::new();
    let mut width = None;
    for (n, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row = line
            .split_whitespace()
            .map(|t| t.parse::<f64>().map_err(|_| parse_err(path, n + 1, format!("bad number {t:?}"))))
            .collect::<Result<Vec<_>>>()?;
        match width {
            None => width = Some(row.len()),
            Some(w) if w != row.len() => {
                return Err(parse_err(path, n + 1, format!("expected {w} columns, got {}", row.len())))
            }
            _ => {}
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Categorical labels from a block of one-hot columns of a feature matrix.
/// Rows with no hot column in the block are unlabeled.
pub fn one_hot_labels(path: &Path, columns: std::ops::Range<usize>) -> Result<Vec<Option<usize>>> {
    let rows = read_numeric_rows(path)?;
    rows.iter()
        .enumerate()
        .map(|(n, row)| {
            if row.len() < columns.end {
                return Err(parse_err(path, n + 1, format!("row has {} columns, need {}", row.len(), columns.end)));
            }
            Ok(row[columns.clone()].iter().position(|&v| v > 0.0))
        })
        .collect()
}

/// Known ground truth of a synthetic dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    /// `n_users x n_items` binary true preference.
    pub relevance: Array2<bool>,
    /// Latent item popularity that drives exposure.
    pub item_popularity: Vec<f64>,
    /// Times each item was exposed to some user in the training log.
    pub train_exposure_count: Vec<usize>,
    /// Exposure events `(user, item)` of the biased and the uniform logs.
    pub train_exposures: Vec<(usize, usize)>,
    pub test_exposures: Vec<(usize, usize)>,
    /// Training positives that were not true preferences.
    pub noise_interactions: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub n_users: usize,
    pub n_items: usize,
    pub train: Vec<(usize, usize)>,
    pub validation: Vec<(usize, usize)>,
    pub test: Vec<(usize, usize)>,
    pub user_ids: IdMap,
    pub item_ids: IdMap,
    pub attributes: Vec<AttributeTable>,
    pub ground_truth: Option<GroundTruth>,
}

impl Dataset {
    /// Remaps raw ids over everything seen in any split.
    pub fn from_raw(train: &[RawPair], validation: &[RawPair], test: &[RawPair]) -> Result<Self> {
        let all = || train.iter().chain(validation).chain(test);
        let user_ids = IdMap::from_ids(all().map(|p| p.0));
        let item_ids = IdMap::from_ids(all().map(|p| p.1));
        let remap = |pairs: &[RawPair]| -> Vec<(usize, usize)> {
            let mut v: Vec<(usize, usize)> = pairs
                .iter()
                .map(|&(u, i)| (user_ids.index_of(u).unwrap(), item_ids.index_of(i).unwrap()))
                .collect();
            v.sort_unstable();
            v.dedup();
            v
        };
        let ds = Self {
            n_users: user_ids.len(),
            n_items: item_ids.len(),
            train: remap(train),
            validation: remap(validation),
            test: remap(test),
            user_ids,
            item_ids,
            attributes: Vec::new(),
            ground_truth: None,
        };
        ds.check()?;
        Ok(ds)
    }

    /// Bounds and split disjointness.
    pub fn check(&self) -> Result<()> {
        if self.train.is_empty() {
            return Err(Error::EmptyGraph);
        }
        for split in [&self.train, &self.validation, &self.test] {
            if let Some(&(u, i)) = split.iter().find(|&&(u, i)| u >= self.n_users || i >= self.n_items) {
                return Err(Error::EdgeOutOfBounds {
                    user: u,
                    item: i,
                    n_users: self.n_users,
                    n_items: self.n_items,
                });
            }
        }
        let train: std::collections::BTreeSet<_> = self.train.iter().collect();
        if self.validation.iter().any(|p| train.contains(p)) {
            return Err(Error::Invalid("validation overlaps train".into()));
        }
        for a in &self.attributes {
            let expected = match a.side {
                Side::User => self.n_users,
                Side::Item => self.n_items,
            };
            if a.labels.len() != expected {
                return Err(Error::Invalid(format!(
                    "attribute {} has {} labels for {expected} nodes",
                    a.name,
                    a.labels.len()
                )));
            }
        }
        Ok(())
    }

    pub fn attribute(&self, name: &str) -> Option<&AttributeTable> {
        self.attributes.iter().find(|a| a.name == name)
    }

    /// Carves a per-user validation split out of train when none exists.
    pub fn ensure_validation(&mut self, fraction: f64, seed: u64) -> Result<()> {
        if self.validation.is_empty() {
            let (train, val) = split_holdout(&self.train, fraction, seed)?;
            self.train = train;
            self.validation = val;
        }
        Ok(())
    }

    /// Attribute table over raw-id-indexed labels (e.g. feature matrix rows).
    fn remap_labels(&self, name: &str, side: Side, domain: Vec<String>, raw_labels: &[Option<usize>]) -> Result<AttributeTable> {
        let ids = match side {
            Side::User => &self.user_ids,
            Side::Item => &self.item_ids,
        };
        let labels = ids
            .raw_ids()
            .iter()
            .map(|&raw| raw_labels.get(raw as usize).copied().flatten())
            .collect();
        AttributeTable::new(name, side, domain, labels)
    }

    /// Writes the bundle directory and returns its content hash.
    pub fn write_bundle(&self, dir: &Path, source: &str) -> Result<String> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let files = self.bundle_files()?;
        for (name, bytes) in &files {
            let path = dir.join(name);
            std::fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
        }
        let hash = content_hash(&files);
        let manifest = BundleManifest {
            format_version: 1,
            source: source.to_string(),
            n_users: self.n_users,
            n_items: self.n_items,
            n_train: self.train.len(),
            n_validation: self.validation.len(),
            n_test: self.test.len(),
            attributes: self.attributes.iter().map(|a| a.name.clone()).collect(),
            content_hash: hash.clone(),
        };
        let path = dir.join("manifest.json");
        let mut json = serde_json::to_string_pretty(&manifest)?;
        json.push('\n');
        std::fs::write(&path, json).map_err(|e| Error::io(&path, e))?;
        Ok(hash)
    }

    fn bundle_files(&self) -> Result<Vec<(&'static str, Vec<u8>)>> {
        let pairs = |v: &[(usize, usize)]| {
            let mut s = String::new();
            for (u, i) in v {
                writeln!(s, "{u}\t{i}").unwrap();
            }
            s.into_bytes()
        };
        let ids = |m: &IdMap| {
            let mut s = String::new();
            for (k, id) in m.raw_ids().iter().enumerate() {
                writeln!(s, "{k}\t{id}").unwrap();
            }
            s.into_bytes()
        };
        let mut attrs = serde_json::to_vec_pretty(&self.attributes)?;
        attrs.push(b'\n');
        Ok(vec![
            ("train.tsv", pairs(&self.train)),
            ("validation.tsv", pairs(&self.validation)),
            ("test.tsv", pairs(&self.test)),
            ("user_ids.tsv", ids(&self.user_ids)),
            ("item_ids.tsv", ids(&self.item_ids)),
            ("attributes.json", attrs),
        ])
    }

    /// Content hash of the dataset as it would be written to a bundle.
    pub fn content_hash(&self) -> Result<String> {
        Ok(content_hash(&self.bundle_files()?))
    }

    pub fn read_bundle(dir: &Path) -> Result<Self> {
        let manifest: BundleManifest = serde_json::from_str(&read_text(&dir.join("manifest.json"))?)?;
        let read_pairs = |name: &str| -> Result<Vec<(usize, usize)>> {
            let path = dir.join(name);
            read_text(&path)?
                .lines()
                .enumerate()
                .filter(|(_, l)| !l.trim().is_empty())
                .map(|(n, l)| {
                    let mut it = l.split('\t').map(|t| t.trim().parse::<usize>());
                    match (it.next(), it.next(), it.next()) {
                        (Some(Ok(u)), Some(Ok(i)), None) => Ok((u, i)),
                        _ => Err(parse_err(&path, n + 1, "expected user<TAB>item")),
                    }
                })
                .collect()
        };
        let read_ids = |name: &str| -> Result<IdMap> {
            let pairs = read_pairs(name)?;
            for (k, &(idx, _)) in pairs.iter().enumerate() {
                if idx != k {
                    return Err(parse_err(&dir.join(name), k + 1, "id map indices must be 0..n in order"));
                }
            }
            let map = IdMap::from_ids(pairs.iter().map(|&(_, raw)| raw as u64));
            if map.len() != pairs.len() || map.raw_ids().iter().zip(&pairs).any(|(a, b)| *a != b.1 as u64) {
                return Err(parse_err(&dir.join(name), 1, "raw ids must be unique and ascending"));
            }
            Ok(map)
        };
        let attributes: Vec<AttributeTable> = serde_json::from_str(&read_text(&dir.join("attributes.json"))?)?;
        let ds = Self {
            n_users: manifest.n_users,
            n_items: manifest.n_items,
            train: read_pairs("train.tsv")?,
            validation: read_pairs("validation.tsv")?,
            test: read_pairs("test.tsv")?,
            user_ids: read_ids("user_ids.tsv")?,
            item_ids: read_ids("item_ids.tsv")?,
            attributes,
            ground_truth: None,
        };
        if ds.user_ids.len() != ds.n_users || ds.item_ids.len() != ds.n_items {
            return Err(Error::Invalid("id maps disagree with manifest counts".into()));
        }
        ds.check()?;
        let hash = ds.content_hash()?;
        if hash != manifest.content_hash {
            return Err(Error::Invalid(format!(
                "bundle content hash {hash} does not match manifest {}",
                manifest.content_hash
            )));
        }
        Ok(ds)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BundleManifest {
    pub format_version: u32,
    pub source: String,
    pub n_users: usize,
    pub n_items: usize,
    pub n_train: usize,
    pub n_validation: usize,
    pub n_test: usize,
    pub attributes: Vec<String>,
    pub content_hash: String,
}

fn content_hash(files: &[(&str, Vec<u8>)]) -> String {
    let mut h = Sha256::new();
    for (name, bytes) in files {
        h.update(name.as_bytes());
        h.update([0u8]);
        h.update((bytes.len() as u64).to_le_bytes());
        h.update(bytes);
    }
    h.finalize().iter().fold(String::with_capacity(64), |mut s, b| {
        write!(s, "{b:02x}").unwrap();
        s
    })
}

type Interactions = Vec<(usize, usize)>;

/// Per-user random holdout of `round(fraction * n_u)` interactions, always
/// leaving at least one in train.
pub fn split_holdout(
    train: &[(usize, usize)],
    fraction: f64,
    seed: u64,
) -> Result<(Interactions, Interactions)> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::Invalid(format!("holdout fraction must be in (0, 1), got {fraction}")));
    }
    let mut by_user: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    let mut sorted = train.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    for &(u, i) in &sorted {
        by_user.entry(u).or_default().push(i);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut kept, mut held) = (Vec::new(), Vec::new());
    for (u, mut items) in by_user {
        let n = items.len();
        let n_hold = ((n as f64 * fraction).round() as usize).min(n - 1);
        items.shuffle(&mut rng);
        held.extend(items[..n_hold].iter().map(|&i| (u, i)));
        kept.extend(items[n_hold..].iter().map(|&i| (u, i)));
    }
    kept.sort_unstable();
    held.sort_unstable();
    Ok((kept, held))
}

/// Column layout of the Coat feature matrices.
pub mod coat_layout {
    /// `user_features.ascii`: gender(2) age(6) location(3) fashion(3).
    pub const USER_GENDER: std::ops::Range<usize> = 0..2;
    /// `item_features.ascii`: gender(2) jacket type(16) color(13) front page(2).
    pub const ITEM_GENDER: std::ops::Range<usize> = 0..2;
    pub const ITEM_COLOR: std::ops::Range<usize> = 18..31;
}

fn find_file(dir: &Path, candidates: &[&str]) -> Option<PathBuf> {
    candidates.iter().map(|c| dir.join(c)).find(|p| p.is_file())
}

/// Loads the Coat distribution: `train.ascii` / `test.ascii` rating
/// matrices plus optional feature matrices under `user_item_features/`.
pub fn load_coat(dir: &Path, threshold: f64) -> Result<Dataset> {
    let train_path = find_file(dir, &["train.ascii"])
        .ok_or_else(|| Error::Invalid(format!("{}: train.ascii not found", dir.display())))?;
    let test_path = find_file(dir, &["test.ascii"])
        .ok_or_else(|| Error::Invalid(format!("{}: test.ascii not found", dir.display())))?;
    let train = load_rating_matrix(&train_path, threshold)?;
    let test = load_rating_matrix(&test_path, threshold)?;
    let mut ds = Dataset::from_raw(&train, &[], &test)?;

    let user_feat = find_file(dir, &["user_item_features/user_features.ascii", "user_features.ascii"]);
    if let Some(path) = user_feat {
        let labels = one_hot_labels(&path, coat_layout::USER_GENDER)?;
        let table = ds.remap_labels("gender", Side::User, vec!["men".into(), "women".into()], &labels)?;
        ds.attributes.push(table);
    }
    let item_feat = find_file(dir, &["user_item_features/item_features.ascii", "item_features.ascii"]);
    if let Some(path) = item_feat {
        let color = one_hot_labels(&path, coat_layout::ITEM_COLOR)?;
        let domain = (0..coat_layout::ITEM_COLOR.len()).map(|k| format!("color_{k}")).collect();
        let table = ds.remap_labels("color", Side::Item, domain, &color)?;
        ds.attributes.push(table);
        let gender = one_hot_labels(&path, coat_layout::ITEM_GENDER)?;
        let table = ds.remap_labels("item_gender", Side::Item, vec!["men".into(), "women".into()], &gender)?;
        ds.attributes.push(table);
    }
    Ok(ds)
}

/// Loads a pair of `user<TAB>item<TAB>rating` files (Yahoo layout).
pub fn load_tsv_pair(train: &Path, test: &Path, threshold: f64) -> Result<Dataset> {
    Dataset::from_raw(&load_tsv(train, threshold)?, &[], &load_tsv(test, threshold)?)
}

/// Parameters of the synthetic biased-exposure generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SyntheticSpec {
    pub n_users: usize,
    pub n_items: usize,
    pub latent_dim: usize,
    /// Exposure probability is proportional to `popularity^gamma`.
    pub popularity_exponent: f64,
    /// Zipf exponent of the latent item popularity.
    pub popularity_skew: f64,
    /// Probability that an exposed, non-preferred item is clicked anyway.
    pub noise_rate: f64,
    /// Fraction of items each user truly prefers.
    pub positive_fraction: f64,
    /// Biased exposure draws per user (with replacement, then deduplicated).
    pub train_exposures: usize,
    /// Uniformly exposed unseen items per user in the test log.
    pub test_exposures: usize,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            n_users: 300,
            n_items: 300,
            latent_dim: 8,
            popularity_exponent: 1.0,
            popularity_skew: 1.0,
            noise_rate: 0.1,
            positive_fraction: 0.1,
            train_exposures: 100,
            test_exposures: 100,
            seed: 0,
        }
    }
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_users == 0 || self.n_items < 2 || self.latent_dim == 0 {
            return Err(Error::Config("synthetic sizes must be positive".into()));
        }
        for (name, p) in [("noise_rate", self.noise_rate), ("positive_fraction", self.positive_fraction)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Config(format!("{name} must be a probability, got {p}")));
            }
        }
        if !(self.popularity_exponent.is_finite() && self.popularity_skew.is_finite()) {
            return Err(Error::Config("popularity exponents must be finite".into()));
        }
        Ok(())
    }
}

/// Latent-factor preferences observed through popularity-skewed exposure
/// (train) and uniform exposure (test).
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<Dataset> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (nu, ni, k) = (spec.n_users, spec.n_items, spec.latent_dim);
    let user_f = Array2::<f64>::from_shape_simple_fn((nu, k), || StandardNormal.sample(&mut rng));
    let mut item_f = Array2::<f64>::from_shape_simple_fn((ni, k), || StandardNormal.sample(&mut rng));
    // Unit-norm items: preference depends on direction, so no item is
    // relevant to most users merely by having a large factor.
    for mut row in item_f.rows_mut() {
        let norm = row.dot(&row).sqrt();
        if norm > 0.0 {
            row /= norm;
        }
    }
    let affinity = user_f.dot(&item_f.t());

    let n_pos = ((spec.positive_fraction * ni as f64).round() as usize).clamp(1, ni);
    let mut relevance = Array2::from_elem((nu, ni), false);
    for u in 0..nu {
        let mut order: Vec<usize> = (0..ni).collect();
        order.sort_by(|&a, &b| affinity[[u, b]].total_cmp(&affinity[[u, a]]).then(a.cmp(&b)));
        for &i in &order[..n_pos] {
            relevance[[u, i]] = true;
        }
    }

    let mut ranks: Vec<usize> = (1..=ni).collect();
    ranks.shuffle(&mut rng);
    let item_popularity: Vec<f64> = ranks.iter().map(|&r| (r as f64).powf(-spec.popularity_skew)).collect();
    let weights: Vec<f64> = item_popularity.iter().map(|p| p.powf(spec.popularity_exponent)).collect();
    let exposure = rand::distr::weighted::WeightedIndex::new(&weights)
        .map_err(|e| Error::Config(format!("exposure weights: {e}")))?;

    let mut train = Vec::new();
    let mut train_exposures = Vec::new();
    let mut test = Vec::new();
    let mut test_exposures = Vec::new();
    let mut noise_interactions = Vec::new();
    let mut train_exposure_count = vec![0usize; ni];
    for u in 0..nu {
        let mut seen = vec![false; ni];
        for _ in 0..spec.train_exposures {
            let i = exposure.sample(&mut rng);
            if std::mem::replace(&mut seen[i], true) {
                continue;
            }
            train_exposures.push((u, i));
            train_exposure_count[i] += 1;
            let clicked = if relevance[[u, i]] {
                true
            } else if rng.random::<f64>() < spec.noise_rate {
                noise_interactions.push((u, i));
                true
            } else {
                false
            };
            if clicked {
                train.push((u, i));
            }
        }
        let mut unseen: Vec<usize> = (0..ni).filter(|&i| !seen[i]).collect();
        unseen.shuffle(&mut rng);
        for &i in unseen.iter().take(spec.test_exposures) {
            test_exposures.push((u, i));
            if relevance[[u, i]] {
                test.push((u, i));
            }
        }
    }
    // Users or items that never appear still get embeddings: ids are the
    // generator's own indices.
    let user_ids = IdMap::from_ids(0..nu as u64);
    let item_ids = IdMap::from_ids(0..ni as u64);
    if train.is_empty() {
        return Err(Error::EmptyGraph);
    }
    train.sort_unstable();
    test.sort_unstable();
    let pop_group = {
        let mut order: Vec<usize> = (0..ni).collect();
        order.sort_by(|&a, &b| item_popularity[a].total_cmp(&item_popularity[b]).then(a.cmp(&b)));
        let mut labels = vec![None; ni];
        for (pos, &i) in order.iter().enumerate() {
            labels[i] = Some(pos * 4 / ni);
        }
        AttributeTable::new("latent_popularity", Side::Item, (0..4).map(|g| g.to_string()).collect(), labels)?
    };
    Ok(Dataset {
        n_users: nu,
        n_items: ni,
        train,
        validation: Vec::new(),
        test,
        user_ids,
        item_ids,
        attributes: vec![pop_group],
        ground_truth: Some(GroundTruth {
            relevance,
            item_popularity,
            train_exposure_count,
            train_exposures,
            test_exposures,
            noise_interactions,
        }),
    })
}
