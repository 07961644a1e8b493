//! Embedding tables and linear multi-layer propagation (LightGCN style):
//! no self loops, no feature transforms, mean readout over layers `0..=L`.

use std::io::Write;
use std::path::Path;

use ndarray::{Array2, ArrayView1, Axis};
use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::graph::NormalizedAdjacency;

/// Layer-0 embeddings for all nodes, users first.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingModel {
    embeddings: Array2<f64>,
    n_users: usize,
    n_layers: usize,
}

impl EmbeddingModel {
    pub fn new(embeddings: Array2<f64>, n_users: usize, n_layers: usize) -> Result<Self> {
        if embeddings.ncols() == 0 {
            return Err(Error::Dimension("embedding size must be positive".into()));
        }
        if n_users > embeddings.nrows() {
            return Err(Error::Dimension(format!(
                "{n_users} users but only {} embedding rows",
                embeddings.nrows()
            )));
        }
        if embeddings.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("embeddings".into()));
        }
        Ok(Self {
            embeddings,
            n_users,
            n_layers,
        })
    }

    /// Zero-mean Gaussian initialization.
    pub fn random<R: Rng + ?Sized>(
        n_users: usize,
        n_items: usize,
        dim: usize,
        n_layers: usize,
        std: f64,
        rng: &mut R,
    ) -> Result<Self> {
        let normal = Normal::new(0.0, std)
            .map_err(|e| Error::Config(format!("init std {std}: {e}")))?;
        let embeddings = Array2::from_shape_simple_fn((n_users + n_items, dim), || normal.sample(rng));
        Self::new(embeddings, n_users, n_layers)
    }

    pub fn n_users(&self) -> usize {
        self.n_users
    }

    pub fn n_items(&self) -> usize {
        self.embeddings.nrows() - self.n_users
    }

    pub fn n_nodes(&self) -> usize {
        self.embeddings.nrows()
    }

    pub fn dim(&self) -> usize {
        self.embeddings.ncols()
    }

    pub fn n_layers(&self) -> usize {
        self.n_layers
    }

    pub fn embeddings(&self) -> &Array2<f64> {
        &self.embeddings
    }

    pub fn embeddings_mut(&mut self) -> &mut Array2<f64> {
        &mut self.embeddings
    }

    pub fn user(&self, u: usize) -> ArrayView1<'_, f64> {
        self.embeddings.row(u)
    }

    pub fn item(&self, i: usize) -> ArrayView1<'_, f64> {
        self.embeddings.row(self.n_users + i)
    }

    /// Runs `n_layers` rounds of `Z <- A Z` starting from the embeddings.
    pub fn propagate<'a>(&self, adj: &'a NormalizedAdjacency) -> Result<PropagationTrace<'a>> {
        propagate(&self.embeddings, self.n_layers, adj)
    }

    /// Final representations on the full, undropped graph.
    pub fn infer(&self, adj: &NormalizedAdjacency) -> Result<Representations> {
        Ok(self.propagate(adj)?.readout(self.n_users))
    }

    /// Writes `node_type,index,dim_0..dim_{d-1}` rows for every node.
    pub fn export_csv(&self, reps: &Representations, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = std::io::BufWriter::new(file);
        let header: Vec<String> = (0..reps.dim()).map(|k| format!("dim_{k}")).collect();
        let io = |e| Error::io(path, e);
        writeln!(w, "node_type,index,{}", header.join(",")).map_err(io)?;
        for (node, row) in reps.matrix().outer_iter().enumerate() {
            let (kind, index) = if node < self.n_users {
                ("user", node)
            } else {
                ("item", node - self.n_users)
            };
            let values: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            writeln!(w, "{kind},{index},{}", values.join(",")).map_err(io)?;
        }
        w.flush().map_err(io)
    }
}

/// Per-layer node matrices `Z^(0)..Z^(L)` for one graph view.
#[derive(Debug, Clone)]
pub struct PropagationTrace<'a> {
    layers: Vec<Array2<f64>>,
    adj: &'a NormalizedAdjacency,
}

pub fn propagate<'a>(
    layer0: &Array2<f64>,
    n_layers: usize,
    adj: &'a NormalizedAdjacency,
) -> Result<PropagationTrace<'a>> {
    if layer0.nrows() != adj.n_nodes() {
        return Err(Error::Dimension(format!(
            "{} embedding rows for an adjacency over {} nodes",
            layer0.nrows(),
            adj.n_nodes()
        )));
    }
    let mut layers = Vec::with_capacity(n_layers + 1);
    layers.push(layer0.clone());
    for l in 0..n_layers {
        let next = adj.matmul(&layers[l])?;
        layers.push(next);
    }
    Ok(PropagationTrace { layers, adj })
}

impl PropagationTrace<'_> {
    pub fn layers(&self) -> &[Array2<f64>] {
        &self.layers
    }

    pub fn adjacency(&self) -> &NormalizedAdjacency {
        self.adj
    }

    pub fn n_layers(&self) -> usize {
        self.layers.len() - 1
    }

    /// Uniform mean over all layers.
    pub fn readout(&self, n_users: usize) -> Representations {
        let mut sum = self.layers[0].clone();
        for layer in &self.layers[1..] {
            sum += layer;
        }
        sum /= self.layers.len() as f64;
        Representations { z: sum, n_users }
    }

    /// Gradient w.r.t. `Z^(0)` given the gradient w.r.t. the readout:
    /// `(1/(L+1)) * sum_l A^l g`, using that `A` is symmetric.
    pub fn backward(&self, grad_readout: &Array2<f64>) -> Result<Array2<f64>> {
        let shape = self.layers[0].dim();
        if grad_readout.dim() != shape {
            return Err(Error::Dimension(format!(
                "readout gradient {:?} vs representations {:?}",
                grad_readout.dim(),
                shape
            )));
        }
        let mut acc = grad_readout.to_owned();
        let mut cur = grad_readout.to_owned();
        for _ in 0..self.n_layers() {
            cur = self.adj.matmul(&cur)?;
            acc += &cur;
        }
        acc /= self.layers.len() as f64;
        Ok(acc)
    }
}

/// Final node representations, users first.
#[derive(Debug, Clone, PartialEq)]
pub struct Representations {
    z: Array2<f64>,
    n_users: usize,
}

impl Representations {
    pub fn new(z: Array2<f64>, n_users: usize) -> Self {
        Self { z, n_users }
    }

    pub fn matrix(&self) -> &Array2<f64> {
        &self.z
    }

    pub fn n_users(&self) -> usize {
        self.n_users
    }

    pub fn n_items(&self) -> usize {
        self.z.nrows() - self.n_users
    }

    pub fn dim(&self) -> usize {
        self.z.ncols()
    }

    pub fn user(&self, u: usize) -> ArrayView1<'_, f64> {
        self.z.row(u)
    }

    pub fn item(&self, i: usize) -> ArrayView1<'_, f64> {
        self.z.row(self.n_users + i)
    }

    /// Dense `n_users x n_items` matrix of inner-product scores.
    pub fn score_matrix(&self) -> Array2<f64> {
        let (users, items) = self.z.view().split_at(Axis(0), self.n_users);
        users.dot(&items.t())
    }

    pub fn score(&self, u: usize, i: usize) -> f64 {
        score(self.user(u), self.item(i))
    }
}

/// Predicted preference: inner product of user and item representations.
pub fn score(user: ArrayView1<'_, f64>, item: ArrayView1<'_, f64>) -> f64 {
    user.dot(&item)
}
