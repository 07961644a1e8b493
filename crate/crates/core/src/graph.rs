//! Bipartite user-item interaction graph, its symmetric normalization and
//! edge masking.
//!
//! Nodes are laid out users first: user `u` is node `u`, item `i` is node
//! `n_users + i`. Edges are undirected and stored once, sorted by
//! `(user, item)`, so an edge index doubles as the position of its bit in any
//! mask.

use ndarray::Array2;

use crate::error::{Error, Result};

/// Observed interactions as a deduplicated, canonically ordered edge list.
#[derive(Debug, Clone, PartialEq)]
pub struct InteractionGraph {
    n_users: usize,
    n_items: usize,
    edges: Vec<(usize, usize)>,
    user_degree: Vec<usize>,
    item_degree: Vec<usize>,
    /// `user_offsets[u]..user_offsets[u + 1]` is the edge range of user `u`.
    user_offsets: Vec<usize>,
    /// Edge indices incident to each item, ordered by user.
    item_edges: Vec<Vec<usize>>,
}

impl InteractionGraph {
    /// Builds the graph from raw `(user, item)` pairs. Duplicates are dropped.
    pub fn build(n_users: usize, n_items: usize, interactions: &[(usize, usize)]) -> Result<Self> {
        if interactions.is_empty() {
            return Err(Error::EmptyGraph);
        }
        if let Some(&(user, item)) = interactions
            .iter()
            .find(|&&(u, i)| u >= n_users || i >= n_items)
        {
            return Err(Error::EdgeOutOfBounds {
                user,
                item,
                n_users,
                n_items,
            });
        }
        let mut edges = interactions.to_vec();
        edges.sort_unstable();
        edges.dedup();
        Ok(Self::from_sorted_edges(n_users, n_items, edges))
    }

    /// Builds the graph sizing the node sets from the largest index seen.
    pub fn from_interactions(interactions: &[(usize, usize)]) -> Result<Self> {
        let n_users = interactions.iter().map(|&(u, _)| u + 1).max().unwrap_or(0);
        let n_items = interactions.iter().map(|&(_, i)| i + 1).max().unwrap_or(0);
        Self::build(n_users, n_items, interactions)
    }

    fn from_sorted_edges(n_users: usize, n_items: usize, edges: Vec<(usize, usize)>) -> Self {
        let mut user_degree = vec![0; n_users];
        let mut item_degree = vec![0; n_items];
        let mut item_edges = vec![Vec::new(); n_items];
        for (e, &(u, i)) in edges.iter().enumerate() {
            user_degree[u] += 1;
            item_degree[i] += 1;
            item_edges[i].push(e);
        }
        let mut user_offsets = Vec::with_capacity(n_users + 1);
        user_offsets.push(0);
        for d in &user_degree {
            user_offsets.push(user_offsets.last().unwrap() + d);
        }
        Self {
            n_users,
            n_items,
            edges,
            user_degree,
            item_degree,
            user_offsets,
            item_edges,
        }
    }

    pub fn n_users(&self) -> usize {
        self.n_users
    }

    pub fn n_items(&self) -> usize {
        self.n_items
    }

    pub fn n_nodes(&self) -> usize {
        self.n_users + self.n_items
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn user_degree(&self, user: usize) -> usize {
        self.user_degree[user]
    }

    pub fn item_degree(&self, item: usize) -> usize {
        self.item_degree[item]
    }

    pub fn item_degrees(&self) -> &[usize] {
        &self.item_degree
    }

    /// Items the user interacted with, in ascending order.
    pub fn user_items(&self, user: usize) -> impl ExactSizeIterator<Item = usize> + '_ {
        self.edges[self.user_offsets[user]..self.user_offsets[user + 1]]
            .iter()
            .map(|&(_, i)| i)
    }

    pub fn has_edge(&self, user: usize, item: usize) -> bool {
        let range = &self.edges[self.user_offsets[user]..self.user_offsets[user + 1]];
        range.binary_search(&(user, item)).is_ok()
    }

    /// Index of edge `(user, item)` in the canonical ordering.
    pub fn edge_index(&self, user: usize, item: usize) -> Option<usize> {
        let start = self.user_offsets[user];
        self.edges[start..self.user_offsets[user + 1]]
            .binary_search(&(user, item))
            .ok()
            .map(|k| start + k)
    }

    /// Subgraph holding exactly the edges whose mask bit is set.
    pub fn apply_mask(&self, mask: &[bool]) -> Result<Self> {
        self.check_mask(mask)?;
        let edges = self
            .edges
            .iter()
            .zip(mask)
            .filter(|(_, &keep)| keep)
            .map(|(&e, _)| e)
            .collect();
        Ok(Self::from_sorted_edges(self.n_users, self.n_items, edges))
    }

    fn check_mask(&self, mask: &[bool]) -> Result<()> {
        if mask.len() != self.edges.len() {
            return Err(Error::MaskLength {
                expected: self.edges.len(),
                got: mask.len(),
            });
        }
        Ok(())
    }

    /// Symmetric `D^{-1/2} A D^{-1/2}` over the full graph.
    pub fn normalize(&self) -> NormalizedAdjacency {
        self.build_adjacency(None)
    }

    /// Symmetric normalization of the masked subgraph. Degrees are counted
    /// after masking; isolated nodes get empty rows.
    pub fn normalize_masked(&self, mask: &[bool]) -> Result<NormalizedAdjacency> {
        self.check_mask(mask)?;
        Ok(self.build_adjacency(Some(mask)))
    }

    fn build_adjacency(&self, mask: Option<&[bool]>) -> NormalizedAdjacency {
        let kept = |e: usize| mask.is_none_or(|m| m[e]);
        let mut user_deg = vec![0usize; self.n_users];
        let mut item_deg = vec![0usize; self.n_items];
        for (e, &(u, i)) in self.edges.iter().enumerate() {
            if kept(e) {
                user_deg[u] += 1;
                item_deg[i] += 1;
            }
        }
        let weight = |u: usize, i: usize| 1.0 / ((user_deg[u] * item_deg[i]) as f64).sqrt();

        let n_nodes = self.n_nodes();
        let nnz = 2 * user_deg.iter().sum::<usize>();
        let mut row_ptr = Vec::with_capacity(n_nodes + 1);
        let mut col_idx = Vec::with_capacity(nnz);
        let mut values = Vec::with_capacity(nnz);
        row_ptr.push(0);
        for u in 0..self.n_users {
            for e in self.user_offsets[u]..self.user_offsets[u + 1] {
                if kept(e) {
                    let i = self.edges[e].1;
                    col_idx.push(self.n_users + i);
                    values.push(weight(u, i));
                }
            }
            row_ptr.push(col_idx.len());
        }
        for (i, incident) in self.item_edges.iter().enumerate() {
            for &e in incident {
                if kept(e) {
                    let u = self.edges[e].0;
                    col_idx.push(u);
                    values.push(weight(u, i));
                }
            }
            row_ptr.push(col_idx.len());
        }
        NormalizedAdjacency {
            n_nodes,
            row_ptr,
            col_idx,
            values,
        }
    }
}

/// Symmetric normalized adjacency over all user and item nodes, in CSR form.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedAdjacency {
    n_nodes: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl NormalizedAdjacency {
    /// Identity operator, mostly useful for tests of the propagation path.
    pub fn identity(n_nodes: usize) -> Self {
        Self {
            n_nodes,
            row_ptr: (0..=n_nodes).collect(),
            col_idx: (0..n_nodes).collect(),
            values: vec![1.0; n_nodes],
        }
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Nonzeros of one row as `(column, weight)` pairs.
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.col_idx[span.clone()]
            .iter()
            .copied()
            .zip(self.values[span].iter().copied())
    }

    /// Entry `(r, c)`, zero when not stored.
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.row(r).find(|&(col, _)| col == c).map_or(0.0, |(_, w)| w)
    }

    pub fn to_dense(&self) -> Array2<f64> {
        let mut dense = Array2::zeros((self.n_nodes, self.n_nodes));
        for r in 0..self.n_nodes {
            for (c, w) in self.row(r) {
                dense[[r, c]] = w;
            }
        }
        dense
    }

    /// Sparse-dense product `self * x`.
    pub fn matmul(&self, x: &Array2<f64>) -> Result<Array2<f64>> {
        if x.nrows() != self.n_nodes {
            return Err(Error::Dimension(format!(
                "adjacency has {} nodes, operand has {} rows",
                self.n_nodes,
                x.nrows()
            )));
        }
        let d = x.ncols();
        let x = x.as_standard_layout();
        let src = x.as_slice().expect("standard layout");
        let mut out = Array2::<f64>::zeros((self.n_nodes, d));
        let dst = out.as_slice_mut().expect("fresh array is contiguous");
        for (r, out_row) in dst.chunks_exact_mut(d.max(1)).enumerate().take(self.n_nodes) {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                let w = self.values[k];
                let c = self.col_idx[k];
                for (o, s) in out_row.iter_mut().zip(&src[c * d..(c + 1) * d]) {
                    *o += w * s;
                }
            }
        }
        Ok(out)
    }
}

/// Edge masks for the bias-aware (`plus`) and bias-mitigated (`minus`) views.
/// The two bit vectors are independent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaskPair {
    pub plus: Vec<bool>,
    pub minus: Vec<bool>,
}

impl MaskPair {
    pub fn new(plus: Vec<bool>, minus: Vec<bool>) -> Result<Self> {
        if plus.len() != minus.len() {
            return Err(Error::MaskLength {
                expected: plus.len(),
                got: minus.len(),
            });
        }
        Ok(Self { plus, minus })
    }

    /// Both views keep every edge.
    pub fn full(n_edges: usize) -> Self {
        Self {
            plus: vec![true; n_edges],
            minus: vec![true; n_edges],
        }
    }

    pub fn len(&self) -> usize {
        self.plus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.plus.is_empty()
    }
}
