//! Immutable CSR topology plus vertex subsets (train/val/test masks).
//!
//! Row `u` of the CSR lists the targets of edges `u -> v` (an ingested line
//! `src dst` lands in row `src`). Samplers treat row `v` as the aggregation
//! neighborhood of `v`, which is exact for symmetrized graphs, where every row
//! is both the in- and the out-neighborhood.
//! Self-loops never appear as edges: a vertex's own previous-layer feature is
//! charged through the per-vertex FLOP term instead.

mod io;
mod meta;
mod synthetic;

pub use io::{ingest_edge_list, load_binary_csr, read_mask, save_binary_csr, GCSR_MAGIC};
pub use meta::{validate_against_meta, DatasetMeta, FieldCheck, MetaReport, META_TOLERANCE};
pub use synthetic::{generate_synthetic, SyntheticKind};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense vertex id. Graphs are limited to `u32::MAX` vertices.
pub type VertexId = u32;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsrGraph {
    offsets: Vec<usize>,
    targets: Vec<VertexId>,
    symmetric: bool,
}

impl CsrGraph {
    /// Builds a graph from raw CSR arrays, checking every invariant.
    pub fn from_csr(offsets: Vec<usize>, targets: Vec<VertexId>) -> Result<Self> {
        if offsets.is_empty() {
            return Err(Error::Validation(
                "offsets must have length n+1 >= 1".into(),
            ));
        }
        if offsets[0] != 0 {
            return Err(Error::Validation(format!(
                "offsets[0] = {} (expected 0)",
                offsets[0]
            )));
        }
        let n = offsets.len() - 1;
        if offsets[n] != targets.len() {
            return Err(Error::Validation(format!(
                "offsets[n] = {} but m = {}",
                offsets[n],
                targets.len()
            )));
        }
        for v in 0..n {
            let (lo, hi) = (offsets[v], offsets[v + 1]);
            if lo > hi {
                return Err(Error::Validation(format!("offsets decrease at vertex {v}")));
            }
            let row = &targets[lo..hi];
            for (i, &t) in row.iter().enumerate() {
                if t as usize >= n {
                    return Err(Error::Validation(format!(
                        "target {t} of vertex {v} is outside [0, {n})"
                    )));
                }
                if i > 0 && row[i - 1] >= t {
                    return Err(Error::Validation(format!(
                        "adjacency of vertex {v} is not strictly ascending"
                    )));
                }
            }
        }
        let mut g = Self {
            offsets,
            targets,
            symmetric: false,
        };
        g.symmetric = g.check_symmetric();
        Ok(g)
    }

    /// Builds a graph from an edge list. Self-loops are dropped and duplicates
    /// removed; with `symmetrize`, each `(u, v)` also contributes `(v, u)`.
    pub fn from_edges(n: usize, edges: &[(VertexId, VertexId)], symmetrize: bool) -> Result<Self> {
        if n > VertexId::MAX as usize + 1 {
            return Err(Error::Range(format!(
                "{n} vertices exceed the u32 id space"
            )));
        }
        let mut pairs: Vec<(VertexId, VertexId)> = Vec::with_capacity(if symmetrize {
            2 * edges.len()
        } else {
            edges.len()
        });
        for &(u, v) in edges {
            if u as usize >= n || v as usize >= n {
                return Err(Error::Range(format!("edge ({u}, {v}) outside [0, {n})")));
            }
            if u == v {
                continue;
            }
            pairs.push((u, v));
            if symmetrize {
                pairs.push((v, u));
            }
        }
        pairs.sort_unstable();
        pairs.dedup();

        let mut offsets = vec![0usize; n + 1];
        for &(u, _) in &pairs {
            offsets[u as usize + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let targets = pairs.into_iter().map(|(_, v)| v).collect();
        let mut g = Self {
            offsets,
            targets,
            symmetric: false,
        };
        g.symmetric = symmetrize || g.check_symmetric();
        Ok(g)
    }

    pub fn empty() -> Self {
        Self {
            offsets: vec![0],
            targets: Vec::new(),
            symmetric: true,
        }
    }

    #[inline]
    pub fn num_vertices(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Number of directed edges (a symmetrized undirected edge counts twice).
    #[inline]
    pub fn num_edges(&self) -> usize {
        self.targets.len()
    }

    #[inline]
    pub fn degree(&self, v: VertexId) -> usize {
        let v = v as usize;
        self.offsets[v + 1] - self.offsets[v]
    }

    #[inline]
    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        let v = v as usize;
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn targets(&self) -> &[VertexId] {
        &self.targets
    }

    /// True when every edge `(u, v)` has its reverse `(v, u)`.
    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> {
        0..self.num_vertices() as VertexId
    }

    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.vertices()
            .flat_map(move |u| self.neighbors(u).iter().map(move |&v| (u, v)))
    }

    /// Vertex with the largest degree, lowest id on ties.
    pub fn max_degree_vertex(&self) -> Option<VertexId> {
        self.vertices()
            .max_by(|&a, &b| self.degree(a).cmp(&self.degree(b)).then(b.cmp(&a)))
    }

    fn check_symmetric(&self) -> bool {
        self.edges().all(|(u, v)| self.has_edge(v, u))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SetRole {
    Train,
    Val,
    Test,
    Seed,
    Generic,
}

/// Sorted, deduplicated set of vertex ids.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VertexSet {
    ids: Vec<VertexId>,
    role: SetRole,
}

impl VertexSet {
    /// Wraps ids that must already be strictly ascending and below `n`.
    pub fn new(ids: Vec<VertexId>, role: SetRole, n: usize) -> Result<Self> {
        if let Some(w) = ids.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::Validation(format!(
                "vertex set not strictly ascending at {} >= {}",
                w[0], w[1]
            )));
        }
        if let Some(&last) = ids.last() {
            if last as usize >= n {
                return Err(Error::Range(format!("vertex {last} outside [0, {n})")));
            }
        }
        Ok(Self { ids, role })
    }

    /// Sorts and deduplicates arbitrary ids.
    pub fn from_unsorted(mut ids: Vec<VertexId>, role: SetRole, n: usize) -> Result<Self> {
        ids.sort_unstable();
        ids.dedup();
        Self::new(ids, role, n)
    }

    pub fn all(n: usize, role: SetRole) -> Self {
        Self {
            ids: (0..n as VertexId).collect(),
            role,
        }
    }

    pub fn ids(&self) -> &[VertexId] {
        &self.ids
    }

    pub fn role(&self) -> SetRole {
        self.role
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.ids.binary_search(&v).is_ok()
    }

    pub fn into_ids(self) -> Vec<VertexId> {
        self.ids
    }
}
