//! Mini-batch construction: epoch planning, neighborhood sampling, and the
//! ClusterGCN / GraphSAINT subgraph samplers.
//!
//! Layer indexing follows the model: layer `L` holds the seeds, layer `0` the
//! input frontier whose raw features must be gathered. `layer_vertices[l]`
//! is `|V^l|` for `l = 0..=L`; `layer_edges[l - 1]` is `|E^l|`, the edges
//! feeding layer `l`, for `l = 1..=L`. Layer `l` expands with
//! `fanouts[l - 1]`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{CsrGraph, SetRole, VertexId, VertexSet};
use crate::partition::PartitionAssignment;
use crate::rng::CounterRng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Graphsage,
    Gcn,
    Gat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Aggregator {
    Mean,
    Gcn,
    Pool,
}

/// GNN architecture: layer widths, attention heads, per-layer fanouts and the
/// backward-pass factor `eta` (the backward pass costs `eta` forward passes).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelArch {
    pub kind: ModelKind,
    /// `[d_0, ..., d_L]`: input width first, class count last.
    pub dims: Vec<u64>,
    pub heads: u64,
    pub aggregator: Aggregator,
    pub fanouts: Vec<usize>,
    pub eta: f64,
}

impl ModelArch {
    /// `layers` layers of width `hidden` between `input` and `classes`.
    pub fn uniform(
        kind: ModelKind,
        input: u64,
        hidden: u64,
        classes: u64,
        layers: usize,
        fanout: usize,
    ) -> Self {
        let mut dims = vec![input];
        dims.extend(std::iter::repeat_n(hidden, layers.saturating_sub(1)));
        dims.push(classes);
        Self {
            kind,
            dims,
            heads: 1,
            aggregator: Aggregator::Mean,
            fanouts: vec![fanout; layers],
            eta: 1.0,
        }
    }

    pub fn layers(&self) -> usize {
        self.dims.len().saturating_sub(1)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dims.len() < 2 {
            return Err(Error::Argument(
                "model needs at least one layer (dims of length >= 2)".into(),
            ));
        }
        if self.dims.contains(&0) {
            return Err(Error::Argument("all layer widths must be >= 1".into()));
        }
        if self.heads == 0 {
            return Err(Error::Argument("heads must be >= 1".into()));
        }
        if self.kind != ModelKind::Gat && self.heads != 1 {
            return Err(Error::Argument(
                "heads > 1 is only meaningful for GAT".into(),
            ));
        }
        if !self.eta.is_finite() || self.eta < 0.0 {
            return Err(Error::Argument(format!(
                "eta must be a finite value >= 0, got {}",
                self.eta
            )));
        }
        Ok(())
    }

    /// Validation plus the fanout-length check needed by neighborhood sampling.
    pub fn validate_for_sampling(&self) -> Result<()> {
        self.validate()?;
        if self.fanouts.len() != self.layers() {
            return Err(Error::Argument(format!(
                "fanouts has {} entries, model has {} layers",
                self.fanouts.len(),
                self.layers()
            )));
        }
        Ok(())
    }
}

/// Per-(iteration, worker) sampled computation graph, reduced to the counts
/// the cost model consumes plus the input frontier.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MicroBatch {
    pub worker: u32,
    pub iteration: u32,
    pub layer_vertices: Vec<u64>,
    pub layer_edges: Vec<u64>,
    pub input_frontier: VertexSet,
    /// Training vertices whose loss this batch computes.
    pub seed_count: u64,
}

impl MicroBatch {
    pub fn layers(&self) -> usize {
        self.layer_edges.len()
    }
}

/// Seed sets for one epoch: `seeds[i][w]` belongs to worker `w` at iteration `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EpochPlan {
    pub seeds: Vec<Vec<VertexSet>>,
    pub global_batch: usize,
    pub workers: usize,
    pub rng_root: u64,
    pub epoch: u64,
}

impl EpochPlan {
    pub fn iterations(&self) -> usize {
        self.seeds.len()
    }
}

/// Identifies the random stream of one micro-batch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamKey {
    pub root: u64,
    pub epoch: u64,
    pub iteration: u64,
    pub worker: u64,
}

impl StreamKey {
    pub fn new(root: u64, epoch: u64, iteration: u64, worker: u64) -> Self {
        Self {
            root,
            epoch,
            iteration,
            worker,
        }
    }

    /// Sub-stream for one decision, e.g. `[layer, vertex]`.
    pub fn rng(&self, tag: u64, extra: &[u64]) -> CounterRng {
        let mut parts = Vec::with_capacity(5 + extra.len());
        parts.extend_from_slice(&[self.root, self.epoch, self.iteration, self.worker, tag]);
        parts.extend_from_slice(extra);
        CounterRng::from_parts(&parts)
    }
}

const TAG_PLAN: u64 = 1;
const TAG_NEIGHBOR: u64 = 2;
const TAG_CLUSTER: u64 = 3;
const TAG_SAINT_NODE: u64 = 4;
const TAG_SAINT_WALK: u64 = 5;

/// Shuffles the training set, cuts it into `ceil(|train| / batch_size)`
/// consecutive batches and deals each batch round-robin over `workers`.
pub fn plan_epoch(
    train: &VertexSet,
    batch_size: usize,
    workers: usize,
    rng_root: u64,
) -> Result<EpochPlan> {
    plan_epoch_at(train, batch_size, workers, rng_root, 0)
}

pub fn plan_epoch_at(
    train: &VertexSet,
    batch_size: usize,
    workers: usize,
    rng_root: u64,
    epoch: u64,
) -> Result<EpochPlan> {
    if train.is_empty() {
        return Err(Error::Argument("training set is empty".into()));
    }
    if workers == 0 || batch_size < workers {
        return Err(Error::Argument(format!(
            "need batch_size >= workers >= 1, got batch_size {batch_size}, workers {workers}"
        )));
    }
    let mut order = train.ids().to_vec();
    StreamKey::new(rng_root, epoch, 0, 0)
        .rng(TAG_PLAN, &[])
        .shuffle(&mut order);
    let seeds = order
        .chunks(batch_size)
        .map(|batch| {
            let mut per_worker = vec![Vec::new(); workers];
            for (j, &v) in batch.iter().enumerate() {
                per_worker[j % workers].push(v);
            }
            per_worker
                .into_iter()
                .map(|mut ids| {
                    ids.sort_unstable();
                    VertexSet::new(ids, SetRole::Seed, usize::MAX).expect("train ids are distinct")
                })
                .collect()
        })
        .collect();
    Ok(EpochPlan {
        seeds,
        global_batch: batch_size,
        workers,
        rng_root,
        epoch,
    })
}

/// Layer-wise uniform neighborhood sampling without replacement.
///
/// Each vertex of frontier `l` draws `min(deg, fanouts[l - 1])` distinct
/// neighbors; frontier `l - 1` is frontier `l` plus everything drawn.
/// `layer_edges` counts drawn (neighbor, vertex) pairs before deduplication.
pub fn neighborhood_sample(
    graph: &CsrGraph,
    seeds: &VertexSet,
    fanouts: &[usize],
    key: StreamKey,
) -> Result<MicroBatch> {
    if seeds.is_empty() {
        return Err(Error::Argument(
            "neighborhood sampling needs at least one seed".into(),
        ));
    }
    if fanouts.is_empty() {
        return Err(Error::Argument(
            "fanouts must have one entry per layer".into(),
        ));
    }
    let n = graph.num_vertices();
    if seeds.ids().last().is_some_and(|&v| v as usize >= n) {
        return Err(Error::Range("seed outside the graph".into()));
    }
    let layers = fanouts.len();
    let mut layer_vertices = vec![0u64; layers + 1];
    let mut layer_edges = vec![0u64; layers];
    let mut frontier: Vec<VertexId> = seeds.ids().to_vec();
    layer_vertices[layers] = frontier.len() as u64;
    for l in (1..=layers).rev() {
        let fanout = fanouts[l - 1];
        let mut next = frontier.clone();
        let mut drawn = 0u64;
        for &v in &frontier {
            let nbrs = graph.neighbors(v);
            let take = nbrs.len().min(fanout);
            if take == 0 {
                continue;
            }
            drawn += take as u64;
            if take == nbrs.len() {
                next.extend_from_slice(nbrs);
            } else {
                let mut rng = key.rng(TAG_NEIGHBOR, &[l as u64, v as u64]);
                next.extend(
                    rng.sample_distinct(nbrs.len(), take)
                        .into_iter()
                        .map(|i| nbrs[i]),
                );
            }
        }
        next.sort_unstable();
        next.dedup();
        layer_edges[l - 1] = drawn;
        layer_vertices[l - 1] = next.len() as u64;
        frontier = next;
    }
    Ok(MicroBatch {
        worker: key.worker as u32,
        iteration: key.iteration as u32,
        layer_vertices,
        layer_edges,
        input_frontier: VertexSet::new(frontier, SetRole::Generic, n)?,
        seed_count: seeds.len() as u64,
    })
}

/// Edges of `graph` with both endpoints in the sorted set `vertices`.
pub fn induced_edge_count(graph: &CsrGraph, vertices: &[VertexId]) -> u64 {
    vertices
        .iter()
        .map(|&v| {
            graph
                .neighbors(v)
                .iter()
                .filter(|u| vertices.binary_search(u).is_ok())
                .count() as u64
        })
        .sum()
}

fn subgraph_batch(
    graph: &CsrGraph,
    mut vertices: Vec<VertexId>,
    layers: usize,
    train: Option<&VertexSet>,
    key: StreamKey,
) -> Result<MicroBatch> {
    vertices.sort_unstable();
    vertices.dedup();
    let edges = induced_edge_count(graph, &vertices);
    let seed_count = match train {
        Some(t) => vertices.iter().filter(|&&v| t.contains(v)).count() as u64,
        None => vertices.len() as u64,
    };
    let size = vertices.len() as u64;
    Ok(MicroBatch {
        worker: key.worker as u32,
        iteration: key.iteration as u32,
        layer_vertices: vec![size; layers + 1],
        layer_edges: vec![edges; layers],
        input_frontier: VertexSet::new(vertices, SetRole::Generic, graph.num_vertices())?,
        seed_count,
    })
}

/// ClusterGCN: union of `q` distinct uniformly chosen clusters, with every
/// layer running on the induced subgraph.
pub fn cluster_batch(
    graph: &CsrGraph,
    clusters: &PartitionAssignment,
    q: usize,
    layers: usize,
    train: Option<&VertexSet>,
    key: StreamKey,
) -> Result<MicroBatch> {
    cluster_batch_with(graph, &clusters.members(), q, layers, train, key)
}

fn cluster_batch_with(
    graph: &CsrGraph,
    members: &[Vec<VertexId>],
    q: usize,
    layers: usize,
    train: Option<&VertexSet>,
    key: StreamKey,
) -> Result<MicroBatch> {
    let k = members.len();
    if q == 0 || q > k {
        return Err(Error::Argument(format!("q = {q} must lie in [1, {k}]")));
    }
    let picked = key.rng(TAG_CLUSTER, &[]).sample_distinct(k, q);
    let vertices = picked
        .iter()
        .flat_map(|&c| members[c].iter().copied())
        .collect();
    subgraph_batch(graph, vertices, layers, train, key)
}

/// GraphSAINT node sampler: `budget` distinct vertices drawn with
/// probability proportional to degree (Efraimidis-Spirakis keys). Zero-degree
/// vertices are only taken once every positive-degree vertex is in.
pub fn saint_node_sample(
    graph: &CsrGraph,
    budget: usize,
    layers: usize,
    train: Option<&VertexSet>,
    key: StreamKey,
) -> Result<MicroBatch> {
    let n = graph.num_vertices();
    if budget == 0 || budget > n {
        return Err(Error::Argument(format!(
            "budget = {budget} must lie in [1, {n}]"
        )));
    }
    let mut rng = key.rng(TAG_SAINT_NODE, &[]);
    // (has positive weight, key, id); larger sorts first.
    let mut keyed: Vec<(bool, f64, VertexId)> = graph
        .vertices()
        .map(|v| {
            let u = 1.0 - rng.next_f64(); // (0, 1]
            let d = graph.degree(v);
            if d > 0 {
                (true, u.ln() / d as f64, v)
            } else {
                (false, u, v)
            }
        })
        .collect();
    let cmp = |a: &(bool, f64, VertexId), b: &(bool, f64, VertexId)| {
        b.0.cmp(&a.0).then(b.1.total_cmp(&a.1)).then(a.2.cmp(&b.2))
    };
    if budget < n {
        keyed.select_nth_unstable_by(budget - 1, cmp);
        keyed.truncate(budget);
    }
    let vertices = keyed.into_iter().map(|(_, _, v)| v).collect();
    subgraph_batch(graph, vertices, layers, train, key)
}

/// GraphSAINT random-walk sampler: `roots` distinct uniform start vertices,
/// each walking `walk_len` uniform steps (stopping early at a dead end).
pub fn saint_walk_sample(
    graph: &CsrGraph,
    roots: usize,
    walk_len: usize,
    layers: usize,
    train: Option<&VertexSet>,
    key: StreamKey,
) -> Result<MicroBatch> {
    let n = graph.num_vertices();
    if roots == 0 || roots > n {
        return Err(Error::Argument(format!(
            "roots = {roots} must lie in [1, {n}]"
        )));
    }
    let starts = key
        .rng(TAG_SAINT_WALK, &[u64::MAX])
        .sample_distinct(n, roots);
    let mut visited = Vec::with_capacity(roots * (walk_len + 1));
    for (r, &start) in starts.iter().enumerate() {
        let mut rng = key.rng(TAG_SAINT_WALK, &[r as u64]);
        let mut v = start as VertexId;
        visited.push(v);
        for _ in 0..walk_len {
            let nbrs = graph.neighbors(v);
            if nbrs.is_empty() {
                break;
            }
            v = nbrs[rng.below_usize(nbrs.len())];
            visited.push(v);
        }
    }
    subgraph_batch(graph, visited, layers, train, key)
}

/// Which sampler builds each micro-batch.
#[derive(Debug, Clone, PartialEq)]
pub enum SamplerConfig {
    Neighborhood,
    ClusterGcn {
        clusters: PartitionAssignment,
        q: usize,
    },
    SaintNode {
        budget: usize,
    },
    SaintWalk {
        roots: usize,
        walk_len: usize,
    },
}

impl SamplerConfig {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Neighborhood => "neighborhood",
            Self::ClusterGcn { .. } => "cluster_gcn",
            Self::SaintNode { .. } => "saint_node",
            Self::SaintWalk { .. } => "saint_walk",
        }
    }
}

/// Samples one epoch: a micro-batch per (iteration, worker) with a nonempty
/// seed set, ordered by (iteration, worker). Output does not depend on the
/// rayon thread count.
pub fn sample_epoch(
    graph: &CsrGraph,
    plan: &EpochPlan,
    arch: &ModelArch,
    config: &SamplerConfig,
    train: Option<&VertexSet>,
) -> Result<Vec<MicroBatch>> {
    sample_epoch_map(graph, plan, arch, config, train, Ok)
}

/// Like [`sample_epoch`], but reduces each batch with `reduce` as soon as it
/// is built so large epochs need not hold every input frontier at once.
pub fn sample_epoch_map<T, F>(
    graph: &CsrGraph,
    plan: &EpochPlan,
    arch: &ModelArch,
    config: &SamplerConfig,
    train: Option<&VertexSet>,
    reduce: F,
) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(MicroBatch) -> Result<T> + Sync,
{
    let layers = arch.layers();
    match config {
        SamplerConfig::Neighborhood => arch.validate_for_sampling()?,
        _ => arch.validate()?,
    }
    if let SamplerConfig::ClusterGcn { clusters, .. } = config {
        if clusters.num_vertices() != graph.num_vertices() {
            return Err(Error::Argument(
                "cluster assignment does not cover the graph".into(),
            ));
        }
    }
    let members = match config {
        SamplerConfig::ClusterGcn { clusters, .. } => clusters.members(),
        _ => Vec::new(),
    };
    let jobs: Vec<(usize, usize)> = plan
        .seeds
        .iter()
        .enumerate()
        .flat_map(|(i, per_worker)| {
            per_worker
                .iter()
                .enumerate()
                .filter(|(_, s)| !s.is_empty())
                .map(move |(w, _)| (i, w))
        })
        .collect();
    jobs.par_iter()
        .map(|&(i, w)| {
            let key = StreamKey::new(plan.rng_root, plan.epoch, i as u64, w as u64);
            let batch = match config {
                SamplerConfig::Neighborhood => {
                    neighborhood_sample(graph, &plan.seeds[i][w], &arch.fanouts, key)
                }
                SamplerConfig::ClusterGcn { q, .. } => {
                    cluster_batch_with(graph, &members, *q, layers, train, key)
                }
                SamplerConfig::SaintNode { budget } => {
                    saint_node_sample(graph, *budget, layers, train, key)
                }
                SamplerConfig::SaintWalk { roots, walk_len } => {
                    saint_walk_sample(graph, *roots, *walk_len, layers, train, key)
                }
            }?;
            reduce(batch)
        })
        .collect()
}
