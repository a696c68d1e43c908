//! Brute-force reference implementation of the cost model over dense
//! adjacency matrices. It shares no code with the library beyond the input
//! types, so agreement with `analyze` is an independent check.

#![allow(dead_code)]

use std::collections::BTreeSet;

use gnncost_core::cost::CostConfig;
use gnncost_core::graph::CsrGraph;
use gnncost_core::partition::PartitionAssignment;
use gnncost_core::sampler::{Aggregator, EpochPlan, MicroBatch, ModelArch, ModelKind};

/// `adj[v][u]` is true when `u` is in the aggregation neighborhood of `v`.
pub struct Dense {
    pub adj: Vec<Vec<bool>>,
}

impl Dense {
    pub fn from_graph(g: &CsrGraph) -> Self {
        let n = g.num_vertices();
        let mut adj = vec![vec![false; n]; n];
        for (v, u) in g.edges() {
            adj[v as usize][u as usize] = true;
        }
        Self { adj }
    }

    /// Undirected simple graph from arbitrary pairs: loops dropped, both
    /// directions set.
    pub fn undirected(n: usize, pairs: &[(u32, u32)]) -> Self {
        let mut adj = vec![vec![false; n]; n];
        for &(a, b) in pairs {
            if a != b {
                adj[a as usize][b as usize] = true;
                adj[b as usize][a as usize] = true;
            }
        }
        Self { adj }
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn m(&self) -> u64 {
        self.adj.iter().flatten().filter(|&&b| b).count() as u64
    }

    pub fn degree(&self, v: usize) -> u64 {
        self.adj[v].iter().filter(|&&b| b).count() as u64
    }
}

/// `R_w`: vertices outside part `w` adjacent to some vertex inside it.
pub fn remote_sets(g: &Dense, part_of: &[u32], k: usize) -> Vec<BTreeSet<usize>> {
    let n = g.n();
    (0..k)
        .map(|w| {
            let mut r = BTreeSet::new();
            for v in 0..n {
                for u in 0..n {
                    if g.adj[v][u] && part_of[v] as usize == w && part_of[u] as usize != w {
                        r.insert(u);
                    }
                }
            }
            r
        })
        .collect()
}

/// Unordered vertex pairs joined by an edge whose endpoints differ in part.
pub fn edge_cut(g: &Dense, part_of: &[u32]) -> u64 {
    let n = g.n();
    let mut cut = 0;
    for a in 0..n {
        for b in a + 1..n {
            if (g.adj[a][b] || g.adj[b][a]) && part_of[a] != part_of[b] {
                cut += 1;
            }
        }
    }
    cut
}

/// Per-layer `(c_e, c_v)` written out from the FLOP convention.
pub fn layer_costs(arch: &ModelArch) -> Vec<(u64, u64)> {
    let h = arch.heads;
    arch.dims
        .windows(2)
        .map(|w| {
            let (i, o) = (w[0], w[1]);
            match arch.kind {
                ModelKind::Gcn => (2 * i, 2 * i * o),
                ModelKind::Gat => (4 * h * o + 5 * h, 2 * i * h * o),
                ModelKind::Graphsage => match arch.aggregator {
                    Aggregator::Mean => (2 * i, 4 * i * o),
                    Aggregator::Gcn => (2 * i, 2 * i * o),
                    Aggregator::Pool => (2 * i + 2 * i * i, 4 * i * o),
                },
            }
        })
        .collect()
}

/// Layer counts and input frontier of one batch under full-neighborhood
/// expansion (every fanout at least the maximum degree).
pub struct FullBatch {
    pub worker: usize,
    pub layer_vertices: Vec<u64>,
    pub layer_edges: Vec<u64>,
    pub input: BTreeSet<usize>,
}

pub fn full_expansion(g: &Dense, seeds: &[u32], layers: usize, worker: usize) -> FullBatch {
    let mut frontier: BTreeSet<usize> = seeds.iter().map(|&s| s as usize).collect();
    let mut layer_vertices = vec![0; layers + 1];
    let mut layer_edges = vec![0; layers];
    layer_vertices[layers] = frontier.len() as u64;
    for l in (1..=layers).rev() {
        let mut next = frontier.clone();
        let mut edges = 0;
        for &v in &frontier {
            for u in 0..g.n() {
                if g.adj[v][u] {
                    next.insert(u);
                    edges += 1;
                }
            }
        }
        layer_edges[l - 1] = edges;
        layer_vertices[l - 1] = next.len() as u64;
        frontier = next;
    }
    FullBatch {
        worker,
        layer_vertices,
        layer_edges,
        input: frontier,
    }
}

impl FullBatch {
    pub fn from_sampled(b: &MicroBatch) -> Self {
        Self {
            worker: b.worker as usize,
            layer_vertices: b.layer_vertices.clone(),
            layer_edges: b.layer_edges.clone(),
            input: b.input_frontier.ids().iter().map(|&v| v as usize).collect(),
        }
    }
}

/// Every batch of a plan under full-neighborhood expansion.
pub fn full_epoch(g: &Dense, plan: &EpochPlan, layers: usize) -> Vec<FullBatch> {
    let mut out = Vec::new();
    for row in &plan.seeds {
        for (w, seeds) in row.iter().enumerate() {
            if !seeds.is_empty() {
                out.push(full_expansion(g, seeds.ids(), layers, w));
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleCosts {
    pub gamma_fg: u64,
    pub gamma_mb: u64,
    pub theta_fg: u64,
    pub theta_mb: u64,
}

/// The four headline costs, with integer volumes and forward FLOP totals.
pub fn costs(
    g: &Dense,
    assignment: &PartitionAssignment,
    arch: &ModelArch,
    cfg: &CostConfig,
    batches: &[FullBatch],
) -> OracleCosts {
    let part_of = assignment.parts();
    let remote = remote_sets(g, part_of, assignment.k());
    let halo: u64 = remote.iter().map(|r| r.len() as u64).sum();
    let mut gamma_fg = 0;
    for &dim in &cfg.comm_dims {
        gamma_fg += halo * dim * cfg.bytes_per_scalar;
    }
    gamma_fg *= cfg.epochs_fg;

    let mut gamma_mb = 0;
    for b in batches {
        let outside = b
            .input
            .iter()
            .filter(|&&v| part_of[v] as usize != b.worker)
            .count() as u64;
        gamma_mb += outside * arch.dims[0] * cfg.bytes_per_scalar;
    }
    gamma_mb *= cfg.epochs_mb;

    let fl = layer_costs(arch);
    let (n, m) = (g.n() as u64, g.m());
    let mut theta_fg = 0;
    for &(ce, cv) in &fl {
        theta_fg += m * ce + n * cv;
    }
    theta_fg *= cfg.epochs_fg;

    let mut theta_mb = 0;
    for b in batches {
        for (l, &(ce, cv)) in fl.iter().enumerate() {
            theta_mb += b.layer_edges[l] * ce + b.layer_vertices[l + 1] * cv;
        }
    }
    theta_mb *= cfg.epochs_mb;

    OracleCosts {
        gamma_fg,
        gamma_mb,
        theta_fg,
        theta_mb,
    }
}
