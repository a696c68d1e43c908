//! k-way vertex partitions and the boundary sets they induce.
//!
//! The built-in partitioner is a streaming Linear Deterministic Greedy pass
//! over a BFS order. Partitions produced by Metis (or anything emitting the
//! same one-part-id-per-line format) can be imported instead.

use std::collections::VecDeque;
use std::io::BufRead;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{CsrGraph, VertexId};
use crate::rng::CounterRng;

pub const DEFAULT_SLACK: f64 = 0.05;

pub type PartId = u32;

#[derive(Debug, Clone, PartialEq)]
pub struct PartitionAssignment {
    part_of: Vec<PartId>,
    k: usize,
    slack: f64,
}

/// Largest part size allowed by `slack`: `ceil((1 + slack) * n / k)`.
pub fn part_capacity(n: usize, k: usize, slack: f64) -> usize {
    if slack.is_infinite() {
        return n;
    }
    let exact = n.div_ceil(k);
    if slack == 0.0 {
        exact
    } else {
        (((1.0 + slack) * n as f64) / k as f64)
            .ceil()
            .max(exact as f64) as usize
    }
}

impl PartitionAssignment {
    /// Validates part ids and the balance bound. `slack = f64::INFINITY`
    /// disables the balance check.
    pub fn new(part_of: Vec<PartId>, k: usize, slack: f64) -> Result<Self> {
        if k == 0 {
            return Err(Error::Argument("part count k must be >= 1".into()));
        }
        if slack.is_nan() || slack < 0.0 {
            return Err(Error::Argument(format!("slack must be >= 0, got {slack}")));
        }
        if let Some((v, &p)) = part_of.iter().enumerate().find(|(_, &p)| p as usize >= k) {
            return Err(Error::Range(format!("vertex {v} has part {p}, k = {k}")));
        }
        let a = Self { part_of, k, slack };
        let cap = part_capacity(a.num_vertices(), k, slack);
        if let Some((w, &size)) = a.part_sizes().iter().enumerate().find(|(_, &s)| s > cap) {
            return Err(Error::Validation(format!(
                "part {w} holds {size} vertices, balance cap is {cap}"
            )));
        }
        Ok(a)
    }

    pub fn single(n: usize) -> Self {
        Self {
            part_of: vec![0; n],
            k: 1,
            slack: DEFAULT_SLACK,
        }
    }

    #[inline]
    pub fn part(&self, v: VertexId) -> PartId {
        self.part_of[v as usize]
    }

    pub fn parts(&self) -> &[PartId] {
        &self.part_of
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn slack(&self) -> f64 {
        self.slack
    }

    pub fn num_vertices(&self) -> usize {
        self.part_of.len()
    }

    pub fn part_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0usize; self.k];
        for &p in &self.part_of {
            sizes[p as usize] += 1;
        }
        sizes
    }

    /// Sorted member list of every part.
    pub fn members(&self) -> Vec<Vec<VertexId>> {
        let mut out = vec![Vec::new(); self.k];
        for (v, &p) in self.part_of.iter().enumerate() {
            out[p as usize].push(v as VertexId);
        }
        out
    }

    /// Metis-style text: line `i` holds the part of vertex `i`.
    pub fn to_metis_text(&self) -> String {
        let mut s = String::with_capacity(self.part_of.len() * 3);
        for p in &self.part_of {
            s.push_str(&p.to_string());
            s.push('\n');
        }
        s
    }
}

fn check_k(graph: &CsrGraph, k: usize, slack: f64) -> Result<()> {
    if k == 0 {
        return Err(Error::Argument("part count k must be >= 1".into()));
    }
    if k > graph.num_vertices() {
        return Err(Error::Argument(format!(
            "k = {k} exceeds the vertex count {}",
            graph.num_vertices()
        )));
    }
    if slack.is_nan() || slack < 0.0 {
        return Err(Error::Argument(format!("slack must be >= 0, got {slack}")));
    }
    Ok(())
}

/// Streaming Linear Deterministic Greedy partitioning.
///
/// Vertices are visited in BFS order starting at the highest-degree vertex
/// (restarting from the highest-degree unvisited vertex for each further
/// component). Vertex `v` goes to the non-full part maximizing
/// `|N(v) ∩ P_w| * (1 - |P_w| / cap)`, lowest part id on ties.
///
/// `seed` is accepted for interface symmetry with the random baseline; the
/// streaming pass itself draws no random numbers.
pub fn partition_streaming(
    graph: &CsrGraph,
    k: usize,
    slack: f64,
    _seed: u64,
) -> Result<PartitionAssignment> {
    check_k(graph, k, slack)?;
    let n = graph.num_vertices();
    if k == 1 {
        return PartitionAssignment::new(vec![0; n], 1, slack);
    }
    let cap = part_capacity(n, k, slack);
    const UNASSIGNED: PartId = PartId::MAX;
    let mut part_of = vec![UNASSIGNED; n];
    let mut sizes = vec![0usize; k];
    let mut neighbor_counts = vec![0usize; k];
    let mut touched: Vec<usize> = Vec::new();

    let mut by_degree: Vec<VertexId> = graph.vertices().collect();
    by_degree.sort_by(|&a, &b| graph.degree(b).cmp(&graph.degree(a)).then(a.cmp(&b)));
    let mut next_root = 0usize;
    let mut queued = vec![false; n];
    let mut queue = VecDeque::new();

    loop {
        let v = match queue.pop_front() {
            Some(v) => v,
            None => {
                while next_root < n && queued[by_degree[next_root] as usize] {
                    next_root += 1;
                }
                if next_root == n {
                    break;
                }
                let r = by_degree[next_root];
                queued[r as usize] = true;
                r
            }
        };
        for &u in graph.neighbors(v) {
            if !queued[u as usize] {
                queued[u as usize] = true;
                queue.push_back(u);
            }
            let p = part_of[u as usize];
            if p != UNASSIGNED {
                if neighbor_counts[p as usize] == 0 {
                    touched.push(p as usize);
                }
                neighbor_counts[p as usize] += 1;
            }
        }
        let mut best: Option<(usize, f64)> = None;
        for w in 0..k {
            if sizes[w] >= cap {
                continue;
            }
            let score = neighbor_counts[w] as f64 * (1.0 - sizes[w] as f64 / cap as f64);
            if best.is_none_or(|(_, s)| score > s) {
                best = Some((w, score));
            }
        }
        let (w, _) = best.expect("capacity * k >= n leaves a non-full part");
        part_of[v as usize] = w as PartId;
        sizes[w] += 1;
        for &p in &touched {
            neighbor_counts[p] = 0;
        }
        touched.clear();
    }
    PartitionAssignment::new(part_of, k, slack)
}

/// Uniform random balanced assignment: shuffle, then deal round-robin.
pub fn random_partition_baseline(
    graph: &CsrGraph,
    k: usize,
    seed: u64,
) -> Result<PartitionAssignment> {
    check_k(graph, k, 0.0)?;
    let n = graph.num_vertices();
    let mut order: Vec<VertexId> = graph.vertices().collect();
    CounterRng::from_parts(&[seed, 0x005E_ED0F_4A4D]).shuffle(&mut order);
    let mut part_of = vec![0; n];
    for (i, &v) in order.iter().enumerate() {
        part_of[v as usize] = (i % k) as PartId;
    }
    PartitionAssignment::new(part_of, k, 0.0)
}

/// Reads a Metis-style partition file. Sizes are trusted (slack = ∞); ids
/// and the line count are validated.
pub fn import_partition<R: BufRead>(reader: R, n: usize, k: usize) -> Result<PartitionAssignment> {
    if k == 0 {
        return Err(Error::Argument("part count k must be >= 1".into()));
    }
    let mut part_of = Vec::with_capacity(n);
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let body = line.trim();
        if body.is_empty() {
            continue;
        }
        let p: u64 = body.parse().map_err(|_| Error::Parse {
            line: idx + 1,
            message: format!("{body:?} is not a part id"),
        })?;
        if p >= k as u64 {
            return Err(Error::Range(format!(
                "line {}: part {p} not in [0, {k})",
                idx + 1
            )));
        }
        part_of.push(p as PartId);
    }
    if part_of.len() != n {
        return Err(Error::Validation(format!(
            "partition file has {} entries, graph has {n} vertices",
            part_of.len()
        )));
    }
    PartitionAssignment::new(part_of, k, f64::INFINITY)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryProfile {
    /// `|R_w|`: vertices outside part `w` with at least one edge into `w`.
    pub remote_in_count: Vec<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub remote_in_sets: Option<Vec<Vec<VertexId>>>,
    /// Unordered vertex pairs joined by at least one edge and split across parts.
    pub edge_cut: u64,
    pub halo_total: u64,
}

/// Computes the remote sets `R_w`; each remote vertex counts once per
/// destination part however many local neighbors it has.
pub fn boundary_profile(
    graph: &CsrGraph,
    assignment: &PartitionAssignment,
    keep_sets: bool,
) -> Result<BoundaryProfile> {
    if assignment.num_vertices() != graph.num_vertices() {
        return Err(Error::Argument(format!(
            "assignment covers {} vertices, graph has {}",
            assignment.num_vertices(),
            graph.num_vertices()
        )));
    }
    let k = assignment.k();
    let mut remote_in_count = vec![0u64; k];
    let mut sets = keep_sets.then(|| vec![Vec::new(); k]);
    let mut edge_cut = 0u64;
    // last_marker[w] == u + 1 once u has been recorded in R_w.
    let mut last_marker = vec![0usize; k];
    for u in graph.vertices() {
        let pu = assignment.part(u);
        for &v in graph.neighbors(u) {
            let pv = assignment.part(v);
            if pv == pu {
                continue;
            }
            if u < v || !graph.has_edge(v, u) {
                edge_cut += 1;
            }
            let w = pv as usize;
            if last_marker[w] != u as usize + 1 {
                last_marker[w] = u as usize + 1;
                remote_in_count[w] += 1;
                if let Some(s) = sets.as_mut() {
                    s[w].push(u);
                }
            }
        }
    }
    let halo_total = remote_in_count.iter().sum();
    Ok(BoundaryProfile {
        remote_in_count,
        remote_in_sets: sets,
        edge_cut,
        halo_total,
    })
}
