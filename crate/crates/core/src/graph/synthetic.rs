use serde::{Deserialize, Serialize};

use super::{CsrGraph, VertexId};
use crate::error::{Error, Result};
use crate::rng::CounterRng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SyntheticKind {
    /// G(n, p) with `p = avg_degree / (n - 1)`.
    ErdosRenyi,
    /// Preferential attachment (Barabasi-Albert) with a fractional
    /// per-vertex attachment count of `avg_degree / 2`.
    PowerLaw,
}

/// Generates a symmetrized synthetic graph whose directed edge count is close
/// to `n * avg_degree`. Output is a pure function of the arguments.
pub fn generate_synthetic(
    kind: SyntheticKind,
    n: usize,
    avg_degree: f64,
    seed: u64,
) -> Result<CsrGraph> {
    if n == 0 {
        return Err(Error::Argument("synthetic graphs need n > 0".into()));
    }
    if !avg_degree.is_finite() || avg_degree < 0.0 {
        return Err(Error::Argument(format!(
            "avg_degree must be >= 0, got {avg_degree}"
        )));
    }
    if n > VertexId::MAX as usize {
        return Err(Error::Range(format!(
            "{n} vertices exceed the u32 id space"
        )));
    }
    if avg_degree > (n - 1) as f64 {
        return Err(Error::Argument(format!(
            "avg_degree {avg_degree} implies more edges than a simple graph on {n} vertices holds"
        )));
    }
    let edges = match kind {
        SyntheticKind::ErdosRenyi => erdos_renyi(n, avg_degree, seed),
        SyntheticKind::PowerLaw => preferential_attachment(n, avg_degree, seed),
    };
    CsrGraph::from_edges(n, &edges, true)
}

/// Batagelj-Brandes geometric skipping over the pairs `v < u`.
fn erdos_renyi(n: usize, avg_degree: f64, seed: u64) -> Vec<(VertexId, VertexId)> {
    let mut edges = Vec::new();
    if n < 2 || avg_degree == 0.0 {
        return edges;
    }
    let p = avg_degree / (n - 1) as f64;
    let mut rng = CounterRng::from_parts(&[seed, 0xE2D0]);
    if p >= 1.0 {
        for u in 1..n {
            for v in 0..u {
                edges.push((u as VertexId, v as VertexId));
            }
        }
        return edges;
    }
    let log_q = (1.0 - p).ln();
    let (mut u, mut v): (i64, i64) = (1, -1);
    let n = n as i64;
    while u < n {
        let r = 1.0 - rng.next_f64(); // (0, 1]
        v += 1 + (r.ln() / log_q).floor() as i64;
        while v >= u && u < n {
            v -= u;
            u += 1;
        }
        if u < n {
            edges.push((u as VertexId, v as VertexId));
        }
    }
    edges
}

fn preferential_attachment(n: usize, avg_degree: f64, seed: u64) -> Vec<(VertexId, VertexId)> {
    let half = avg_degree / 2.0;
    let base = half.floor() as usize;
    let frac = half - base as f64;
    let mut rng = CounterRng::from_parts(&[seed, 0xBA]);
    let mut edges: Vec<(VertexId, VertexId)> = Vec::with_capacity((n as f64 * half) as usize + 1);
    // Each edge contributes both endpoints, so a uniform pick from this list
    // is a degree-proportional pick of a vertex.
    let mut endpoints: Vec<VertexId> = Vec::with_capacity(2 * edges.capacity());
    let mut chosen: Vec<VertexId> = Vec::new();
    for t in 1..n {
        let want = base + usize::from(rng.next_f64() < frac);
        let want = want.min(t);
        chosen.clear();
        if want == t {
            chosen.extend(0..t as VertexId);
        } else {
            let mut attempts = 0;
            while chosen.len() < want {
                attempts += 1;
                let cand = if endpoints.is_empty() || attempts > 32 * want {
                    rng.below_usize(t) as VertexId
                } else {
                    endpoints[rng.below_usize(endpoints.len())]
                };
                if !chosen.contains(&cand) {
                    chosen.push(cand);
                }
            }
        }
        for &s in &chosen {
            edges.push((t as VertexId, s));
            endpoints.push(t as VertexId);
            endpoints.push(s);
        }
    }
    edges
}
