//! Seeded random instances for the oracle comparison: graphs with n <= 64,
//! k in {2, 3, 4}, L in {1, 2, 3} and randomly drawn models and knobs.

#![allow(dead_code)]

use gnncost_core::cost::{analyze, AnalysisInput, CostConfig, OptimizationKnobs};
use gnncost_core::graph::{CsrGraph, SetRole, VertexSet};
use gnncost_core::partition::PartitionAssignment;
use gnncost_core::rng::CounterRng;
use gnncost_core::sampler::{
    plan_epoch, sample_epoch, Aggregator, EpochPlan, ModelArch, ModelKind, SamplerConfig,
};

use super::oracle::{costs, full_epoch, Dense, FullBatch, OracleCosts};

pub struct Case {
    pub graph: CsrGraph,
    pub dense: Dense,
    pub assignment: PartitionAssignment,
    pub arch: ModelArch,
    pub cost: CostConfig,
    pub train: VertexSet,
    pub plan: EpochPlan,
    /// Fanouts cover every neighborhood, so the oracle can expand frontiers itself.
    pub full_fanout: bool,
}

pub fn random_case(seed: u64) -> Case {
    let mut rng = CounterRng::from_parts(&[0x0AC1E, seed]);
    let n = 4 + rng.below_usize(61);
    let p = 0.02 + 0.3 * rng.next_f64();
    let mut pairs = Vec::new();
    for a in 0..n as u32 {
        for b in a + 1..n as u32 {
            if rng.next_f64() < p {
                pairs.push((a, b));
            }
        }
    }
    let graph = CsrGraph::from_edges(n, &pairs, true).unwrap();
    let dense = Dense::undirected(n, &pairs);

    let k = 2 + rng.below_usize(3);
    let part_of = (0..n).map(|_| rng.below(k as u64) as u32).collect();
    let assignment = PartitionAssignment::new(part_of, k, f64::INFINITY).unwrap();

    let layers = 1 + rng.below_usize(3);
    let dims: Vec<u64> = (0..=layers).map(|_| 1 + rng.below(16)).collect();
    let (kind, aggregator, heads) = match rng.below(5) {
        0 => (ModelKind::Gcn, Aggregator::Mean, 1),
        1 => (ModelKind::Gat, Aggregator::Mean, 1 + rng.below(4)),
        2 => (ModelKind::Graphsage, Aggregator::Mean, 1),
        3 => (ModelKind::Graphsage, Aggregator::Gcn, 1),
        _ => (ModelKind::Graphsage, Aggregator::Pool, 1),
    };
    let full_fanout = rng.below(2) == 0;
    let fanouts = (0..layers)
        .map(|_| if full_fanout { n } else { rng.below_usize(5) })
        .collect();
    let arch = ModelArch {
        kind,
        dims: dims.clone(),
        heads,
        aggregator,
        fanouts,
        eta: 3.0 * rng.next_f64(),
    };
    let cost = CostConfig {
        epochs_fg: 1 + rng.below(5),
        epochs_mb: 1 + rng.below(5),
        bytes_per_scalar: [1, 2, 4, 8][rng.below_usize(4)],
        comm_dims: (0..layers).map(|_| 1 + rng.below(16)).collect(),
        knobs: OptimizationKnobs::default(),
    };

    let train_ids: Vec<u32> = (0..n as u32).filter(|_| rng.below(3) > 0).collect();
    let train = if train_ids.is_empty() {
        VertexSet::all(n, SetRole::Train)
    } else {
        VertexSet::new(train_ids, SetRole::Train, n).unwrap()
    };
    let batch = k + rng.below_usize(n);
    let plan = plan_epoch(&train, batch, k, seed).unwrap();
    Case {
        graph,
        dense,
        assignment,
        arch,
        cost,
        train,
        plan,
        full_fanout,
    }
}

/// Compares `analyze` with the brute-force oracle; returns a description of
/// the first disagreement.
pub fn check_case(case: &Case) -> Result<(), String> {
    let report = analyze(&AnalysisInput {
        dataset: "oracle",
        graph: &case.graph,
        train: &case.train,
        assignment: &case.assignment,
        partition_method: "import",
        partition_seed: 0,
        arch: &case.arch,
        plan: &case.plan,
        sampler: &SamplerConfig::Neighborhood,
        cost: &case.cost,
    })
    .map_err(|e| format!("analyze failed: {e}"))?;

    let batches: Vec<FullBatch> = if case.full_fanout {
        full_epoch(&case.dense, &case.plan, case.arch.layers())
    } else {
        sample_epoch(
            &case.graph,
            &case.plan,
            &case.arch,
            &SamplerConfig::Neighborhood,
            Some(&case.train),
        )
        .map_err(|e| format!("sampling failed: {e}"))?
        .iter()
        .map(FullBatch::from_sampled)
        .collect()
    };
    let want = costs(
        &case.dense,
        &case.assignment,
        &case.arch,
        &case.cost,
        &batches,
    );
    let got = OracleCosts {
        gamma_fg: report.gamma_fg_volume,
        gamma_mb: report.gamma_mb,
        theta_fg: report.theta_fg_forward,
        theta_mb: report.theta_mb_forward,
    };
    if got != want {
        return Err(format!("library {got:?} != oracle {want:?}"));
    }
    if report.gamma_fg != want.gamma_fg as f64 {
        return Err(format!(
            "gamma_fg {} != volume {} with default knobs",
            report.gamma_fg, want.gamma_fg
        ));
    }
    Ok(())
}
