//! Prints FG/MB cost ratios over partition counts for synthetic stand-ins of
//! a small and a medium citation graph.
//!
//! cargo run --release -p gnncost-core --example synthetic_trends

use gnncost_core::cost::{analyze, AnalysisInput, CostConfig};
use gnncost_core::graph::{generate_synthetic, SetRole, SyntheticKind, VertexSet};
use gnncost_core::partition::{partition_streaming, DEFAULT_SLACK};
use gnncost_core::rng::CounterRng;
use gnncost_core::sampler::{plan_epoch, ModelArch, ModelKind, SamplerConfig};

struct Case {
    name: &'static str,
    n: usize,
    avg_degree: f64,
    train_fraction: f64,
    arch: ModelArch,
}

fn main() -> gnncost_core::Result<()> {
    let cases = [
        Case {
            name: "pubmed-like",
            n: 19_717,
            avg_degree: 4.5,
            train_fraction: 0.91,
            arch: ModelArch::uniform(ModelKind::Graphsage, 500, 256, 3, 3, 10),
        },
        Case {
            name: "arxiv-like",
            n: 169_343,
            avg_degree: 13.7,
            train_fraction: 0.54,
            arch: ModelArch::uniform(ModelKind::Graphsage, 128, 512, 40, 2, 20),
        },
    ];
    println!("dataset,k,edge_cut,gamma_ratio,theta_ratio,sampling_fraction");
    for case in &cases {
        let graph = generate_synthetic(SyntheticKind::PowerLaw, case.n, case.avg_degree, 1)?;
        let mut ids: Vec<u32> = graph.vertices().collect();
        CounterRng::new(7).shuffle(&mut ids);
        ids.truncate((case.train_fraction * case.n as f64) as usize);
        let train = VertexSet::from_unsorted(ids, SetRole::Train, case.n)?;
        let cost = CostConfig::for_arch(&case.arch);
        for k in [2usize, 4, 8, 16] {
            let parts = partition_streaming(&graph, k, DEFAULT_SLACK, 0)?;
            let plan = plan_epoch(&train, 1024, k, 0)?;
            let report = analyze(&AnalysisInput {
                dataset: case.name,
                graph: &graph,
                train: &train,
                assignment: &parts,
                partition_method: "streaming",
                partition_seed: 0,
                arch: &case.arch,
                plan: &plan,
                sampler: &SamplerConfig::Neighborhood,
                cost: &cost,
            })?;
            let fmt = |x: Option<f64>| x.map_or("undefined".to_string(), |v| format!("{v:.4e}"));
            println!(
                "{},{k},{},{},{},{}",
                case.name,
                report.provenance.partition.edge_cut,
                fmt(report.gamma_ratio),
                fmt(report.theta_ratio),
                fmt(report.sampling_fraction)
            );
        }
    }
    Ok(())
}
