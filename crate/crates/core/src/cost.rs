//! Communication and computation cost of full-graph versus mini-batch training.
//!
//! Full-graph communication charges one feature vector per remote vertex,
//! per destination part, per layer, per epoch:
//! `n_f * sum_l sum_w |R_w| * |h^l|`. Mini-batch communication charges the
//! raw input features of every bottom-layer vertex a worker does not own:
//! `n_m * sum_i sum_w |M_iw \ P_w| * d_0`. Computation charges `c_e` FLOPs
//! per edge and `c_v` per vertex at every layer, times `(1 + eta)` for the
//! backward pass.
//!
//! Volumes and forward FLOP totals are accumulated as integers so results do
//! not depend on summation order. Quantities that involve fractional knobs
//! or `eta` are reported as `f64`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::CsrGraph;
use crate::graph::VertexSet;
use crate::partition::{boundary_profile, BoundaryProfile, PartitionAssignment};
use crate::sampler::{
    sample_epoch_map, Aggregator, EpochPlan, MicroBatch, ModelArch, ModelKind, SamplerConfig,
};

/// FLOPs charged per attention head for LeakyReLU, exp and scaling.
const GAT_ELEMENTWISE_PER_HEAD: u64 = 5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizationKnobs {
    /// Fraction of boundary vertices communicated per epoch, in `(0, 1]`.
    #[serde(default = "one")]
    pub boundary_sampling_rate: f64,
    /// Message width in bits: 4, 8, 16 or 32.
    #[serde(default = "thirty_two")]
    pub quantization_bits: u32,
    /// Fraction of full-graph communication hidden behind computation.
    /// Reported only; never reduces volume.
    #[serde(default)]
    pub overlap_fraction: f64,
}

fn one() -> f64 {
    1.0
}

fn thirty_two() -> u32 {
    32
}

impl Default for OptimizationKnobs {
    fn default() -> Self {
        Self {
            boundary_sampling_rate: 1.0,
            quantization_bits: 32,
            overlap_fraction: 0.0,
        }
    }
}

impl OptimizationKnobs {
    pub fn validate(&self) -> Result<()> {
        let p = self.boundary_sampling_rate;
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::Argument(format!(
                "boundary_sampling_rate must be in (0, 1], got {p}"
            )));
        }
        if ![4, 8, 16, 32].contains(&self.quantization_bits) {
            return Err(Error::Argument(format!(
                "quantization_bits must be one of 4, 8, 16, 32, got {}",
                self.quantization_bits
            )));
        }
        let w = self.overlap_fraction;
        if !(0.0..=1.0).contains(&w) {
            return Err(Error::Argument(format!(
                "overlap_fraction must be in [0, 1], got {w}"
            )));
        }
        Ok(())
    }

    /// Multiplier applied to full-graph communication volume.
    pub fn volume_scale(&self) -> f64 {
        self.boundary_sampling_rate * (self.quantization_bits as f64 / 32.0)
    }
}

/// Which width `|h_v^l|` the full-graph formula charges at layer `l`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CommDimsMode {
    /// `d_{l-1}`: the features layer `l` consumes.
    #[default]
    Input,
    /// `d_l`: the features layer `l` produces.
    Output,
}

impl CommDimsMode {
    pub fn dims_for(self, arch: &ModelArch) -> Vec<u64> {
        let l = arch.layers();
        match self {
            Self::Input => arch.dims[..l].to_vec(),
            Self::Output => arch.dims[1..=l].to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostConfig {
    pub epochs_fg: u64,
    pub epochs_mb: u64,
    pub bytes_per_scalar: u64,
    /// Per-layer communicated width, length `L`.
    pub comm_dims: Vec<u64>,
    pub knobs: OptimizationKnobs,
}

impl CostConfig {
    /// One epoch each, 4-byte scalars, input-width communication, no knobs.
    pub fn for_arch(arch: &ModelArch) -> Self {
        Self::with_mode(arch, CommDimsMode::Input)
    }

    pub fn with_mode(arch: &ModelArch, mode: CommDimsMode) -> Self {
        Self {
            epochs_fg: 1,
            epochs_mb: 1,
            bytes_per_scalar: 4,
            comm_dims: mode.dims_for(arch),
            knobs: OptimizationKnobs::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.epochs_fg == 0 || self.epochs_mb == 0 {
            return Err(Error::Argument("epoch counts must be >= 1".into()));
        }
        if ![1, 2, 4, 8].contains(&self.bytes_per_scalar) {
            return Err(Error::Argument(format!(
                "bytes_per_scalar must be 1, 2, 4 or 8, got {}",
                self.bytes_per_scalar
            )));
        }
        self.knobs.validate()
    }

    fn check_layers(&self, layers: usize) -> Result<()> {
        if self.comm_dims.len() != layers {
            return Err(Error::Argument(format!(
                "comm_dims has {} entries, model has {layers} layers",
                self.comm_dims.len()
            )));
        }
        Ok(())
    }
}

fn mul(a: u64, b: u64, what: &'static str) -> Result<u64> {
    a.checked_mul(b).ok_or(Error::Overflow(what))
}

fn add(a: u64, b: u64, what: &'static str) -> Result<u64> {
    a.checked_add(b).ok_or(Error::Overflow(what))
}

fn layer_widths(arch: &ModelArch, layer: usize) -> Result<(u64, u64)> {
    if layer == 0 || layer > arch.layers() {
        return Err(Error::Argument(format!(
            "layer {layer} not in [1, {}]",
            arch.layers()
        )));
    }
    Ok((arch.dims[layer - 1], arch.dims[layer]))
}

fn check_aggregator(arch: &ModelArch) -> Result<()> {
    if arch.kind != ModelKind::Graphsage && arch.aggregator == Aggregator::Pool {
        return Err(Error::Argument(format!(
            "aggregator pool is not supported for {:?}",
            arch.kind
        )));
    }
    Ok(())
}

/// `c_e`: FLOPs to build and aggregate the message over one edge into layer
/// `layer` (one fused multiply-add counts as 2 FLOPs).
pub fn flops_edge(arch: &ModelArch, layer: usize) -> Result<u64> {
    check_aggregator(arch)?;
    let (d_in, d_out) = layer_widths(arch, layer)?;
    let c = match (arch.kind, arch.aggregator) {
        (ModelKind::Graphsage, Aggregator::Pool) => 2 * d_in + 2 * d_in * d_in,
        (ModelKind::Graphsage | ModelKind::Gcn, _) => 2 * d_in,
        (ModelKind::Gat, _) => 4 * arch.heads * d_out + GAT_ELEMENTWISE_PER_HEAD * arch.heads,
    };
    Ok(c)
}

/// `c_v`: FLOPs to compute one vertex's new representation at `layer`.
pub fn flops_vertex(arch: &ModelArch, layer: usize) -> Result<u64> {
    check_aggregator(arch)?;
    let (d_in, d_out) = layer_widths(arch, layer)?;
    let c = match (arch.kind, arch.aggregator) {
        // Separate self and neighbor weight matrices.
        (ModelKind::Graphsage, Aggregator::Mean | Aggregator::Pool) => 2 * 2 * d_in * d_out,
        (ModelKind::Graphsage, Aggregator::Gcn) | (ModelKind::Gcn, _) => 2 * d_in * d_out,
        // Shared projection to all heads.
        (ModelKind::Gat, _) => 2 * d_in * (arch.heads * d_out),
    };
    Ok(c)
}

fn layer_flops(arch: &ModelArch) -> Result<Vec<(u64, u64)>> {
    (1..=arch.layers())
        .map(|l| Ok((flops_edge(arch, l)?, flops_vertex(arch, l)?)))
        .collect()
}

/// Full-graph communication volume in bytes before any knob is applied.
pub fn comm_volume_fg(profile: &BoundaryProfile, config: &CostConfig) -> Result<u64> {
    let halo = profile.halo_total;
    let mut per_epoch = 0u64;
    for &dim in &config.comm_dims {
        per_epoch = add(per_epoch, mul(halo, dim, "gamma_fg")?, "gamma_fg")?;
    }
    mul(
        mul(per_epoch, config.bytes_per_scalar, "gamma_fg")?,
        config.epochs_fg,
        "gamma_fg",
    )
}

/// `Γ_fg` in bytes, scaled by boundary sampling and quantization knobs.
pub fn comm_cost_fg(profile: &BoundaryProfile, config: &CostConfig) -> Result<f64> {
    config.knobs.validate()?;
    Ok(comm_volume_fg(profile, config)? as f64 * config.knobs.volume_scale())
}

/// Count-level view of a micro-batch: everything the cost formulas need.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BatchSummary {
    pub worker: u32,
    pub iteration: u32,
    pub layer_vertices: Vec<u64>,
    pub layer_edges: Vec<u64>,
    /// `|input_frontier \ P_worker|`.
    pub remote_inputs: u64,
}

impl BatchSummary {
    pub fn new(batch: &MicroBatch, assignment: &PartitionAssignment) -> Result<Self> {
        if batch.worker as usize >= assignment.k() {
            return Err(Error::Argument(format!(
                "batch worker {} has no partition (k = {})",
                batch.worker,
                assignment.k()
            )));
        }
        let n = assignment.num_vertices();
        let mut remote = 0u64;
        for &v in batch.input_frontier.ids() {
            if v as usize >= n {
                return Err(Error::Range(format!(
                    "frontier vertex {v} outside the partitioned graph"
                )));
            }
            if assignment.part(v) != batch.worker {
                remote += 1;
            }
        }
        Ok(Self {
            worker: batch.worker,
            iteration: batch.iteration,
            layer_vertices: batch.layer_vertices.clone(),
            layer_edges: batch.layer_edges.clone(),
            remote_inputs: remote,
        })
    }

    fn check_layers(&self, layers: usize) -> Result<()> {
        if self.layer_edges.len() != layers || self.layer_vertices.len() != layers + 1 {
            return Err(Error::Argument(format!(
                "micro-batch has {} edge layers / {} vertex layers, model has {layers} layers",
                self.layer_edges.len(),
                self.layer_vertices.len()
            )));
        }
        Ok(())
    }

    /// Forward FLOPs of this batch for one epoch. Layer `l` computes new
    /// representations for the `layer_vertices[l]` vertices it outputs.
    fn forward_flops(&self, flops: &[(u64, u64)]) -> Result<u64> {
        let mut total = 0u64;
        for (l, &(ce, cv)) in flops.iter().enumerate() {
            let term = add(
                mul(self.layer_edges[l], ce, "theta_mb")?,
                mul(self.layer_vertices[l + 1], cv, "theta_mb")?,
                "theta_mb",
            )?;
            total = add(total, term, "theta_mb")?;
        }
        Ok(total)
    }

    fn sampling_work(&self) -> u64 {
        self.layer_vertices.iter().sum::<u64>() + self.layer_edges.iter().sum::<u64>()
    }
}

fn summarize(
    batches: &[MicroBatch],
    assignment: &PartitionAssignment,
) -> Result<Vec<BatchSummary>> {
    batches
        .iter()
        .map(|b| BatchSummary::new(b, assignment))
        .collect()
}

fn remote_input_total(summaries: &[BatchSummary]) -> Result<u64> {
    summaries
        .iter()
        .try_fold(0u64, |acc, s| add(acc, s.remote_inputs, "gamma_mb"))
}

fn gamma_mb_from(remote_total: u64, d0: u64, config: &CostConfig) -> Result<u64> {
    let bytes = mul(
        mul(remote_total, d0, "gamma_mb")?,
        config.bytes_per_scalar,
        "gamma_mb",
    )?;
    mul(bytes, config.epochs_mb, "gamma_mb")
}

/// `Γ_mb` in bytes. Knobs model full-graph optimizations and do not apply.
pub fn comm_cost_mb(
    batches: &[MicroBatch],
    assignment: &PartitionAssignment,
    d0: u64,
    config: &CostConfig,
) -> Result<u64> {
    let summaries = summarize(batches, assignment)?;
    gamma_mb_from(remote_input_total(&summaries)?, d0, config)
}

/// Forward FLOPs of one full-graph epoch: `sum_l (m c_e + n c_v)`.
pub fn forward_flops_fg(graph: &CsrGraph, arch: &ModelArch) -> Result<u64> {
    let (n, m) = (graph.num_vertices() as u64, graph.num_edges() as u64);
    layer_flops(arch)?
        .into_iter()
        .try_fold(0u64, |acc, (ce, cv)| {
            let term = add(mul(m, ce, "theta_fg")?, mul(n, cv, "theta_fg")?, "theta_fg")?;
            add(acc, term, "theta_fg")
        })
}

/// `Θ_fg = n_f * sum_l (|E| c_e + |V| c_v) * (1 + eta)`.
pub fn compute_cost_fg(graph: &CsrGraph, arch: &ModelArch, config: &CostConfig) -> Result<f64> {
    if graph.num_vertices() == 0 {
        return Err(Error::Argument(
            "full-graph cost needs a nonempty graph".into(),
        ));
    }
    arch.validate()?;
    config.validate()?;
    let fwd = mul(forward_flops_fg(graph, arch)?, config.epochs_fg, "theta_fg")?;
    Ok(fwd as f64 * (1.0 + arch.eta))
}

/// Forward FLOPs of one mini-batch epoch.
pub fn forward_flops_mb(batches: &[MicroBatch], arch: &ModelArch) -> Result<u64> {
    let flops = layer_flops(arch)?;
    batches.iter().try_fold(0u64, |acc, b| {
        let s = BatchSummary {
            worker: b.worker,
            iteration: b.iteration,
            layer_vertices: b.layer_vertices.clone(),
            layer_edges: b.layer_edges.clone(),
            remote_inputs: 0,
        };
        s.check_layers(arch.layers())?;
        add(acc, s.forward_flops(&flops)?, "theta_mb")
    })
}

/// `Θ_mb = n_m * sum_i sum_w sum_l (|E^l(M)| c_e + |V^l(M)| c_v) * (1 + eta)`.
pub fn compute_cost_mb(
    batches: &[MicroBatch],
    arch: &ModelArch,
    config: &CostConfig,
) -> Result<f64> {
    arch.validate()?;
    config.validate()?;
    let fwd = mul(
        forward_flops_mb(batches, arch)?,
        config.epochs_mb,
        "theta_mb",
    )?;
    Ok(fwd as f64 * (1.0 + arch.eta))
}

/// Abstract sampling effort of one epoch: vertices examined plus neighbors
/// drawn, `sum_l |V^l| + sum_l |E^l|` over every batch.
pub fn sampling_work(batches: &[MicroBatch]) -> u64 {
    batches
        .iter()
        .map(|b| b.layer_vertices.iter().sum::<u64>() + b.layer_edges.iter().sum::<u64>())
        .sum()
}

fn ratio(num: f64, den: f64) -> Option<f64> {
    (den > 0.0).then(|| num / den)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LayerBreakdown {
    pub layer: usize,
    pub c_e: u64,
    pub c_v: u64,
    pub comm_dim: u64,
    pub gamma_fg_bytes: u64,
    pub theta_fg_forward: u64,
    pub theta_mb_forward: u64,
    /// Vertices this layer outputs, summed over the epoch (`layer_vertices[l]`).
    pub mb_vertices: u64,
    pub mb_edges: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WorkerBreakdown {
    pub worker: usize,
    pub part_size: u64,
    pub remote_in: u64,
    pub gamma_fg_bytes: u64,
    pub gamma_mb_bytes: u64,
    pub theta_mb_forward: u64,
    pub micro_batches: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationBreakdown {
    pub iteration: usize,
    pub gamma_mb_bytes: u64,
    pub theta_mb_forward: u64,
    pub sampling_work: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Breakdown {
    pub per_layer: Vec<LayerBreakdown>,
    pub per_worker: Vec<WorkerBreakdown>,
    pub per_iteration: Vec<IterationBreakdown>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartitionInfo {
    pub method: String,
    pub k: usize,
    pub slack: f64,
    pub seed: u64,
    pub edge_cut: u64,
    pub halo_total: u64,
    pub part_sizes: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SamplerInfo {
    pub algorithm: String,
    pub batch_size: usize,
    pub workers: usize,
    pub rng_root: u64,
    pub iterations: usize,
    pub micro_batches: usize,
    pub train_size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub dataset: String,
    pub n: usize,
    pub m: usize,
    pub arch: ModelArch,
    pub cost: CostConfig,
    pub partition: PartitionInfo,
    pub sampler: SamplerInfo,
}

/// Everything `analyze` computes for one configuration point.
///
/// Forward FLOP totals already include the epoch counts; `theta_*` add the
/// `(1 + eta)` backward factor. Ratios are `None` when the denominator is zero.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CostReport {
    pub gamma_fg: f64,
    pub gamma_fg_volume: u64,
    pub gamma_mb: u64,
    pub gamma_ratio: Option<f64>,
    pub theta_fg: f64,
    pub theta_mb: f64,
    pub theta_fg_forward: u64,
    pub theta_mb_forward: u64,
    pub theta_ratio: Option<f64>,
    pub sampling_work: u64,
    pub sampling_fraction: Option<f64>,
    pub exposed_comm_fg: f64,
    pub flags: Vec<String>,
    pub breakdown: Breakdown,
    pub provenance: Provenance,
}

/// Flat, CSV-friendly projection of a [`CostReport`]. Column order is stable.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlatReport {
    pub dataset: String,
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub workers: usize,
    pub partition_method: String,
    pub algorithm: String,
    pub model: String,
    pub layers: usize,
    pub batch_size: usize,
    pub iterations: usize,
    pub micro_batches: usize,
    pub edge_cut: u64,
    pub halo_total: u64,
    pub epochs_fg: u64,
    pub epochs_mb: u64,
    pub eta: f64,
    pub boundary_sampling_rate: f64,
    pub quantization_bits: u32,
    pub overlap_fraction: f64,
    pub gamma_fg: f64,
    pub gamma_fg_volume: u64,
    pub gamma_mb: u64,
    pub gamma_ratio: Option<f64>,
    pub theta_fg: f64,
    pub theta_mb: f64,
    pub theta_fg_forward: u64,
    pub theta_mb_forward: u64,
    pub theta_ratio: Option<f64>,
    pub sampling_work: u64,
    pub sampling_fraction: Option<f64>,
    pub exposed_comm_fg: f64,
}

impl CostReport {
    pub fn flat(&self) -> FlatReport {
        let p = &self.provenance;
        FlatReport {
            dataset: p.dataset.clone(),
            n: p.n,
            m: p.m,
            k: p.partition.k,
            workers: p.sampler.workers,
            partition_method: p.partition.method.clone(),
            algorithm: p.sampler.algorithm.clone(),
            model: format!("{:?}", p.arch.kind).to_lowercase(),
            layers: p.arch.layers(),
            batch_size: p.sampler.batch_size,
            iterations: p.sampler.iterations,
            micro_batches: p.sampler.micro_batches,
            edge_cut: p.partition.edge_cut,
            halo_total: p.partition.halo_total,
            epochs_fg: p.cost.epochs_fg,
            epochs_mb: p.cost.epochs_mb,
            eta: p.arch.eta,
            boundary_sampling_rate: p.cost.knobs.boundary_sampling_rate,
            quantization_bits: p.cost.knobs.quantization_bits,
            overlap_fraction: p.cost.knobs.overlap_fraction,
            gamma_fg: self.gamma_fg,
            gamma_fg_volume: self.gamma_fg_volume,
            gamma_mb: self.gamma_mb,
            gamma_ratio: self.gamma_ratio,
            theta_fg: self.theta_fg,
            theta_mb: self.theta_mb,
            theta_fg_forward: self.theta_fg_forward,
            theta_mb_forward: self.theta_mb_forward,
            theta_ratio: self.theta_ratio,
            sampling_work: self.sampling_work,
            sampling_fraction: self.sampling_fraction,
            exposed_comm_fg: self.exposed_comm_fg,
        }
    }
}

/// Inputs of one analysis point.
#[derive(Debug, Clone)]
pub struct AnalysisInput<'a> {
    pub dataset: &'a str,
    pub graph: &'a CsrGraph,
    pub train: &'a VertexSet,
    pub assignment: &'a PartitionAssignment,
    pub partition_method: &'a str,
    pub partition_seed: u64,
    pub arch: &'a ModelArch,
    pub plan: &'a EpochPlan,
    pub sampler: &'a SamplerConfig,
    pub cost: &'a CostConfig,
}

/// Samples one epoch and evaluates all four costs on identical
/// hyperparameters.
pub fn analyze(input: &AnalysisInput<'_>) -> Result<CostReport> {
    let AnalysisInput {
        graph,
        assignment,
        arch,
        plan,
        sampler,
        cost,
        ..
    } = *input;
    arch.validate()?;
    cost.validate()?;
    let layers = arch.layers();
    cost.check_layers(layers)?;
    if graph.num_vertices() == 0 {
        return Err(Error::Argument("cannot analyze an empty graph".into()));
    }
    if assignment.num_vertices() != graph.num_vertices() {
        return Err(Error::Argument("partition does not cover the graph".into()));
    }
    if assignment.k() != plan.workers {
        return Err(Error::Argument(format!(
            "workers ({}) must equal the partition count k ({})",
            plan.workers,
            assignment.k()
        )));
    }
    let flops = layer_flops(arch)?;
    let profile = boundary_profile(graph, assignment, false)?;

    let summaries = sample_epoch_map(graph, plan, arch, sampler, Some(input.train), |b| {
        BatchSummary::new(&b, assignment)
    })?;
    for s in &summaries {
        s.check_layers(layers)?;
    }

    // Full graph.
    let gamma_fg_volume = comm_volume_fg(&profile, cost)?;
    let gamma_fg = gamma_fg_volume as f64 * cost.knobs.volume_scale();
    let fwd_fg_epoch = forward_flops_fg(graph, arch)?;
    let theta_fg_forward = mul(fwd_fg_epoch, cost.epochs_fg, "theta_fg")?;

    // Mini-batch.
    let gamma_mb = gamma_mb_from(remote_input_total(&summaries)?, arch.dims[0], cost)?;
    let mut fwd_mb_epoch = 0u64;
    let mut work = 0u64;
    for s in &summaries {
        fwd_mb_epoch = add(fwd_mb_epoch, s.forward_flops(&flops)?, "theta_mb")?;
        work = add(work, s.sampling_work(), "sampling_work")?;
    }
    let theta_mb_forward = mul(fwd_mb_epoch, cost.epochs_mb, "theta_mb")?;

    let backward = 1.0 + arch.eta;
    let theta_fg = theta_fg_forward as f64 * backward;
    let theta_mb = theta_mb_forward as f64 * backward;
    // The backward factor cancels, so the ratio is taken on forward totals.
    let theta_ratio = ratio(theta_fg_forward as f64, theta_mb_forward as f64);
    let gamma_ratio = ratio(gamma_fg, gamma_mb as f64);
    let theta_mb_epoch = fwd_mb_epoch as f64 * backward;
    let sampling_fraction = ratio(work as f64, work as f64 + theta_mb_epoch);

    let mut flags = Vec::new();
    if gamma_ratio.is_none() {
        flags.push(format!(
            "gamma_ratio undefined: gamma_mb = 0 (gamma_fg = {gamma_fg})"
        ));
    }
    if theta_ratio.is_none() {
        flags.push("theta_ratio undefined: theta_mb = 0".to_string());
    }
    if sampling_fraction.is_none() {
        flags.push("sampling_fraction undefined: no sampling or training work".to_string());
    }
    if gamma_fg == 0.0 {
        flags.push(
            "gamma_fg = 0: no remote neighbors (single part or no crossing edges)".to_string(),
        );
    }

    let breakdown = build_breakdown(graph, assignment, arch, cost, &profile, &summaries, &flops)?;
    let report = CostReport {
        gamma_fg,
        gamma_fg_volume,
        gamma_mb,
        gamma_ratio,
        theta_fg,
        theta_mb,
        theta_fg_forward,
        theta_mb_forward,
        theta_ratio,
        sampling_work: work,
        sampling_fraction,
        exposed_comm_fg: gamma_fg * (1.0 - cost.knobs.overlap_fraction),
        flags,
        breakdown,
        provenance: Provenance {
            dataset: input.dataset.to_string(),
            n: graph.num_vertices(),
            m: graph.num_edges(),
            arch: arch.clone(),
            cost: cost.clone(),
            partition: PartitionInfo {
                method: input.partition_method.to_string(),
                k: assignment.k(),
                slack: assignment.slack(),
                seed: input.partition_seed,
                edge_cut: profile.edge_cut,
                halo_total: profile.halo_total,
                part_sizes: assignment.part_sizes(),
            },
            sampler: SamplerInfo {
                algorithm: sampler.name().to_string(),
                batch_size: plan.global_batch,
                workers: plan.workers,
                rng_root: plan.rng_root,
                iterations: plan.iterations(),
                micro_batches: summaries.len(),
                train_size: input.train.len(),
            },
        },
    };
    Ok(report)
}

fn build_breakdown(
    graph: &CsrGraph,
    assignment: &PartitionAssignment,
    arch: &ModelArch,
    cost: &CostConfig,
    profile: &BoundaryProfile,
    summaries: &[BatchSummary],
    flops: &[(u64, u64)],
) -> Result<Breakdown> {
    let (n, m) = (graph.num_vertices() as u64, graph.num_edges() as u64);
    let d0 = arch.dims[0];
    let bytes = cost.bytes_per_scalar;
    let dims_sum: u64 = cost.comm_dims.iter().sum();

    let mut per_layer = Vec::with_capacity(flops.len());
    for (i, &(ce, cv)) in flops.iter().enumerate() {
        let mb_vertices: u64 = summaries.iter().map(|s| s.layer_vertices[i + 1]).sum();
        let mb_edges: u64 = summaries.iter().map(|s| s.layer_edges[i]).sum();
        per_layer.push(LayerBreakdown {
            layer: i + 1,
            c_e: ce,
            c_v: cv,
            comm_dim: cost.comm_dims[i],
            gamma_fg_bytes: mul(
                mul(
                    mul(profile.halo_total, cost.comm_dims[i], "gamma_fg")?,
                    bytes,
                    "gamma_fg",
                )?,
                cost.epochs_fg,
                "gamma_fg",
            )?,
            theta_fg_forward: mul(
                add(mul(m, ce, "theta_fg")?, mul(n, cv, "theta_fg")?, "theta_fg")?,
                cost.epochs_fg,
                "theta_fg",
            )?,
            theta_mb_forward: mul(
                add(
                    mul(mb_edges, ce, "theta_mb")?,
                    mul(mb_vertices, cv, "theta_mb")?,
                    "theta_mb",
                )?,
                cost.epochs_mb,
                "theta_mb",
            )?,
            mb_vertices,
            mb_edges,
        });
    }

    let sizes = assignment.part_sizes();
    let mut per_worker: Vec<WorkerBreakdown> = (0..assignment.k())
        .map(|w| -> Result<WorkerBreakdown> {
            let remote = profile.remote_in_count[w];
            Ok(WorkerBreakdown {
                worker: w,
                part_size: sizes[w] as u64,
                remote_in: remote,
                gamma_fg_bytes: mul(
                    mul(mul(remote, dims_sum, "gamma_fg")?, bytes, "gamma_fg")?,
                    cost.epochs_fg,
                    "gamma_fg",
                )?,
                gamma_mb_bytes: 0,
                theta_mb_forward: 0,
                micro_batches: 0,
            })
        })
        .collect::<Result<_>>()?;
    let iterations = summaries
        .iter()
        .map(|s| s.iteration as usize + 1)
        .max()
        .unwrap_or(0);
    let mut per_iteration: Vec<IterationBreakdown> = (0..iterations)
        .map(|i| IterationBreakdown {
            iteration: i,
            gamma_mb_bytes: 0,
            theta_mb_forward: 0,
            sampling_work: 0,
        })
        .collect();
    for s in summaries {
        let g = gamma_mb_from(s.remote_inputs, d0, cost)?;
        let t = mul(s.forward_flops(flops)?, cost.epochs_mb, "theta_mb")?;
        let w = &mut per_worker[s.worker as usize];
        w.gamma_mb_bytes += g;
        w.theta_mb_forward += t;
        w.micro_batches += 1;
        let it = &mut per_iteration[s.iteration as usize];
        it.gamma_mb_bytes += g;
        it.theta_mb_forward += t;
        it.sampling_work += s.sampling_work();
    }
    Ok(Breakdown {
        per_layer,
        per_worker,
        per_iteration,
    })
}
