//! Subcommand implementations. Each command is a pure function of its
//! configuration and seeds; the only side effects are the files it writes.

use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use gnncost_core::cost::{
    analyze, flops_edge, flops_vertex, AnalysisInput, CostReport, FlatReport,
};
use gnncost_core::graph::{
    generate_synthetic, ingest_edge_list, load_binary_csr, read_mask, save_binary_csr,
    validate_against_meta, CsrGraph, DatasetMeta, MetaReport, SetRole, VertexSet,
};
use gnncost_core::partition::{
    boundary_profile, import_partition, partition_streaming, random_partition_baseline,
    PartitionAssignment, DEFAULT_SLACK,
};
use gnncost_core::rng::CounterRng;
use gnncost_core::sampler::{plan_epoch, sample_epoch_map, ModelArch, SamplerConfig};

use crate::config::{Algorithm, Format, PartitionMethod, RunConfig};
use crate::error::CliError;
use crate::output::{write_atomic, write_csv, write_json};

/// Stream tag for drawing a training subset from `train_fraction`.
const TAG_TRAIN_SUBSET: u64 = 0x7261_696E;

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Default)]
pub struct GlobalOpts {
    pub config: Option<PathBuf>,
    /// Overrides `sampler.rng_root`.
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

/// A loaded configuration plus resolved output settings.
#[derive(Debug, Clone)]
pub struct Context {
    pub cfg: RunConfig,
    pub out_dir: PathBuf,
    pub format: Format,
}

impl Context {
    pub fn load(opts: &GlobalOpts) -> Result<Self, CliError> {
        let path = opts
            .config
            .as_deref()
            .ok_or_else(|| CliError::Usage("--config <path> is required".into()))?;
        let mut cfg = RunConfig::load(path)?;
        if let Some(seed) = opts.seed {
            cfg.sampler.rng_root = seed;
        }
        let out_dir = match (&opts.out, &cfg.output.dir) {
            (Some(d), _) => d.clone(),
            (None, Some(d)) => cfg.resolve(d),
            (None, None) => PathBuf::from("out"),
        };
        let format = opts.format.or(cfg.output.format).unwrap_or_default();
        Ok(Self {
            cfg,
            out_dir,
            format,
        })
    }

    fn path(&self, name: &str) -> PathBuf {
        self.out_dir.join(name)
    }
}

/// Runs `f` on a rayon pool of `jobs` threads, or on the global pool.
pub fn with_jobs<T: Send>(
    jobs: Option<usize>,
    f: impl FnOnce() -> Result<T, CliError> + Send,
) -> Result<T, CliError> {
    match jobs {
        None => f(),
        Some(0) => Err(CliError::Usage("--jobs must be >= 1".into())),
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build()
            .map_err(|e| CliError::Usage(format!("cannot build thread pool: {e}")))?
            .install(f),
    }
}

fn open(path: &Path) -> Result<BufReader<File>, CliError> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Graph and training set named by the dataset section.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub meta: DatasetMeta,
    pub graph: CsrGraph,
    pub train: VertexSet,
}

pub fn load_dataset(cfg: &RunConfig) -> Result<Dataset, CliError> {
    let d = &cfg.dataset;
    let meta = cfg.meta()?;
    let graph = if let Some(p) = &d.edges {
        ingest_edge_list(open(&cfg.resolve(p))?, d.symmetrize, Some(&meta))?
    } else if let Some(p) = &d.gcsr {
        load_binary_csr(open(&cfg.resolve(p))?)?
    } else if let Some(s) = &d.synthetic {
        generate_synthetic(s.kind, s.n, s.avg_degree, s.seed)?
    } else {
        return Err(CliError::Config(vec!["dataset: no graph source".into()]));
    };
    let n = graph.num_vertices();
    let train = if let Some(p) = &d.train_mask {
        read_mask(open(&cfg.resolve(p))?, SetRole::Train, n)?
    } else {
        let fraction = d.train_fraction.unwrap_or(1.0);
        let count = ((fraction * n as f64).round() as usize).min(n);
        if count == n {
            VertexSet::all(n, SetRole::Train)
        } else {
            let picked = CounterRng::from_parts(&[d.train_seed, TAG_TRAIN_SUBSET])
                .sample_distinct(n, count)
                .into_iter()
                .map(|v| v as u32)
                .collect();
            VertexSet::from_unsorted(picked, SetRole::Train, n)?
        }
    };
    Ok(Dataset { meta, graph, train })
}

/// Builds or imports the partition for `k` parts. Returns it with its method name.
pub fn build_partition(
    cfg: &RunConfig,
    graph: &CsrGraph,
    k: usize,
) -> Result<(PartitionAssignment, &'static str), CliError> {
    let p = &cfg.partition;
    if let Some(template) = &p.import {
        let path = cfg.resolve(Path::new(&template.replace("{k}", &k.to_string())));
        let a = import_partition(open(&path)?, graph.num_vertices(), k)?;
        return Ok((a, "import"));
    }
    let method = p.method.unwrap_or(PartitionMethod::Streaming);
    let a = match method {
        PartitionMethod::Streaming => partition_streaming(graph, k, p.slack, p.seed)?,
        PartitionMethod::Random => random_partition_baseline(graph, k, p.seed)?,
    };
    Ok((a, method.name()))
}

pub fn sampler_config(cfg: &RunConfig, graph: &CsrGraph) -> Result<SamplerConfig, CliError> {
    let s = &cfg.sampler;
    Ok(match s.algorithm {
        Algorithm::Neighborhood => SamplerConfig::Neighborhood,
        Algorithm::ClusterGcn => SamplerConfig::ClusterGcn {
            clusters: partition_streaming(graph, s.cluster_count, DEFAULT_SLACK, 0)?,
            q: s.q,
        },
        Algorithm::SaintNode => SamplerConfig::SaintNode {
            budget: s.budget.unwrap_or(0),
        },
        Algorithm::SaintWalk => SamplerConfig::SaintWalk {
            roots: s.roots.unwrap_or(0),
            walk_len: s.walk_len,
        },
    })
}

/// Full analysis of one configuration at partition count `k` (workers = k).
pub fn analyze_point(cfg: &RunConfig, data: &Dataset, k: usize) -> Result<CostReport, CliError> {
    let arch = cfg.arch()?;
    let cost = cfg.cost_config(&arch);
    let (assignment, method) = build_partition(cfg, &data.graph, k)?;
    let sampler = sampler_config(cfg, &data.graph)?;
    let plan = plan_epoch(&data.train, cfg.sampler.batch_size, k, cfg.sampler.rng_root)?;
    Ok(analyze(&AnalysisInput {
        dataset: &data.meta.name,
        graph: &data.graph,
        train: &data.train,
        assignment: &assignment,
        partition_method: method,
        partition_seed: cfg.partition.seed,
        arch: &arch,
        plan: &plan,
        sampler: &sampler,
        cost: &cost,
    })?)
}

// ---------------------------------------------------------------- ingest

#[derive(Debug, Clone, Default)]
pub struct IngestArgs {
    pub input: PathBuf,
    pub output: Option<PathBuf>,
    pub symmetrize: bool,
    pub name: Option<String>,
    pub preset: Option<String>,
    pub expected_n: Option<u64>,
    pub expected_m: Option<u64>,
}

/// Ingests an edge list, writes it as GCSR and checks it against metadata.
/// The report is returned even on mismatch so the caller can print it.
pub fn cmd_ingest(args: &IngestArgs) -> Result<(MetaReport, Result<(), CliError>), CliError> {
    let mut meta = match &args.preset {
        Some(p) => DatasetMeta::preset(p)
            .ok_or_else(|| CliError::Usage(format!("unknown preset {p:?}")))?,
        None => DatasetMeta::named(args.name.as_deref().unwrap_or("graph")),
    };
    if let Some(name) = &args.name {
        meta.name = name.clone();
    }
    if args.expected_n.is_some() {
        meta.expected_n = args.expected_n;
    }
    if args.expected_m.is_some() {
        meta.expected_m = args.expected_m;
    }
    let graph = ingest_edge_list(open(&args.input)?, args.symmetrize, Some(&meta))?;
    let output = args
        .output
        .clone()
        .unwrap_or_else(|| args.input.with_extension("gcsr"));
    let mut bytes = Vec::with_capacity(16 + 8 * (graph.num_vertices() + graph.num_edges() + 3));
    save_binary_csr(&graph, &mut bytes)?;
    write_atomic(&output, &bytes)?;
    let report = validate_against_meta(&graph, &meta);
    let status = if report.pass {
        Ok(())
    } else {
        let failed: Vec<String> = report
            .checks
            .iter()
            .filter(|c| !c.pass)
            .map(|c| {
                format!(
                    "{} observed {} expected {}",
                    c.field, c.observed, c.expected
                )
            })
            .collect();
        Err(CliError::MetaMismatch(failed.join("; ")))
    };
    Ok((report, status))
}

// ------------------------------------------------------------- partition

#[derive(Debug, Clone, Serialize)]
pub struct PartitionSummary {
    pub dataset: String,
    pub method: String,
    pub k: usize,
    pub slack: f64,
    pub seed: u64,
    pub n: usize,
    pub m: usize,
    pub edge_cut: u64,
    pub halo_total: u64,
    pub part_sizes: Vec<usize>,
    pub remote_in_count: Vec<u64>,
}

/// Writes `partition.txt` (one part id per line) and `partition.json`.
pub fn cmd_partition(ctx: &Context) -> Result<PartitionSummary, CliError> {
    ctx.cfg.validate(true)?;
    let data = load_dataset(&ctx.cfg)?;
    let k = ctx.cfg.partition.k.unwrap_or(1);
    let (a, method) = build_partition(&ctx.cfg, &data.graph, k)?;
    let profile = boundary_profile(&data.graph, &a, false)?;
    let summary = PartitionSummary {
        dataset: data.meta.name.clone(),
        method: method.to_string(),
        k,
        slack: a.slack(),
        seed: ctx.cfg.partition.seed,
        n: data.graph.num_vertices(),
        m: data.graph.num_edges(),
        edge_cut: profile.edge_cut,
        halo_total: profile.halo_total,
        part_sizes: a.part_sizes(),
        remote_in_count: profile.remote_in_count,
    };
    write_atomic(&ctx.path("partition.txt"), a.to_metis_text().as_bytes())?;
    write_json(&ctx.path("partition.json"), &summary)?;
    Ok(summary)
}

// --------------------------------------------------------------- analyze

/// Writes `report.json` and/or `report.csv` for the configured point.
pub fn cmd_analyze(ctx: &Context) -> Result<CostReport, CliError> {
    ctx.cfg.validate(true)?;
    let data = load_dataset(&ctx.cfg)?;
    let k = ctx.cfg.partition.k.unwrap_or(1);
    let report = analyze_point(&ctx.cfg, &data, k)?;
    if ctx.format.json() {
        write_json(&ctx.path("report.json"), &report)?;
    }
    if ctx.format.csv() {
        write_csv(&ctx.path("report.csv"), &[report.flat()])?;
    }
    Ok(report)
}

// ----------------------------------------------------------------- sweep

/// Analyzes every k in `k_list` (workers follow k). Points run concurrently;
/// the CSV keeps `k_list` order. Writes `sweep.csv` and `sweep/k<k>.json`.
pub fn cmd_sweep(ctx: &Context, k_list: &[usize]) -> Result<Vec<FlatReport>, CliError> {
    if k_list.is_empty() {
        return Err(CliError::Usage("--k-list must name at least one k".into()));
    }
    if let Some(&bad) = k_list.iter().find(|&&k| k < 2) {
        return Err(CliError::Usage(format!(
            "every k in --k-list must be >= 2, got {bad}"
        )));
    }
    if let Some(import) = &ctx.cfg.partition.import {
        if !import.contains("{k}") {
            return Err(CliError::Config(vec![
                "partition.import: a sweep needs a {k} placeholder in the path".into(),
            ]));
        }
    }
    let mut cfg = ctx.cfg.clone();
    cfg.sampler.workers = None;
    cfg.partition.k = None;
    cfg.validate(false)?;
    let data = load_dataset(&cfg)?;
    let reports = k_list
        .par_iter()
        .map(|&k| {
            let report = analyze_point(&cfg, &data, k).map_err(|e| CliError::Point {
                k,
                source: Box::new(e),
            })?;
            if ctx.format.json() {
                write_json(&ctx.path(&format!("sweep/k{k}.json")), &report)?;
            }
            Ok(report.flat())
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    if ctx.format.csv() {
        write_csv(&ctx.path("sweep.csv"), &reports)?;
    }
    Ok(reports)
}

// ---------------------------------------------------------- sample-stats

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HistogramBucket {
    /// Inclusive lower bound.
    pub lo: u64,
    /// Inclusive upper bound.
    pub hi: u64,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LayerStats {
    pub layer: usize,
    pub total_vertices: u64,
    /// Edges feeding this layer from layer - 1; absent at the input layer.
    pub total_edges: Option<u64>,
    pub min_vertices: u64,
    pub max_vertices: u64,
    pub mean_vertices: f64,
    /// Frontier sizes per micro-batch in power-of-two buckets.
    pub histogram: Vec<HistogramBucket>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleStats {
    pub dataset: String,
    pub algorithm: String,
    pub workers: usize,
    pub batch_size: usize,
    pub iterations: usize,
    pub micro_batches: usize,
    pub sampling_work: u64,
    pub theta_mb_epoch: f64,
    pub sampling_fraction: Option<f64>,
    pub layers: Vec<LayerStats>,
}

/// One CSV row per layer.
#[derive(Debug, Clone, Serialize)]
pub struct LayerStatsRow {
    pub dataset: String,
    pub algorithm: String,
    pub workers: usize,
    pub sampling_work: u64,
    pub sampling_fraction: Option<f64>,
    pub layer: usize,
    pub total_vertices: u64,
    pub total_edges: Option<u64>,
    pub min_vertices: u64,
    pub max_vertices: u64,
    pub mean_vertices: f64,
}

fn bucket_of(x: u64) -> (u64, u64) {
    if x == 0 {
        (0, 0)
    } else {
        let lo = 1u64 << (63 - x.leading_zeros());
        (lo, lo.saturating_mul(2) - 1)
    }
}

fn histogram(values: impl Iterator<Item = u64>) -> Vec<HistogramBucket> {
    let mut buckets: std::collections::BTreeMap<u64, HistogramBucket> = Default::default();
    for v in values {
        let (lo, hi) = bucket_of(v);
        buckets
            .entry(lo)
            .or_insert(HistogramBucket { lo, hi, count: 0 })
            .count += 1;
    }
    buckets.into_values().collect()
}

/// Per-layer sums of forward FLOPs for one epoch of layer counts.
fn forward_flops(arch: &ModelArch, batches: &[(Vec<u64>, Vec<u64>)]) -> Result<u64, CliError> {
    let overflow = || CliError::Core(gnncost_core::Error::Overflow("theta_mb"));
    let mut total = 0u64;
    for l in 1..=arch.layers() {
        let (ce, cv) = (flops_edge(arch, l)?, flops_vertex(arch, l)?);
        for (lv, le) in batches {
            let f = ce
                .checked_mul(le[l - 1])
                .and_then(|e| cv.checked_mul(lv[l]).and_then(|v| e.checked_add(v)))
                .ok_or_else(overflow)?;
            total = total.checked_add(f).ok_or_else(overflow)?;
        }
    }
    Ok(total)
}

pub fn sample_stats(cfg: &RunConfig, data: &Dataset) -> Result<SampleStats, CliError> {
    let arch = cfg.arch()?;
    let workers = cfg.workers().unwrap_or(1);
    let sampler = sampler_config(cfg, &data.graph)?;
    let plan = plan_epoch(
        &data.train,
        cfg.sampler.batch_size,
        workers,
        cfg.sampler.rng_root,
    )?;
    let counts = sample_epoch_map(
        &data.graph,
        &plan,
        &arch,
        &sampler,
        Some(&data.train),
        |b| Ok((b.layer_vertices, b.layer_edges)),
    )?;
    let mut work = 0u64;
    for (lv, le) in &counts {
        work = lv
            .iter()
            .chain(le)
            .try_fold(work, |acc, &x| acc.checked_add(x))
            .ok_or(gnncost_core::Error::Overflow("sampling_work"))?;
    }
    let theta_mb_epoch = forward_flops(&arch, &counts)? as f64 * (1.0 + arch.eta);
    let denom = work as f64 + theta_mb_epoch;
    let sampling_fraction = (denom > 0.0).then(|| work as f64 / denom);
    let layers = (0..=arch.layers())
        .map(|l| {
            let sizes = || counts.iter().map(|(lv, _)| lv[l]);
            let total_vertices: u64 = sizes().sum();
            LayerStats {
                layer: l,
                total_vertices,
                total_edges: (l > 0).then(|| counts.iter().map(|(_, le)| le[l - 1]).sum()),
                min_vertices: sizes().min().unwrap_or(0),
                max_vertices: sizes().max().unwrap_or(0),
                mean_vertices: if counts.is_empty() {
                    0.0
                } else {
                    total_vertices as f64 / counts.len() as f64
                },
                histogram: histogram(sizes()),
            }
        })
        .collect();
    Ok(SampleStats {
        dataset: data.meta.name.clone(),
        algorithm: sampler.name().to_string(),
        workers,
        batch_size: cfg.sampler.batch_size,
        iterations: plan.iterations(),
        micro_batches: counts.len(),
        sampling_work: work,
        theta_mb_epoch,
        sampling_fraction,
        layers,
    })
}

/// Writes `sample_stats.json` and/or `sample_stats.csv` (one row per layer).
pub fn cmd_sample_stats(ctx: &Context) -> Result<SampleStats, CliError> {
    ctx.cfg.validate(ctx.cfg.partition.k.is_some())?;
    let data = load_dataset(&ctx.cfg)?;
    let stats = sample_stats(&ctx.cfg, &data)?;
    if ctx.format.json() {
        write_json(&ctx.path("sample_stats.json"), &stats)?;
    }
    if ctx.format.csv() {
        let rows: Vec<LayerStatsRow> = stats
            .layers
            .iter()
            .map(|l| LayerStatsRow {
                dataset: stats.dataset.clone(),
                algorithm: stats.algorithm.clone(),
                workers: stats.workers,
                sampling_work: stats.sampling_work,
                sampling_fraction: stats.sampling_fraction,
                layer: l.layer,
                total_vertices: l.total_vertices,
                total_edges: l.total_edges,
                min_vertices: l.min_vertices,
                max_vertices: l.max_vertices,
                mean_vertices: l.mean_vertices,
            })
            .collect();
        write_csv(&ctx.path("sample_stats.csv"), &rows)?;
    }
    Ok(stats)
}
