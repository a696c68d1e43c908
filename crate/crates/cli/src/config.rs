//! Run configuration (TOML). Unknown keys are rejected everywhere.
//!
//! Relative paths are resolved against the directory holding the config file.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use gnncost_core::cost::{CommDimsMode, CostConfig, OptimizationKnobs};
use gnncost_core::graph::{DatasetMeta, SyntheticKind};
use gnncost_core::partition::DEFAULT_SLACK;
use gnncost_core::sampler::{Aggregator, ModelArch, ModelKind};

use crate::error::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub dataset: DatasetSpec,
    #[serde(default)]
    pub partition: PartitionSpec,
    pub model: ModelSpec,
    #[serde(default)]
    pub sampler: SamplerSpec,
    #[serde(default)]
    pub cost: CostSpec,
    #[serde(default)]
    pub output: OutputSpec,
    #[serde(skip)]
    pub base_dir: PathBuf,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticSpec {
    pub kind: SyntheticKind,
    pub n: usize,
    pub avg_degree: f64,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetSpec {
    pub name: String,
    /// Known dataset whose statistics fill unset meta fields.
    pub preset: Option<String>,
    /// Edge-list text file.
    pub edges: Option<PathBuf>,
    /// Binary GCSR file.
    pub gcsr: Option<PathBuf>,
    pub synthetic: Option<SyntheticSpec>,
    #[serde(default = "yes")]
    pub symmetrize: bool,
    pub feature_dim: Option<u64>,
    pub num_classes: Option<u64>,
    pub expected_n: Option<u64>,
    pub expected_m: Option<u64>,
    /// Mask file with one training vertex id per line.
    pub train_mask: Option<PathBuf>,
    /// Without a mask, this fraction of vertices (chosen by `train_seed`) trains.
    pub train_fraction: Option<f64>,
    #[serde(default)]
    pub train_seed: u64,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PartitionMethod {
    Streaming,
    Random,
}

impl PartitionMethod {
    pub fn name(self) -> &'static str {
        match self {
            Self::Streaming => "streaming",
            Self::Random => "random",
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartitionSpec {
    pub k: Option<usize>,
    /// Built-in partitioner; defaults to streaming.
    pub method: Option<PartitionMethod>,
    #[serde(default = "default_slack")]
    pub slack: f64,
    #[serde(default)]
    pub seed: u64,
    /// Metis-style partition file; `{k}` is replaced by the part count.
    pub import: Option<String>,
}

fn default_slack() -> f64 {
    DEFAULT_SLACK
}

impl Default for PartitionSpec {
    fn default() -> Self {
        Self {
            k: None,
            method: None,
            slack: DEFAULT_SLACK,
            seed: 0,
            import: None,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub kind: ModelKind,
    /// Full width list `[d_0, ..., d_L]`; alternative to `layers` + `hidden`.
    pub dims: Option<Vec<u64>>,
    pub layers: Option<usize>,
    pub hidden: Option<u64>,
    #[serde(default = "one_u64")]
    pub heads: u64,
    #[serde(default = "default_aggregator")]
    pub aggregator: Aggregator,
    #[serde(default = "one_f64")]
    pub eta: f64,
}

fn one_u64() -> u64 {
    1
}

fn one_f64() -> f64 {
    1.0
}

fn default_aggregator() -> Aggregator {
    Aggregator::Mean
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Neighborhood,
    ClusterGcn,
    SaintNode,
    SaintWalk,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplerSpec {
    #[serde(default = "default_algorithm")]
    pub algorithm: Algorithm,
    pub fanouts: Option<Vec<usize>>,
    /// Same fanout at every layer.
    pub fanout: Option<usize>,
    #[serde(default = "default_batch")]
    pub batch_size: usize,
    pub workers: Option<usize>,
    #[serde(default = "default_clusters")]
    pub cluster_count: usize,
    #[serde(default = "one_usize")]
    pub q: usize,
    pub budget: Option<usize>,
    pub roots: Option<usize>,
    #[serde(default)]
    pub walk_len: usize,
    #[serde(default)]
    pub rng_root: u64,
}

fn default_algorithm() -> Algorithm {
    Algorithm::Neighborhood
}

fn default_batch() -> usize {
    1024
}

fn default_clusters() -> usize {
    32
}

fn one_usize() -> usize {
    1
}

impl Default for SamplerSpec {
    fn default() -> Self {
        Self {
            algorithm: Algorithm::Neighborhood,
            fanouts: None,
            fanout: None,
            batch_size: default_batch(),
            workers: None,
            cluster_count: default_clusters(),
            q: 1,
            budget: None,
            roots: None,
            walk_len: 0,
            rng_root: 0,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostSpec {
    #[serde(default = "one_u64")]
    pub epochs_fg: u64,
    #[serde(default = "one_u64")]
    pub epochs_mb: u64,
    #[serde(default = "four")]
    pub bytes_per_scalar: u64,
    #[serde(default)]
    pub comm_dims_mode: CommDimsMode,
    pub comm_dims: Option<Vec<u64>>,
    #[serde(default)]
    pub knobs: OptimizationKnobs,
}

fn four() -> u64 {
    4
}

impl Default for CostSpec {
    fn default() -> Self {
        Self {
            epochs_fg: 1,
            epochs_mb: 1,
            bytes_per_scalar: 4,
            comm_dims_mode: CommDimsMode::Input,
            comm_dims: None,
            knobs: OptimizationKnobs::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
    #[default]
    Both,
}

impl Format {
    pub fn json(self) -> bool {
        matches!(self, Self::Json | Self::Both)
    }

    pub fn csv(self) -> bool {
        matches!(self, Self::Csv | Self::Both)
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub dir: Option<PathBuf>,
    pub format: Option<Format>,
}

impl RunConfig {
    pub fn from_toml(text: &str, base_dir: &Path) -> Result<Self, CliError> {
        let mut cfg: RunConfig =
            toml::from_str(text).map_err(|e| CliError::Config(vec![e.to_string()]))?;
        cfg.base_dir = base_dir.to_path_buf();
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", path.display())))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::from_toml(&text, &base)
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    /// Dataset statistics: preset first, explicit fields override.
    pub fn meta(&self) -> Result<DatasetMeta, CliError> {
        let d = &self.dataset;
        let mut meta = match &d.preset {
            Some(p) => DatasetMeta::preset(p).ok_or_else(|| {
                CliError::Config(vec![format!("dataset.preset: unknown preset {p:?}")])
            })?,
            None => DatasetMeta::named(&d.name),
        };
        meta.name = d.name.clone();
        if let Some(v) = d.feature_dim {
            meta.feature_dim = v;
        }
        if let Some(v) = d.num_classes {
            meta.num_classes = v;
        }
        if d.expected_n.is_some() {
            meta.expected_n = d.expected_n;
        }
        if d.expected_m.is_some() {
            meta.expected_m = d.expected_m;
        }
        Ok(meta)
    }

    pub fn workers(&self) -> Option<usize> {
        self.sampler.workers.or(self.partition.k)
    }

    pub fn fanouts(&self, layers: usize) -> Vec<usize> {
        match (&self.sampler.fanouts, self.sampler.fanout) {
            (Some(f), _) => f.clone(),
            (None, Some(f)) => vec![f; layers],
            (None, None) => vec![0; layers],
        }
    }

    pub fn arch(&self) -> Result<ModelArch, CliError> {
        let meta = self.meta()?;
        let m = &self.model;
        let dims = match (&m.dims, m.layers, m.hidden) {
            (Some(d), _, _) => d.clone(),
            (None, Some(layers), Some(hidden)) if layers >= 1 => {
                let mut d = vec![meta.feature_dim];
                d.extend(std::iter::repeat_n(hidden, layers - 1));
                d.push(meta.num_classes);
                d
            }
            _ => {
                return Err(CliError::Config(vec![
                    "model: give either dims or layers (>= 1) plus hidden".into(),
                ]))
            }
        };
        let layers = dims.len().saturating_sub(1);
        Ok(ModelArch {
            kind: m.kind,
            dims,
            heads: m.heads,
            aggregator: m.aggregator,
            fanouts: self.fanouts(layers),
            eta: m.eta,
        })
    }

    pub fn cost_config(&self, arch: &ModelArch) -> CostConfig {
        let c = &self.cost;
        CostConfig {
            epochs_fg: c.epochs_fg,
            epochs_mb: c.epochs_mb,
            bytes_per_scalar: c.bytes_per_scalar,
            comm_dims: c
                .comm_dims
                .clone()
                .unwrap_or_else(|| c.comm_dims_mode.dims_for(arch)),
            knobs: c.knobs,
        }
    }

    /// Checks every cross-field invariant and reports all violations at once.
    /// `needs_k` is false for commands that take k from elsewhere (sweep).
    pub fn validate(&self, needs_k: bool) -> Result<(), CliError> {
        let mut errs = Vec::new();
        let d = &self.dataset;
        let sources = [d.edges.is_some(), d.gcsr.is_some(), d.synthetic.is_some()]
            .iter()
            .filter(|&&b| b)
            .count();
        if sources != 1 {
            errs.push(format!(
                "dataset: exactly one of edges, gcsr, synthetic must be given (found {sources})"
            ));
        }
        if d.train_mask.is_some() && d.train_fraction.is_some() {
            errs.push("dataset: train_mask and train_fraction are mutually exclusive".into());
        }
        if let Some(f) = d.train_fraction {
            if !(f > 0.0 && f <= 1.0) {
                errs.push(format!(
                    "dataset.train_fraction: must be in (0, 1], got {f}"
                ));
            }
        }
        if let Some(p) = &d.preset {
            if DatasetMeta::preset(p).is_none() {
                errs.push(format!("dataset.preset: unknown preset {p:?}"));
            }
        }
        if let Some(s) = &d.synthetic {
            if s.n == 0 {
                errs.push("dataset.synthetic.n: must be > 0".into());
            }
            if s.avg_degree.is_nan() || s.avg_degree < 0.0 {
                errs.push("dataset.synthetic.avg_degree: must be >= 0".into());
            }
        }

        let p = &self.partition;
        if needs_k {
            match p.k {
                None => errs.push("partition.k: required".into()),
                Some(0) => errs.push("partition.k: must be >= 1".into()),
                Some(_) => {}
            }
        }
        if p.import.is_some() && p.method.is_some() {
            errs.push("partition: import and method are mutually exclusive".into());
        }
        if p.slack.is_nan() || p.slack < 0.0 {
            errs.push(format!("partition.slack: must be >= 0, got {}", p.slack));
        }
        if needs_k {
            if let (Some(k), Some(w)) = (p.k, self.sampler.workers) {
                if k != w {
                    errs.push(format!(
                        "sampler.workers ({w}) must equal partition.k ({k})"
                    ));
                }
            }
        }

        let s = &self.sampler;
        match self.arch() {
            Ok(arch) => {
                if let Err(e) = arch.validate() {
                    errs.push(format!("model: {e}"));
                }
                let layers = arch.layers();
                if s.algorithm == Algorithm::Neighborhood {
                    if s.fanouts.is_none() && s.fanout.is_none() {
                        errs.push("sampler: neighborhood sampling needs fanouts or fanout".into());
                    }
                    if s.fanouts.as_ref().is_some_and(|f| f.len() != layers) {
                        errs.push(format!(
                            "sampler.fanouts: needs {layers} entries (one per layer)"
                        ));
                    }
                }
                if s.fanouts.is_some() && s.fanout.is_some() {
                    errs.push("sampler: fanouts and fanout are mutually exclusive".into());
                }
                let cost = self.cost_config(&arch);
                if let Err(e) = cost.validate() {
                    errs.push(format!("cost: {e}"));
                }
                if cost.comm_dims.len() != layers {
                    errs.push(format!(
                        "cost.comm_dims: needs {layers} entries (one per layer)"
                    ));
                }
            }
            Err(CliError::Config(es)) => errs.extend(es),
            Err(e) => errs.push(e.to_string()),
        }
        if s.batch_size == 0 {
            errs.push("sampler.batch_size: must be >= 1".into());
        }
        if let Some(w) = self.workers() {
            if w == 0 {
                errs.push("sampler.workers: must be >= 1".into());
            } else if s.batch_size < w {
                errs.push(format!(
                    "sampler.batch_size ({}) must be >= workers ({w})",
                    s.batch_size
                ));
            }
        }
        match s.algorithm {
            Algorithm::ClusterGcn => {
                if s.cluster_count == 0 {
                    errs.push("sampler.cluster_count: must be >= 1".into());
                }
                if s.q == 0 || s.q > s.cluster_count {
                    errs.push(format!(
                        "sampler.q: must lie in [1, cluster_count = {}]",
                        s.cluster_count
                    ));
                }
            }
            Algorithm::SaintNode => {
                if s.budget.is_none_or(|b| b == 0) {
                    errs.push("sampler.budget: required (>= 1) for saint_node".into());
                }
            }
            Algorithm::SaintWalk => {
                if s.roots.is_none_or(|r| r == 0) {
                    errs.push("sampler.roots: required (>= 1) for saint_walk".into());
                }
            }
            Algorithm::Neighborhood => {}
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(CliError::Config(errs))
        }
    }
}
