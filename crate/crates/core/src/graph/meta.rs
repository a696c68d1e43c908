use serde::{Deserialize, Serialize};

use super::CsrGraph;

/// Relative tolerance for matching reference dataset counts.
pub const META_TOLERANCE: f64 = 0.01;

/// Descriptive statistics of a dataset. Feature values are never stored; only
/// the widths matter to a volume-based cost model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetMeta {
    pub name: String,
    #[serde(default)]
    pub expected_n: Option<u64>,
    #[serde(default)]
    pub expected_m: Option<u64>,
    /// Input feature width `d0`.
    #[serde(default = "default_feature_dim")]
    pub feature_dim: u64,
    #[serde(default = "default_num_classes")]
    pub num_classes: u64,
}

fn default_feature_dim() -> u64 {
    128
}

fn default_num_classes() -> u64 {
    2
}

impl DatasetMeta {
    pub fn named(name: &str) -> Self {
        Self {
            name: name.to_string(),
            expected_n: None,
            expected_m: None,
            feature_dim: default_feature_dim(),
            num_classes: default_num_classes(),
        }
    }

    /// Planetoid PubMed, symmetrized, self-loops removed.
    pub fn pubmed() -> Self {
        Self {
            name: "pubmed".into(),
            expected_n: Some(19_717),
            expected_m: Some(88_648),
            feature_dim: 500,
            num_classes: 3,
        }
    }

    /// ogbn-arxiv as distributed (directed citation edges).
    pub fn ogbn_arxiv() -> Self {
        Self {
            name: "ogbn-arxiv".into(),
            expected_n: Some(169_343),
            expected_m: Some(1_166_243),
            feature_dim: 128,
            num_classes: 40,
        }
    }

    pub fn preset(name: &str) -> Option<Self> {
        match name.to_ascii_lowercase().as_str() {
            "pubmed" => Some(Self::pubmed()),
            "arxiv" | "ogbn-arxiv" | "ogbn_arxiv" => Some(Self::ogbn_arxiv()),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldCheck {
    pub field: &'static str,
    pub observed: u64,
    pub expected: u64,
    pub relative_error: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetaReport {
    pub dataset: String,
    pub checks: Vec<FieldCheck>,
    pub pass: bool,
}

/// Compares observed vertex/edge counts against the expected ones. Fields the
/// meta leaves unset are not checked.
pub fn validate_against_meta(graph: &CsrGraph, meta: &DatasetMeta) -> MetaReport {
    let mut checks = Vec::new();
    let fields = [
        ("n", graph.num_vertices() as u64, meta.expected_n),
        ("m", graph.num_edges() as u64, meta.expected_m),
    ];
    for (field, observed, expected) in fields {
        let Some(expected) = expected else { continue };
        let relative_error = if expected == 0 {
            if observed == 0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (observed as f64 - expected as f64).abs() / expected as f64
        };
        checks.push(FieldCheck {
            field,
            observed,
            expected,
            relative_error,
            pass: relative_error <= META_TOLERANCE,
        });
    }
    let pass = checks.iter().all(|c| c.pass);
    MetaReport {
        dataset: meta.name.clone(),
        checks,
        pass,
    }
}
