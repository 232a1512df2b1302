//! Experiment configuration files: versioned JSON with the textual model
//! grammars embedded as strings.

use serde::{Deserialize, Serialize};

use crate::HarnessError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExperimentKind {
    #[serde(rename = "graph-sweep")]
    GraphSweep,
    #[serde(rename = "tree-sweep")]
    TreeSweep,
    #[serde(rename = "tau-tail")]
    TauTail,
    #[serde(rename = "theory-table")]
    TheoryTable,
    #[serde(rename = "explosive")]
    Explosive,
}

impl ExperimentKind {
    /// Stable tag mixed into every substream derivation.
    pub fn stream_tag(&self) -> u64 {
        match self {
            ExperimentKind::GraphSweep => 1,
            ExperimentKind::TreeSweep => 2,
            ExperimentKind::TauTail => 3,
            ExperimentKind::TheoryTable => 4,
            ExperimentKind::Explosive => 5,
        }
    }
}

/// One entry of a theory-table run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelSpec {
    #[serde(rename = "distF")]
    pub dist_f: String,
    #[serde(rename = "distR")]
    pub dist_r: String,
    pub coupling: String,
    pub nu: f64,
}

/// Declarative experiment description. Fields not used by a kind may be
/// omitted in the file; validation happens in the runners.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(rename = "schemaVersion")]
    pub schema_version: u32,
    pub kind: ExperimentKind,
    /// Degree spec (graph kinds).
    #[serde(default)]
    pub degrees: Option<String>,
    /// Offspring spec (tree-sweep).
    #[serde(default)]
    pub offspring: Option<String>,
    /// `galton-watson` (default) or `unimodular`.
    #[serde(default)]
    pub mode: Option<String>,
    #[serde(rename = "distF", default)]
    pub dist_f: Option<String>,
    #[serde(rename = "distR", default)]
    pub dist_r: Option<String>,
    #[serde(default)]
    pub coupling: Option<String>,
    #[serde(default)]
    pub delay: Option<f64>,
    /// Graph sizes to sweep; defaults to the degree spec's own size.
    #[serde(rename = "nGrid", default)]
    pub n_grid: Option<Vec<usize>>,
    /// Tree generations or tau-tail walk length.
    #[serde(rename = "maxK", default)]
    pub max_k: Option<usize>,
    pub replications: u64,
    /// Strong-survival fraction threshold (summary estimators).
    #[serde(default)]
    pub eta: Option<f64>,
    /// Weak-survival count threshold (summary estimators).
    #[serde(rename = "bigK", default)]
    pub big_k: Option<u64>,
    /// Per-generation population cap for tree runs.
    #[serde(default)]
    pub cap: Option<u64>,
    #[serde(rename = "masterSeed")]
    pub master_seed: u64,
    /// Output CSV path.
    pub out: String,
    /// Worker threads (0 or absent: all available).
    #[serde(default)]
    pub threads: Option<usize>,
    /// Models for theory-table runs.
    #[serde(default)]
    pub models: Option<Vec<ModelSpec>>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        let cfg: ExperimentConfig = serde_json::from_str(text)
            .map_err(|e| HarnessError::Config(format!("config parse: {e}")))?;
        if cfg.schema_version != SCHEMA_VERSION {
            return Err(HarnessError::Config(format!(
                "unsupported schemaVersion {} (expected {SCHEMA_VERSION})",
                cfg.schema_version
            )));
        }
        if cfg.replications < 1 {
            return Err(HarnessError::Config("replications must be >= 1".into()));
        }
        if let Some(eta) = cfg.eta {
            if !(eta > 0.0 && eta < 1.0) {
                return Err(HarnessError::Config(format!(
                    "eta must lie in (0, 1), got {eta}"
                )));
            }
        }
        if let Some(d) = cfg.delay {
            if !(d.is_finite() && d >= 0.0) {
                return Err(HarnessError::Config(format!(
                    "delay must be a finite non-negative number, got {d}"
                )));
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }
}
