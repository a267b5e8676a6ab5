//! Serializable description of a split: fold membership, removed molecules
//! and full provenance parameters, so a manifest doubles as a rerun spec.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::molio::FpSource;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
pub const MANIFEST_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitManifest {
    pub tool_version: String,
    pub format_version: u32,
    pub method: String,
    pub parameters: SplitParameters,
    pub folds: Vec<Fold>,
    pub removed: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fold {
    pub train: Vec<String>,
    pub test: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clusters: Option<Vec<ClusterInfo>>,
}

/// One extracted test cluster: the anchor is the central molecule retained
/// in the training set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterInfo {
    pub cluster: usize,
    pub center: String,
    pub anchor: String,
    pub members: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitParameters {
    pub threshold: f64,
    pub seed: u64,
    pub fingerprint: FpSource,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounds: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time_budget_secs: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub test_fraction: Option<f64>,
    /// Greedy baseline only: how the initial partition was drawn.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_partition: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_cluster_size: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_clusters: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub std_threshold: Option<f64>,
    /// Cluster value spread is computed over the center plus its neighbors.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub std_includes_center: Option<bool>,
}

impl SplitParameters {
    pub fn new(threshold: f64, seed: u64, fingerprint: FpSource) -> SplitParameters {
        SplitParameters {
            threshold,
            seed,
            fingerprint,
            k: None,
            bounds: None,
            time_budget_secs: None,
            test_fraction: None,
            initial_partition: None,
            min_cluster_size: None,
            max_clusters: None,
            std_threshold: None,
            std_includes_center: None,
        }
    }
}

impl SplitManifest {
    pub fn new(method: &str, parameters: SplitParameters) -> SplitManifest {
        SplitManifest {
            tool_version: TOOL_VERSION.to_string(),
            format_version: MANIFEST_FORMAT_VERSION,
            method: method.to_string(),
            parameters,
            folds: Vec::new(),
            removed: Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }

    pub fn write_json(&self, mut w: impl Write) -> std::io::Result<()> {
        w.write_all(self.to_json().as_bytes())
    }

    pub fn read_json(r: impl Read) -> Result<SplitManifest, serde_json::Error> {
        serde_json::from_reader(r)
    }
}
