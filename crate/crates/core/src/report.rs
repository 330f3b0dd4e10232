//! Serializable run reports. Every report embeds the caller's resolved
//! configuration so a run can be reproduced from its output alone.

use crate::apps::family::TesterVerdict;
use crate::apps::matching::MatchingEstimate;
use crate::estimator::{DistributionEstimate, Variant};
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct TypeRow {
    pub encoding: String,
    pub y: f64,
    pub x: f64,
    pub x_clamped: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EstimateReport {
    pub config: serde_json::Value,
    pub variant: Variant,
    pub s: usize,
    pub seed: u64,
    pub peak_memory_edges: usize,
    /// Theory-mandated sample size (decimal), reported next to the s used.
    pub paper_s: String,
    pub types: Vec<TypeRow>,
}

impl EstimateReport {
    pub fn new(est: &DistributionEstimate, config: serde_json::Value) -> Self {
        let types = est
            .catalog()
            .types()
            .iter()
            .enumerate()
            .map(|(i, t)| TypeRow {
                encoding: t.encoding().to_string(),
                y: est.y[i],
                x: est.x[i],
                x_clamped: est.x_clamped[i],
            })
            .collect();
        Self {
            config,
            variant: est.variant,
            s: est.s,
            seed: est.seed,
            peak_memory_edges: est.peak_memory_edges,
            paper_s: est.paper_s.clone(),
            types,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerdictReport {
    pub config: serde_json::Value,
    #[serde(flatten)]
    pub verdict: TesterVerdict,
}

impl VerdictReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MatchingReport {
    pub config: serde_json::Value,
    #[serde(flatten)]
    pub estimate: MatchingEstimate,
    /// Reference greedy mean when the caller computed one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_mean: Option<f64>,
}

impl MatchingReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }
}

/// Fixed bench CSV header.
pub const BENCH_CSV_HEADER: &str = "s,trial,max_err,peak_mem_edges,wall_ms";
