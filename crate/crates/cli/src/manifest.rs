//! JSON run manifest: what was asked, when, and every record in full
//! precision together with per-group outcomes.

use std::time::{SystemTime, UNIX_EPOCH};

use qppsearch_core::search::{GroupOutcome, GroupReport, SearchConfig, SearchRecord};
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub tool_version: String,
    /// Seconds since the Unix epoch.
    pub started_at: u64,
    pub finished_at: u64,
    pub request: RunRequest,
    pub lengths: Vec<LengthRun>,
}

/// Command-line level settings shared by all lengths of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRequest {
    pub lengths: Vec<usize>,
    pub class: String,
    pub jobs: usize,
    /// Where SNR and term counts came from: `defaults` or `override`.
    pub snr_source: String,
    pub num_dist_source: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LengthRun {
    pub config: SearchConfig,
    pub record: SearchRecord,
    pub groups: Vec<GroupSummary>,
}

/// Outcome of one group, without the spectra.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub index: usize,
    pub q1: usize,
    pub q2: usize,
    pub outcome: String,
    pub tub_fer: Option<f64>,
    pub fer_min_at_abort: Option<f64>,
    pub nodes: u64,
    pub events: u64,
}

impl From<&GroupReport> for GroupSummary {
    fn from(r: &GroupReport) -> Self {
        let (outcome, tub_fer, fer_min_at_abort) = match &r.outcome {
            GroupOutcome::Completed { tub_fer, .. } => ("completed", Some(*tub_fer), None),
            GroupOutcome::Aborted { fer_min, .. } => ("aborted", None, Some(*fer_min)),
            GroupOutcome::BudgetExceeded { .. } => ("budget-exceeded", None, None),
        };
        Self {
            index: r.index,
            q1: r.representative.q1,
            q2: r.representative.q2,
            outcome: outcome.to_string(),
            tub_fer,
            fer_min_at_abort,
            nodes: r.stats.nodes,
            events: r.stats.events,
        }
    }
}

pub fn unix_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

impl RunManifest {
    pub fn new(request: RunRequest) -> Self {
        let now = unix_now();
        Self {
            schema_version: SCHEMA_VERSION,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            started_at: now,
            finished_at: now,
            request,
            lengths: Vec::new(),
        }
    }

    pub fn push(&mut self, config: SearchConfig, record: SearchRecord, reports: &[GroupReport]) {
        let mut groups: Vec<GroupSummary> = reports.iter().map(GroupSummary::from).collect();
        groups.sort_by_key(|g| g.index);
        self.lengths.push(LengthRun { config, record, groups });
        self.finished_at = unix_now();
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        serde_json::to_string_pretty(self)
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }
}
