//! Append-only JSON-lines log of finished groups, so an interrupted search
//! can resume where it stopped.

use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use qppsearch_core::search::{GroupReport, SearchConfig};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProgressLine {
    /// Identifies the search the group belongs to.
    pub fingerprint: String,
    pub report: GroupReport,
}

/// Everything that changes the group plan or the meaning of a report.
pub fn fingerprint(config: &SearchConfig) -> String {
    let s = &config.selector;
    let target = match s.kind {
        qppsearch_core::qpp::ClassKind::SpreadTargetMaxZeta { d_target } => d_target.to_string(),
        _ => "-".to_string(),
    };
    format!(
        "L={};class={};target={};lpp={};q0={};snr={};m={};ceiling={};nodes={:?};order={:?};prune={}",
        config.length,
        s.kind.label(),
        target,
        !s.exclude_lpp_reducible,
        s.include_q0,
        config.snr_db,
        config.num_dist,
        config.budget.weight_ceiling,
        config.budget.node_limit,
        config.ordering,
        config.pruning,
    )
}

pub struct ProgressLog {
    file: File,
}

impl ProgressLog {
    pub fn open(path: &Path) -> std::io::Result<Self> {
        let file = OpenOptions::new().create(true).append(true).open(path)?;
        Ok(Self { file })
    }

    pub fn append(&mut self, config: &SearchConfig, report: &GroupReport) -> anyhow::Result<()> {
        let line = ProgressLine {
            fingerprint: fingerprint(config),
            report: report.clone(),
        };
        writeln!(self.file, "{}", serde_json::to_string(&line)?)?;
        self.file.flush()?;
        Ok(())
    }
}

/// Reports previously logged for `config`. A missing file yields nothing;
/// a truncated last line (from an interrupted write) is ignored.
pub fn load(path: &Path, config: &SearchConfig) -> anyhow::Result<Vec<GroupReport>> {
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(e.into()),
    };
    let key = fingerprint(config);
    let lines: Vec<String> = BufReader::new(file).lines().collect::<Result<_, _>>()?;
    let mut reports: Vec<GroupReport> = Vec::new();
    for (i, line) in lines.iter().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let parsed: ProgressLine = match serde_json::from_str(line) {
            Ok(p) => p,
            Err(_) if i + 1 == lines.len() => break,
            Err(e) => return Err(e.into()),
        };
        if parsed.fingerprint == key && !reports.iter().any(|r| r.index == parsed.report.index) {
            reports.push(parsed.report);
        }
    }
    Ok(reports)
}
