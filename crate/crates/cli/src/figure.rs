//! Per-length series for plotting, derived from search result rows.

use std::collections::BTreeMap;

use qppsearch_core::defaults::defaults_for;

use crate::records::{FigureRow, SearchRow};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureKind {
    /// Minimum distance of the baseline and of each class winner.
    MinDistance,
    /// Spread factor `D` of the baseline and of each class winner.
    Spread,
}

pub const BASELINE_SERIES: &str = "lte";

fn winner_series(row: &SearchRow) -> String {
    format!("{}-tub-min", row.class)
}

fn baseline_spread(row: &SearchRow) -> Option<u64> {
    if let Some(d) = row.baseline_d {
        return Some(d as u64);
    }
    let qpp = row.baseline().or_else(|| defaults_for(row.length).ok().map(|r| r.lte()))?;
    Some(qpp.permutation().ok()?.spread() as u64)
}

/// One row per series and length, sorted by series then length. Later
/// inputs win when the same series and length appear twice.
pub fn figure_rows(kind: FigureKind, rows: &[SearchRow]) -> Vec<FigureRow> {
    let mut points: BTreeMap<(String, usize), u64> = BTreeMap::new();
    for row in rows {
        let (baseline, winner) = match kind {
            FigureKind::MinDistance => (row.baseline_dmin().map(u64::from), row.dmin().map(u64::from)),
            FigureKind::Spread => (baseline_spread(row), Some(row.d as u64)),
        };
        if let Some(v) = baseline {
            points.insert((BASELINE_SERIES.to_string(), row.length), v);
        }
        if let Some(v) = winner {
            points.insert((winner_series(row), row.length), v);
        }
    }
    points
        .into_iter()
        .map(|((series, length), value)| FigureRow { series, length, value })
        .collect()
}
