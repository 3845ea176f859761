//! Minimum-TUB(FER) search over an interleaver class with early abort.
//!
//! A search runs in three steps: [`plan`] enumerates the class and groups
//! candidates that share a spectrum, [`evaluate_group`] computes one
//! group's spectrum while consulting an [`Incumbent`] to abandon groups that
//! can no longer win, and [`finish`] reduces the per-group reports to a
//! [`SearchRecord`]. [`search`] chains them sequentially; callers that want
//! parallelism drive the middle step themselves with a shared incumbent.

use alloc::vec::Vec;
use core::cell::Cell;
use core::cmp::Ordering;

use crate::defaults::defaults_for;
use crate::qpp::{enumerate_class, group_by_spectrum_equivalence, ClassKind, ClassSelector, Qpp, QppGroup, SpreadMetrics};
use crate::spectrum::{exact_spectrum, spectrum_of, Budget, Control, DistanceSpectrum, SpectrumOutcome, SpectrumStats};
use crate::tub::{should_abort, tub_ber, tub_fer};
use crate::{Error, Result};

/// Order in which groups are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum GroupOrdering {
    /// Descending `D`, then descending `ζ'`, then ascending `(q1, q2)`.
    #[default]
    SpreadThenZeta,
    /// Ascending `(q1, q2)` only.
    Coefficients,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SearchConfig {
    pub length: usize,
    pub selector: ClassSelector,
    pub snr_db: f64,
    pub num_dist: usize,
    pub baseline: Option<Qpp>,
    pub ordering: GroupOrdering,
    pub budget: Budget,
    /// Whether groups may be abandoned early.
    pub pruning: bool,
}

impl SearchConfig {
    /// Configuration with the shipped SNR, number of terms and LTE baseline
    /// for `length`.
    pub fn for_length(length: usize, selector: ClassSelector) -> Result<Self> {
        let row = defaults_for(length)?;
        Ok(Self {
            length,
            selector,
            snr_db: row.snr_db,
            num_dist: row.num_dist,
            baseline: Some(row.lte()),
            ordering: GroupOrdering::default(),
            budget: Budget::default(),
            pruning: true,
        })
    }

    fn validate(&self) -> Result<()> {
        if self.num_dist == 0 {
            return Err(Error::InvalidArgument("num_dist must be at least 1"));
        }
        if !self.snr_db.is_finite() {
            return Err(Error::InvalidArgument("snr must be finite"));
        }
        if let Some(b) = self.baseline {
            if b.length != self.length {
                return Err(Error::LengthMismatch {
                    expected: self.length,
                    actual: b.length,
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct PlannedGroup {
    pub group: QppGroup,
    pub metrics: SpreadMetrics,
}

#[derive(Debug, Clone)]
pub struct SearchPlan {
    pub config: SearchConfig,
    pub candidates: usize,
    pub groups: Vec<PlannedGroup>,
}

/// Enumerates the class, groups it and orders the groups.
pub fn plan(config: &SearchConfig) -> Result<SearchPlan> {
    config.validate()?;
    let candidates = enumerate_class(config.length, &config.selector)?;
    let mut groups: Vec<PlannedGroup> = group_by_spectrum_equivalence(&candidates)?
        .into_iter()
        .map(|group| {
            let metrics = SpreadMetrics::of(&group.representative, &group.permutation);
            PlannedGroup { group, metrics }
        })
        .collect();
    let key = |g: &PlannedGroup| g.group.representative.sort_key();
    match config.ordering {
        GroupOrdering::SpreadThenZeta => groups.sort_by(|a, b| {
            b.metrics
                .d
                .cmp(&a.metrics.d)
                .then(b.metrics.zeta_refined.cmp(&a.metrics.zeta_refined))
                .then(key(a).cmp(&key(b)))
        }),
        GroupOrdering::Coefficients => groups.sort_by_key(key),
    }
    Ok(SearchPlan {
        config: config.clone(),
        candidates: candidates.len(),
        groups,
    })
}

/// The best fully computed group so far.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Candidate {
    pub tub_fer: f64,
    pub key: (usize, usize, usize),
}

impl Candidate {
    /// Lower TUB wins; equal TUBs go to the lower `(q1, q2, q0)`.
    pub fn beats(&self, other: &Candidate) -> bool {
        match self.tub_fer.total_cmp(&other.tub_fer) {
            Ordering::Less => true,
            Ordering::Equal => self.key < other.key,
            Ordering::Greater => false,
        }
    }
}

/// Shared state of a search: the current winner. Implementations must only
/// ever replace the stored candidate by one that [`Candidate::beats`] it.
pub trait Incumbent {
    fn current(&self) -> Option<Candidate>;
    fn offer(&self, candidate: Candidate);
}

/// Single-threaded incumbent.
#[derive(Debug, Default)]
pub struct LocalIncumbent(Cell<Option<Candidate>>);

impl LocalIncumbent {
    pub fn new() -> Self {
        Self::default()
    }
}

impl Incumbent for LocalIncumbent {
    fn current(&self) -> Option<Candidate> {
        self.0.get()
    }

    fn offer(&self, candidate: Candidate) {
        match self.0.get() {
            Some(cur) if !candidate.beats(&cur) => {}
            _ => self.0.set(Some(candidate)),
        }
    }
}

/// Abort threshold for a group with key `key`: a group that would win a tie
/// must be strictly worse before it is dropped.
fn abort_threshold(incumbent: &Candidate, key: (usize, usize, usize)) -> f64 {
    if key < incumbent.key {
        incumbent.tub_fer.next_up()
    } else {
        incumbent.tub_fer
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum GroupOutcome {
    Completed {
        spectrum: DistanceSpectrum,
        tub_fer: f64,
    },
    /// Abandoned: no update of `snapshot` can reach below `fer_min`.
    Aborted {
        snapshot: DistanceSpectrum,
        fer_min: f64,
    },
    BudgetExceeded {
        snapshot: DistanceSpectrum,
    },
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GroupReport {
    pub index: usize,
    pub representative: Qpp,
    pub outcome: GroupOutcome,
    pub stats: SpectrumStats,
}

/// Computes the spectrum of group `index`, abandoning it as soon as the
/// incumbent makes it hopeless (when pruning is on). A completed group is
/// offered to the incumbent.
pub fn evaluate_group<I: Incumbent + ?Sized>(plan: &SearchPlan, index: usize, incumbent: &I) -> Result<GroupReport> {
    let cfg = &plan.config;
    let planned = plan.groups.get(index).ok_or(Error::Domain {
        index,
        length: plan.groups.len(),
    })?;
    let representative = planned.group.representative;
    let key = representative.sort_key();
    let mut abort_fer = 0.0;
    let hook = |event: &crate::spectrum::SpectrumEvent<'_>| {
        if !cfg.pruning {
            return Control::Continue;
        }
        let Some(best) = incumbent.current() else {
            return Control::Continue;
        };
        let threshold = abort_threshold(&best, key);
        if should_abort(event.snapshot, threshold, cfg.length, cfg.snr_db) {
            abort_fer = best.tub_fer;
            Control::Abort
        } else {
            Control::Continue
        }
    };
    let result = exact_spectrum(&planned.group.permutation, cfg.num_dist, &cfg.budget, hook);
    let (outcome, stats) = match result {
        Ok((SpectrumOutcome::Complete(spectrum), stats)) => {
            let tub = tub_fer(&spectrum, cfg.length, cfg.snr_db);
            incumbent.offer(Candidate { tub_fer: tub, key });
            (GroupOutcome::Completed { spectrum, tub_fer: tub }, stats)
        }
        Ok((SpectrumOutcome::Aborted(snapshot), stats)) => (
            GroupOutcome::Aborted {
                snapshot,
                fer_min: abort_fer,
            },
            stats,
        ),
        Err(Error::BudgetExceeded { nodes, snapshot }) => (
            GroupOutcome::BudgetExceeded { snapshot },
            SpectrumStats { nodes, events: 0 },
        ),
        Err(e) => return Err(e),
    };
    Ok(GroupReport {
        index,
        representative,
        outcome,
        stats,
    })
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BaselineSummary {
    pub qpp: Qpp,
    pub d: usize,
    pub zeta_refined: usize,
    pub spectrum: DistanceSpectrum,
    pub tub_ber: f64,
    pub tub_fer: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SearchRecord {
    pub length: usize,
    pub class: ClassKind,
    pub snr_db: f64,
    pub num_dist: usize,
    pub winner: Qpp,
    pub d: usize,
    pub zeta_refined: usize,
    pub spectrum: DistanceSpectrum,
    pub tub_ber: f64,
    pub tub_fer: f64,
    /// Members of the winning group, counting inverse permutations.
    pub group_size: usize,
    /// Members of the winning group with exactly the winner's permutation.
    pub same_permutation_count: usize,
    pub candidates: usize,
    pub groups_total: usize,
    pub groups_completed: usize,
    pub groups_aborted: usize,
    pub groups_budget_exceeded: usize,
    pub baseline: Option<BaselineSummary>,
    /// `TUB(FER)` of the baseline over that of the winner.
    pub ratio: Option<f64>,
    pub stats: SpectrumStats,
}

/// `TUB(FER)` of `baseline_spectrum` over the record's.
pub fn compare_to_baseline(record: &SearchRecord, baseline_spectrum: &DistanceSpectrum) -> Result<f64> {
    if record.tub_fer <= 0.0 {
        return Err(Error::InvalidArgument("winner TUB(FER) is zero"));
    }
    Ok(tub_fer(baseline_spectrum, record.length, record.snr_db) / record.tub_fer)
}

/// Spectrum, bounds and metrics of the configured baseline, if any.
pub fn baseline_summary(config: &SearchConfig) -> Result<Option<BaselineSummary>> {
    let Some(qpp) = config.baseline else {
        return Ok(None);
    };
    let perm = qpp.permutation()?;
    let metrics = SpreadMetrics::of(&qpp, &perm);
    let spectrum = spectrum_of(&perm, config.num_dist, &config.budget)?;
    Ok(Some(BaselineSummary {
        qpp,
        d: metrics.d,
        zeta_refined: metrics.zeta_refined,
        tub_ber: tub_ber(&spectrum, config.length, config.snr_db),
        tub_fer: tub_fer(&spectrum, config.length, config.snr_db),
        spectrum,
    }))
}

/// Like [`baseline_summary`], but reuses the spectrum of a completed group
/// when the baseline belongs to one.
pub fn resolve_baseline(plan: &SearchPlan, reports: &[GroupReport]) -> Result<Option<BaselineSummary>> {
    let config = &plan.config;
    let Some(qpp) = config.baseline else {
        return Ok(None);
    };
    let perm = qpp.permutation()?;
    let inverse = perm.inverse();
    for report in reports {
        let GroupOutcome::Completed { spectrum, .. } = &report.outcome else {
            continue;
        };
        let group_perm = &plan.groups[report.index].group.permutation;
        if *group_perm == perm || *group_perm == inverse {
            let metrics = SpreadMetrics::of(&qpp, &perm);
            return Ok(Some(BaselineSummary {
                qpp,
                d: metrics.d,
                zeta_refined: metrics.zeta_refined,
                tub_ber: tub_ber(spectrum, config.length, config.snr_db),
                tub_fer: tub_fer(spectrum, config.length, config.snr_db),
                spectrum: spectrum.clone(),
            }));
        }
    }
    baseline_summary(config)
}

/// Reduces per-group reports (any order, one per group) to the record.
pub fn finish(plan: &SearchPlan, reports: &[GroupReport], baseline: Option<BaselineSummary>) -> Result<SearchRecord> {
    let cfg = &plan.config;
    let mut best: Option<(Candidate, &GroupReport, &DistanceSpectrum)> = None;
    let mut stats = SpectrumStats::default();
    let (mut completed, mut aborted, mut exceeded) = (0, 0, 0);
    for report in reports {
        stats.nodes += report.stats.nodes;
        stats.events += report.stats.events;
        match &report.outcome {
            GroupOutcome::Completed { spectrum, tub_fer } => {
                completed += 1;
                let cand = Candidate {
                    tub_fer: *tub_fer,
                    key: report.representative.sort_key(),
                };
                if best.as_ref().is_none_or(|(b, _, _)| cand.beats(b)) {
                    best = Some((cand, report, spectrum));
                }
            }
            GroupOutcome::Aborted { .. } => aborted += 1,
            GroupOutcome::BudgetExceeded { .. } => exceeded += 1,
        }
    }

    let Some((cand, report, spectrum)) = best else {
        let snapshot = reports
            .iter()
            .find_map(|r| match &r.outcome {
                GroupOutcome::BudgetExceeded { snapshot } => Some(snapshot.clone()),
                _ => None,
            })
            .unwrap_or_else(|| DistanceSpectrum::new(cfg.num_dist));
        return Err(Error::BudgetExceeded {
            nodes: stats.nodes,
            snapshot,
        });
    };
    let planned = &plan.groups[report.index];
    let ratio = match &baseline {
        Some(b) if cand.tub_fer > 0.0 => Some(b.tub_fer / cand.tub_fer),
        Some(_) => return Err(Error::InvalidArgument("winner TUB(FER) is zero")),
        None => None,
    };
    Ok(SearchRecord {
        length: cfg.length,
        class: cfg.selector.kind,
        snr_db: cfg.snr_db,
        num_dist: cfg.num_dist,
        winner: report.representative,
        d: planned.metrics.d,
        zeta_refined: planned.metrics.zeta_refined,
        spectrum: spectrum.clone(),
        tub_ber: tub_ber(spectrum, cfg.length, cfg.snr_db),
        tub_fer: cand.tub_fer,
        group_size: planned.group.members.len(),
        same_permutation_count: planned.group.same_permutation_count(),
        candidates: plan.candidates,
        groups_total: plan.groups.len(),
        groups_completed: completed,
        groups_aborted: aborted,
        groups_budget_exceeded: exceeded,
        baseline,
        ratio,
        stats,
    })
}

/// Runs the whole search on the calling thread. Also returns the per-group
/// reports in evaluation order.
pub fn search_with_reports(config: &SearchConfig) -> Result<(SearchRecord, Vec<GroupReport>)> {
    let plan = plan(config)?;
    let incumbent = LocalIncumbent::new();
    let reports = (0..plan.groups.len())
        .map(|i| evaluate_group(&plan, i, &incumbent))
        .collect::<Result<Vec<_>>>()?;
    let baseline = resolve_baseline(&plan, &reports)?;
    let record = finish(&plan, &reports, baseline)?;
    Ok((record, reports))
}

pub fn search(config: &SearchConfig) -> Result<SearchRecord> {
    search_with_reports(config).map(|(record, _)| record)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::SpectrumTerm;

    fn cand(t: f64, q1: usize) -> Candidate {
        Candidate {
            tub_fer: t,
            key: (q1, 1, 0),
        }
    }

    #[test]
    fn candidate_order() {
        assert!(cand(1.0, 9).beats(&cand(2.0, 1)));
        assert!(cand(1.0, 1).beats(&cand(1.0, 9)));
        assert!(!cand(1.0, 9).beats(&cand(1.0, 1)));
        assert!(!cand(1.0, 1).beats(&cand(1.0, 1)));
    }

    #[test]
    fn local_incumbent_keeps_the_best() {
        let inc = LocalIncumbent::new();
        assert_eq!(inc.current(), None);
        inc.offer(cand(2.0, 5));
        inc.offer(cand(3.0, 1));
        assert_eq!(inc.current(), Some(cand(2.0, 5)));
        inc.offer(cand(2.0, 3));
        assert_eq!(inc.current(), Some(cand(2.0, 3)));
    }

    #[test]
    fn tie_threshold_is_strict_for_lower_keys() {
        let best = cand(1e-5, 10);
        assert_eq!(abort_threshold(&best, (20, 1, 0)), 1e-5);
        assert!(abort_threshold(&best, (3, 1, 0)) > 1e-5);
    }

    #[test]
    fn baseline_ratio() {
        let s = DistanceSpectrum::from_terms(1, alloc::vec![SpectrumTerm::new(12, 1, 2)], true).unwrap();
        let mut config = SearchConfig::for_length(40, ClassSelector::largest_spread()).unwrap();
        config.num_dist = 1;
        let record = SearchRecord {
            length: 40,
            class: ClassKind::LargestSpread,
            snr_db: config.snr_db,
            num_dist: 1,
            winner: Qpp::new(40, 13, 30),
            d: 4,
            zeta_refined: 2,
            tub_ber: 0.0,
            tub_fer: tub_fer(&s, 40, config.snr_db),
            spectrum: s.clone(),
            group_size: 1,
            same_permutation_count: 1,
            candidates: 1,
            groups_total: 1,
            groups_completed: 1,
            groups_aborted: 0,
            groups_budget_exceeded: 0,
            baseline: None,
            ratio: None,
            stats: SpectrumStats::default(),
        };
        assert!((compare_to_baseline(&record, &s).unwrap() - 1.0).abs() < 1e-12);
        let zero = SearchRecord { tub_fer: 0.0, ..record };
        assert!(compare_to_baseline(&zero, &s).is_err());
    }

    #[test]
    fn winner_matches_direct_evaluation() {
        let mut config = SearchConfig {
            length: 16,
            selector: ClassSelector::all(),
            snr_db: 7.5,
            num_dist: 3,
            baseline: None,
            ordering: GroupOrdering::default(),
            budget: Budget::default(),
            pruning: true,
        };
        let (record, reports) = search_with_reports(&config).unwrap();
        let plan = plan(&config).unwrap();
        assert_eq!(reports.len(), plan.groups.len());
        let mut best: Option<Candidate> = None;
        for g in &plan.groups {
            let s = spectrum_of(&g.group.permutation, 3, &Budget::default()).unwrap();
            let c = Candidate {
                tub_fer: tub_fer(&s, 16, 7.5),
                key: g.group.representative.sort_key(),
            };
            if best.is_none_or(|b| c.beats(&b)) {
                best = Some(c);
            }
        }
        let best = best.unwrap();
        assert_eq!(record.tub_fer, best.tub_fer);
        assert_eq!(record.winner.sort_key(), best.key);

        config.pruning = false;
        let unpruned = search(&config).unwrap();
        assert_eq!(unpruned.groups_aborted, 0);
        assert_eq!(unpruned.winner, record.winner);
    }

    #[test]
    fn empty_class_is_an_error() {
        let config = SearchConfig {
            selector: ClassSelector::spread_target(1000),
            ..SearchConfig::for_length(40, ClassSelector::largest_spread()).unwrap()
        };
        assert_eq!(search(&config), Err(Error::EmptyClass));
    }
}
