//! Multi-threaded drivers for searches and simulations. Both produce the
//! same results as their single-threaded counterparts in the core crate.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{mpsc, Mutex};
use std::thread;

use anyhow::{bail, Context};
use qppsearch_core::search::{
    evaluate_group, finish, plan, resolve_baseline, Candidate, GroupOutcome, GroupReport, Incumbent, SearchConfig,
    SearchRecord,
};
use qppsearch_core::sim::{run_frame, FerPoint, FrameOutcome, PointTally, SimConfig};

/// Incumbent shared between worker threads.
#[derive(Debug, Default)]
pub struct SharedIncumbent(Mutex<Option<Candidate>>);

impl Incumbent for SharedIncumbent {
    fn current(&self) -> Option<Candidate> {
        *self.0.lock().unwrap_or_else(|e| e.into_inner())
    }

    fn offer(&self, candidate: Candidate) {
        let mut best = self.0.lock().unwrap_or_else(|e| e.into_inner());
        if best.is_none_or(|b| candidate.beats(&b)) {
            *best = Some(candidate);
        }
    }
}

/// Runs a search on `jobs` threads. Groups already present in `resumed`
/// are not recomputed. `on_report` sees every newly finished group on the
/// calling thread, in completion order.
pub fn run_search(
    config: &SearchConfig,
    jobs: usize,
    resumed: Vec<GroupReport>,
    mut on_report: impl FnMut(&GroupReport) -> anyhow::Result<()>,
) -> anyhow::Result<(SearchRecord, Vec<GroupReport>)> {
    let plan = plan(config)?;
    let incumbent = SharedIncumbent::default();
    let mut done = vec![false; plan.groups.len()];
    for r in &resumed {
        let Some(slot) = done.get_mut(r.index) else {
            bail!("progress log names group {} but the plan has {}", r.index, plan.groups.len());
        };
        if plan.groups[r.index].group.representative != r.representative {
            bail!("progress log does not match the group plan at index {}", r.index);
        }
        *slot = true;
        if let GroupOutcome::Completed { tub_fer, .. } = r.outcome {
            incumbent.offer(Candidate {
                tub_fer,
                key: r.representative.sort_key(),
            });
        }
    }
    let pending: Vec<usize> = (0..plan.groups.len()).filter(|&i| !done[i]).collect();
    let mut reports = resumed;

    let next = AtomicUsize::new(0);
    let workers = jobs.max(1).min(pending.len().max(1));
    thread::scope(|scope| -> anyhow::Result<()> {
        let (tx, rx) = mpsc::channel();
        for _ in 0..workers {
            let tx = tx.clone();
            let (plan, pending, next, incumbent) = (&plan, &pending, &next, &incumbent);
            scope.spawn(move || loop {
                let k = next.fetch_add(1, Ordering::Relaxed);
                let Some(&index) = pending.get(k) else { break };
                let result = evaluate_group(plan, index, incumbent);
                let failed = result.is_err();
                if tx.send(result).is_err() || failed {
                    // Stop handing out work after a failure.
                    next.store(pending.len(), Ordering::Relaxed);
                    break;
                }
            });
        }
        drop(tx);
        for result in rx {
            let report = result?;
            on_report(&report)?;
            reports.push(report);
        }
        Ok(())
    })?;

    reports.sort_by_key(|r| r.index);
    let baseline = resolve_baseline(&plan, &reports)?;
    let record = finish(&plan, &reports, baseline)?;
    Ok((record, reports))
}

/// Frames simulated per worker between checks of the stopping rule.
const FRAMES_PER_WORKER: u64 = 256;

/// Monte-Carlo FER on `jobs` threads. Frames are evaluated in batches and
/// consumed in index order, so the result matches the sequential run.
pub fn simulate(config: &SimConfig, jobs: usize) -> anyhow::Result<Vec<FerPoint>> {
    config.validate()?;
    let jobs = jobs.max(1);
    let mut points = Vec::with_capacity(config.snr_points_db.len());
    for (p, &snr_db) in config.snr_points_db.iter().enumerate() {
        let mut tally = PointTally::default();
        while !tally.is_done(config) {
            let start = tally.frames;
            let count = (jobs as u64 * FRAMES_PER_WORKER).min(config.max_frames - start);
            let outcomes = simulate_batch(config, p, start, count, jobs)?;
            for outcome in outcomes {
                if tally.is_done(config) {
                    break;
                }
                tally.push(outcome);
            }
        }
        points.push(tally.finish(snr_db, config));
    }
    Ok(points)
}

fn simulate_batch(config: &SimConfig, point: usize, start: u64, count: u64, jobs: usize) -> anyhow::Result<Vec<FrameOutcome>> {
    let chunk = count.div_ceil(jobs as u64).max(1);
    thread::scope(|scope| {
        let handles: Vec<_> = (0..jobs as u64)
            .map(|w| w * chunk)
            .take_while(|&off| off < count)
            .map(|off| {
                let end = (off + chunk).min(count);
                scope.spawn(move || {
                    let mut decoder = config.decoder();
                    (start + off..start + end)
                        .map(|f| run_frame(config, &mut decoder, point, f))
                        .collect::<Result<Vec<_>, _>>()
                })
            })
            .collect();
        let mut out = Vec::with_capacity(count as usize);
        for h in handles {
            let part = h.join().map_err(|_| anyhow::anyhow!("simulation worker panicked"))?;
            out.extend(part.context("frame simulation failed")?);
        }
        Ok(out)
    })
}
