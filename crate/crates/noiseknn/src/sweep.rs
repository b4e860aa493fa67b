//! Concurrent execution of sweep cells.

use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use noiseknn_core::harness::{run_trial, summarize, ExperimentConfig, SweepSummary, TrialReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SweepOptions {
    /// Worker threads; `0` means the available parallelism.
    pub jobs: usize,
    /// Record `wall_ms`; when off every report carries `0`.
    pub timing: bool,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions { jobs: 0, timing: true }
    }
}

pub fn default_jobs() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

/// Runs every cell with at most `opts.jobs` trials in flight. Reports come back
/// in `(n, trial)` order whatever the schedule; on failure the error of the
/// earliest failing cell is returned.
pub fn run_sweep(cfg: &ExperimentConfig, opts: &SweepOptions) -> noiseknn_core::Result<(Vec<TrialReport>, SweepSummary)> {
    cfg.validate()?;
    let cells = cfg.cells();
    let jobs = if opts.jobs == 0 { default_jobs() } else { opts.jobs }.min(cells.len()).max(1);
    let next = AtomicUsize::new(0);
    let failed = AtomicBool::new(false);
    let slots: Mutex<Vec<Option<noiseknn_core::Result<TrialReport>>>> = Mutex::new(vec![None; cells.len()]);

    std::thread::scope(|s| {
        for _ in 0..jobs {
            s.spawn(|| loop {
                if failed.load(Ordering::Relaxed) {
                    break;
                }
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(&(n, trial)) = cells.get(i) else { break };
                let start = Instant::now();
                let result = run_trial(cfg, n, trial).map(|mut r| {
                    if opts.timing {
                        r.wall_ms = start.elapsed().as_secs_f64() * 1e3;
                    }
                    r
                });
                if result.is_err() {
                    failed.store(true, Ordering::Relaxed);
                }
                slots.lock().expect("no worker panics while holding the lock")[i] = Some(result);
            });
        }
    });

    let mut reports = Vec::with_capacity(cells.len());
    for slot in slots.into_inner().expect("workers have finished") {
        match slot {
            Some(Ok(r)) => reports.push(r),
            Some(Err(e)) => return Err(e),
            // Skipped after an earlier failure; that failure comes first.
            None => continue,
        }
    }
    let summary = summarize(&reports, cfg.theoretical());
    Ok((reports, summary))
}
