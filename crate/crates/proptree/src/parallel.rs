//! Parallel campaign runner: N workers share one atomic trial counter and
//! one found-counterexample flag; everything else is worker-local.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::Instant;

use crate::env::Env;
use crate::error::{Error, Result};
use crate::gen::trial_size;
use crate::prop::PropTree;
use crate::report::RunnerReport;
use crate::rng::SplitMix64;
use crate::runner::{print_env, run_trial, shrink_loop, RunOpts, Verdict};

/// The two shared atoms of a campaign. Abstracted behind a trait so tests
/// can drive workers under a deterministic scheduler.
pub(crate) trait CampaignSync: Sync {
    /// Hands out the next global trial number.
    fn fetch_trial(&self) -> u64;
    fn found(&self) -> bool;
    fn set_found(&self);
}

pub(crate) struct AtomicSync {
    counter: AtomicU64,
    flag: AtomicBool,
}

impl AtomicSync {
    pub(crate) fn new() -> Self {
        AtomicSync {
            counter: AtomicU64::new(0),
            flag: AtomicBool::new(false),
        }
    }
}

impl CampaignSync for AtomicSync {
    fn fetch_trial(&self) -> u64 {
        self.counter.fetch_add(1, Ordering::Relaxed)
    }

    fn found(&self) -> bool {
        self.flag.load(Ordering::Relaxed)
    }

    fn set_found(&self) {
        self.flag.store(true, Ordering::Relaxed);
    }
}

#[derive(Debug, Default)]
pub(crate) struct WorkerResult {
    pub passed: u64,
    pub discards: u64,
    pub failure: Option<Env>,
}

/// One worker step: grab a trial number, stop if the budget is spent or
/// another worker found a bug, otherwise run one trial. Returns `true`
/// when the worker is done.
pub(crate) fn worker_step(
    p: &PropTree,
    tests: u64,
    sync: &dyn CampaignSync,
    rng: &mut SplitMix64,
    scratch: &mut Env,
    acc: &mut WorkerResult,
) -> Result<bool> {
    let n = sync.fetch_trial();
    if n >= tests || sync.found() {
        return Ok(true);
    }
    scratch.clear();
    match run_trial(p, rng, trial_size(n), scratch)? {
        Verdict::Pass => acc.passed += 1,
        Verdict::Discard => acc.discards += 1,
        Verdict::Fail => {
            acc.passed += 1;
            acc.failure = Some(scratch.clone());
            sync.set_found();
            return Ok(true);
        }
    }
    Ok(false)
}

fn worker_run(
    p: &PropTree,
    tests: u64,
    sync: &dyn CampaignSync,
    mut rng: SplitMix64,
) -> Result<WorkerResult> {
    let mut acc = WorkerResult::default();
    let mut scratch = Env::with_capacity(p.quantifier_count());
    while !worker_step(p, tests, sync, &mut rng, &mut scratch, &mut acc)? {}
    Ok(acc)
}

/// Deterministic per-worker generator derivation: the i-th child split off
/// the campaign seed.
pub fn worker_rngs(seed: u64, workers: usize) -> Vec<SplitMix64> {
    let mut root = SplitMix64::new(seed);
    (0..workers).map(|_| root.split()).collect()
}

fn merge(results: Vec<WorkerResult>, start: Instant) -> (RunnerReport, Option<Env>) {
    let mut report = RunnerReport {
        wallclock: start.elapsed(),
        ..RunnerReport::default()
    };
    let mut winner = None;
    for r in results {
        report.passed += r.passed;
        report.discards += r.discards;
        if winner.is_none() {
            winner = r.failure;
        }
    }
    report.foundbug = winner.is_some();
    (report, winner)
}

/// Runs up to `tests` trials across `workers` threads. Input sizes follow
/// the globally fetched trial number, so the size progression matches the
/// sequential loop up to interleaving. Workers are cancelled cooperatively
/// through the shared flag; the winning counterexample is shrunk after all
/// workers have joined, single-threaded.
pub fn parallel_run_loop(
    tests: u64,
    p: &PropTree,
    workers: usize,
    seed: u64,
    opts: &RunOpts,
) -> Result<RunnerReport> {
    assert!(workers >= 1, "parallel campaigns need at least one worker");
    let start = Instant::now();
    let sync = AtomicSync::new();
    let rngs = worker_rngs(seed, workers);

    let joined: Vec<std::thread::Result<Result<WorkerResult>>> = std::thread::scope(|scope| {
        let handles: Vec<_> = rngs
            .into_iter()
            .map(|rng| scope.spawn(|| worker_run(p, tests, &sync, rng)))
            .collect();
        handles.into_iter().map(|h| h.join()).collect()
    });

    let mut results = Vec::with_capacity(workers);
    let mut panicked = false;
    for outcome in joined {
        match outcome {
            Ok(Ok(result)) => results.push(result),
            Ok(Err(e)) => return Err(e),
            Err(_) => panicked = true,
        }
    }
    let (mut report, winner) = merge(results, start);
    if panicked {
        return Err(Error::WorkerPanic {
            partial: Box::new(report),
        });
    }

    if let Some(env) = winner {
        report.time_to_fail = Some(start.elapsed());
        let shrink_start = Instant::now();
        let shrunk = shrink_loop(opts.shrink_rounds, p, env)?;
        report.shrink_time = Some(shrink_start.elapsed());
        report.counterexample = Some(print_env(p, &shrunk));
        report.counterexample_env = Some(shrunk);
        report.wallclock = start.elapsed();
    }
    Ok(report)
}
