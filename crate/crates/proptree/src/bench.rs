//! Campaign harness: run a task under any runner configuration, repeat
//! trials with derived seeds, and emit machine-readable results (JSON
//! lines per trial, bucket summaries, shrink-quality statistics).

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::combinatorial::combinatorial_loop;
use crate::env::Env;
use crate::error::{Error, Result};
use crate::fuzz::{fuzz_loop, target_loop, EnvProbe};
use crate::gen::default_size;
use crate::parallel::parallel_run_loop;
use crate::pool::{make_pool, EnergySchedule, PoolKind, StrictImprovement, ENERGY_LEVELS};
use crate::prop::PropTree;
use crate::report::{RunResult, RunnerReport};
use crate::rng::SplitMix64;
use crate::runner::{gen_and_run, printed_size, run_loop_opts, shrink_loop_with, RunOpts};
use crate::workloads::{self, GenStrategy, Workload};

pub const SCHEMA_VERSION: u32 = 1;

/// A (workload, mutant, property) triple.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskRef {
    pub workload: String,
    pub mutant: String,
    pub property: String,
}

impl TaskRef {
    pub fn new(
        workload: impl Into<String>,
        mutant: impl Into<String>,
        property: impl Into<String>,
    ) -> TaskRef {
        TaskRef {
            workload: workload.into(),
            mutant: mutant.into(),
            property: property.into(),
        }
    }

    pub fn id(&self) -> String {
        format!("{}/{}/{}", self.workload, self.mutant, self.property)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunnerKind {
    Generate,
    Fuzz,
    Target,
    Parallel,
    Combinatorial,
}

impl RunnerKind {
    pub fn name(&self) -> &'static str {
        match self {
            RunnerKind::Generate => "generate",
            RunnerKind::Fuzz => "fuzz",
            RunnerKind::Target => "target",
            RunnerKind::Parallel => "parallel",
            RunnerKind::Combinatorial => "combinatorial",
        }
    }

    pub fn parse(s: &str) -> Result<RunnerKind> {
        match s {
            "generate" => Ok(RunnerKind::Generate),
            "fuzz" => Ok(RunnerKind::Fuzz),
            "target" => Ok(RunnerKind::Target),
            "parallel" => Ok(RunnerKind::Parallel),
            "combinatorial" => Ok(RunnerKind::Combinatorial),
            other => Err(Error::Config(format!("unknown runner `{other}`"))),
        }
    }

    fn uses_pool(&self) -> bool {
        matches!(self, RunnerKind::Fuzz | RunnerKind::Target)
    }
}

impl std::fmt::Display for RunnerKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Full description of a campaign. Runner-specific fields are validated:
/// pools and energy belong to the feedback-guided runners, workers to the
/// parallel runner, candidates to the combinatorial one.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CampaignConfig {
    pub task: TaskRef,
    pub runner: RunnerKind,
    #[serde(default = "default_strategy")]
    pub strategy: String,
    #[serde(default)]
    pub pool: Option<String>,
    #[serde(default)]
    pub energy: Option<u64>,
    #[serde(default)]
    pub workers: Option<usize>,
    #[serde(default)]
    pub candidates: Option<usize>,
    pub fuel: u64,
    /// Per-trial wallclock bound in seconds.
    #[serde(default)]
    pub time_limit: Option<f64>,
    pub seed: u64,
    #[serde(default = "default_trials")]
    pub trials: u32,
    #[serde(default = "default_shrink_rounds")]
    pub shrink_rounds: u64,
}

fn default_strategy() -> String {
    "bespoke".to_string()
}

fn default_trials() -> u32 {
    1
}

fn default_shrink_rounds() -> u64 {
    10
}

/// Everything `run_campaign` needs, resolved and validated.
struct ResolvedCampaign {
    workload: &'static Workload,
    prop: PropTree,
    runner: RunnerKind,
    pool: PoolKind,
    energy: u64,
    workers: usize,
    candidates: usize,
}

impl CampaignConfig {
    pub fn validate(&self) -> Result<ResolvedConfig> {
        let workload = workloads::by_name(&self.task.workload)?;
        let strategy = GenStrategy::parse(&self.strategy)?;
        let mutant = workload.canonical_mutant(&self.task.mutant)?;
        if !workload.property_ids().contains(&self.task.property.as_str()) {
            return Err(Error::UnknownProperty(self.task.property.clone()));
        }

        if !self.runner.uses_pool() {
            if self.pool.is_some() {
                return Err(Error::Config(format!(
                    "--pool only applies to the fuzz and target runners, not `{}`",
                    self.runner
                )));
            }
            if self.energy.is_some() {
                return Err(Error::Config(format!(
                    "--energy only applies to the fuzz and target runners, not `{}`",
                    self.runner
                )));
            }
        }
        if self.workers.is_some() && self.runner != RunnerKind::Parallel {
            return Err(Error::Config(
                "--workers only applies to the parallel runner".to_string(),
            ));
        }
        if self.candidates.is_some() && self.runner != RunnerKind::Combinatorial {
            return Err(Error::Config(
                "--candidates only applies to the combinatorial runner".to_string(),
            ));
        }

        let pool = match &self.pool {
            Some(name) => PoolKind::parse(name)?,
            None => PoolKind::Heap,
        };
        let energy = self.energy.unwrap_or(100);
        if !ENERGY_LEVELS.contains(&energy) {
            return Err(Error::Config(format!(
                "energy must be one of {ENERGY_LEVELS:?}, got {energy}"
            )));
        }
        let workers = match self.workers {
            Some(0) => return Err(Error::Config("--workers must be at least 1".to_string())),
            Some(n) => n,
            None => std::thread::available_parallelism().map_or(1, |n| n.get()),
        };
        let candidates = match self.candidates {
            Some(0) => {
                return Err(Error::Config("--candidates must be at least 1".to_string()))
            }
            Some(k) => k,
            None => 5,
        };
        if self.trials == 0 {
            return Err(Error::Config("--trials must be at least 1".to_string()));
        }

        Ok(ResolvedConfig {
            workload,
            strategy,
            mutant,
            pool,
            energy,
            workers,
            candidates,
        })
    }
}

/// Validation output: the workload plus fully defaulted runner knobs.
pub struct ResolvedConfig {
    pub workload: &'static Workload,
    pub strategy: GenStrategy,
    pub mutant: String,
    pub pool: PoolKind,
    pub energy: u64,
    pub workers: usize,
    pub candidates: usize,
}

/// One output line per trial. The `time_ms` field is the wallclock until
/// falsification (before shrinking) for solved trials, and the whole trial
/// wallclock otherwise; `shrink_ms` is reported separately so either
/// accounting can be reconstructed.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrialRecord {
    pub schema: u32,
    pub task: String,
    pub runner: String,
    pub seed: u64,
    pub foundbug: bool,
    pub passed: u64,
    pub discards: u64,
    pub time_ms: f64,
    pub shrink_ms: Option<f64>,
    pub counterexample: Option<String>,
}

impl TrialRecord {
    fn from_report(task: &TaskRef, runner: RunnerKind, seed: u64, report: &RunnerReport) -> Self {
        let solved_at = report.time_to_fail.unwrap_or(report.wallclock);
        TrialRecord {
            schema: SCHEMA_VERSION,
            task: task.id(),
            runner: runner.name().to_string(),
            seed,
            foundbug: report.foundbug,
            passed: report.passed,
            discards: report.discards,
            time_ms: duration_ms(solved_at),
            shrink_ms: report.shrink_time.map(duration_ms),
            counterexample: report.counterexample.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("trial records serialize")
    }

    pub fn from_json(line: &str) -> Result<TrialRecord> {
        Ok(serde_json::from_str(line)?)
    }
}

fn duration_ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

pub struct CampaignOutcome {
    pub reports: Vec<RunnerReport>,
    pub records: Vec<TrialRecord>,
}

fn run_one_trial(config: &CampaignConfig, resolved: &ResolvedCampaign, seed: u64) -> Result<RunnerReport> {
    let opts = RunOpts {
        shrink_rounds: config.shrink_rounds,
        discard_cap: None,
        deadline: config
            .time_limit
            .map(|secs| Instant::now() + Duration::from_secs_f64(secs)),
    };
    let mut rng = SplitMix64::new(seed);
    match resolved.runner {
        RunnerKind::Generate => {
            run_loop_opts(config.fuel, &resolved.prop, &mut rng, default_size, &opts)
        }
        RunnerKind::Fuzz => {
            let mut pool = make_pool(resolved.pool, EnergySchedule::new(resolved.energy));
            let feedback = resolved.workload.feedback_fn();
            let mut probe = EnvProbe(move |env: &Env| feedback(env));
            fuzz_loop(
                config.fuel,
                &resolved.prop,
                pool.as_mut(),
                &StrictImprovement,
                &mut probe,
                &mut rng,
                default_size,
                &opts,
            )
        }
        RunnerKind::Target => {
            let mut pool = make_pool(resolved.pool, EnergySchedule::new(resolved.energy));
            let feedback = resolved.workload.feedback_fn();
            target_loop(
                config.fuel,
                &resolved.prop,
                &feedback,
                pool.as_mut(),
                &StrictImprovement,
                &mut rng,
                default_size,
                &opts,
            )
        }
        RunnerKind::Parallel => {
            parallel_run_loop(config.fuel, &resolved.prop, resolved.workers, seed, &opts)
        }
        RunnerKind::Combinatorial => {
            let extractors = resolved.workload.extractors();
            combinatorial_loop(
                config.fuel,
                &resolved.prop,
                resolved.candidates,
                &extractors,
                &mut rng,
                default_size,
                &opts,
            )
        }
    }
}

/// Runs `trials` independent trials with derived seeds `seed + i`, each
/// bounded by the configured time limit. Deterministic modulo the time
/// fields.
pub fn run_campaign(config: &CampaignConfig) -> Result<CampaignOutcome> {
    run_campaign_inner(config, false)
}

/// Like [`run_campaign`] but trials execute on separate threads. Safe
/// because trials share no mutable state; records stay in trial order.
pub fn run_campaign_parallel_trials(config: &CampaignConfig) -> Result<CampaignOutcome> {
    run_campaign_inner(config, true)
}

fn run_campaign_inner(config: &CampaignConfig, parallel_trials: bool) -> Result<CampaignOutcome> {
    let resolved_cfg = config.validate()?;
    let task = TaskRef {
        workload: config.task.workload.clone(),
        mutant: resolved_cfg.mutant.clone(),
        property: config.task.property.clone(),
    };
    let prop = resolved_cfg.workload.property(
        &task.property,
        &task.mutant,
        resolved_cfg.strategy,
    )?;
    let resolved = ResolvedCampaign {
        workload: resolved_cfg.workload,
        prop,
        runner: config.runner,
        pool: resolved_cfg.pool,
        energy: resolved_cfg.energy,
        workers: resolved_cfg.workers,
        candidates: resolved_cfg.candidates,
    };

    let seeds: Vec<u64> = (0..config.trials).map(|i| config.seed + i as u64).collect();
    let reports: Vec<RunnerReport> = if parallel_trials {
        let resolved_ref = &resolved;
        let slots: Vec<Result<RunnerReport>> = std::thread::scope(|scope| {
            let handles: Vec<_> = seeds
                .iter()
                .map(|&seed| scope.spawn(move || run_one_trial(config, resolved_ref, seed)))
                .collect();
            handles
                .into_iter()
                .map(|h| match h.join() {
                    Ok(r) => r,
                    Err(_) => Err(Error::Config("trial worker panicked".to_string())),
                })
                .collect()
        });
        slots.into_iter().collect::<Result<Vec<_>>>()?
    } else {
        seeds
            .iter()
            .map(|&seed| run_one_trial(config, &resolved, seed))
            .collect::<Result<Vec<_>>>()?
    };

    let records = seeds
        .iter()
        .zip(&reports)
        .map(|(&seed, report)| TrialRecord::from_report(&task, config.runner, seed, report))
        .collect();
    Ok(CampaignOutcome { reports, records })
}

/// Time buckets for solve-time charts, in seconds.
pub const BUCKET_BOUNDS: [f64; 4] = [0.1, 1.0, 10.0, 60.0];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BucketRule {
    /// A task's bucket holds the mean time of its trials; any unsolved
    /// trial makes the task unsolved.
    Mean,
    /// A task is bucketed by its fastest trial; unsolved only when no
    /// trial solved it.
    Any,
}

impl BucketRule {
    pub fn parse(s: &str) -> Result<BucketRule> {
        match s {
            "mean" => Ok(BucketRule::Mean),
            "any" => Ok(BucketRule::Any),
            other => Err(Error::Config(format!("unknown bucket rule `{other}`"))),
        }
    }
}

fn bucket_label(seconds: f64) -> String {
    for bound in BUCKET_BOUNDS {
        if seconds <= bound {
            return format!("<={bound}s");
        }
    }
    "unsolved".to_string()
}

/// One bucket-chart row.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BucketRow {
    pub task: String,
    pub bucket: String,
    pub mean_time: Option<f64>,
    pub solve_rate: f64,
}

/// Aggregates trial records into one row per task.
pub fn emit_buckets(records: &[TrialRecord], rule: BucketRule) -> Vec<BucketRow> {
    let mut by_task: std::collections::BTreeMap<&str, Vec<&TrialRecord>> = Default::default();
    for record in records {
        by_task.entry(&record.task).or_default().push(record);
    }
    by_task
        .into_iter()
        .map(|(task, trials)| {
            let solved: Vec<f64> = trials
                .iter()
                .filter(|t| t.foundbug)
                .map(|t| t.time_ms / 1e3)
                .collect();
            let solve_rate = solved.len() as f64 / trials.len() as f64;
            let mean_time = if solved.is_empty() {
                None
            } else {
                Some(solved.iter().sum::<f64>() / solved.len() as f64)
            };
            let bucket = match rule {
                BucketRule::Mean => {
                    if solved.len() == trials.len() {
                        bucket_label(mean_time.expect("nonempty"))
                    } else {
                        "unsolved".to_string()
                    }
                }
                BucketRule::Any => match solved.iter().cloned().reduce(f64::min) {
                    Some(best) => bucket_label(best),
                    None => "unsolved".to_string(),
                },
            };
            BucketRow {
                task: task.to_string(),
                bucket,
                mean_time,
                solve_rate,
            }
        })
        .collect()
}

pub fn buckets_to_csv(rows: &[BucketRow]) -> String {
    let mut out = String::from("task,bucket,mean_time,solve_rate\n");
    for row in rows {
        let mean = row
            .mean_time
            .map(|t| format!("{t:.6}"))
            .unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{}\n",
            row.task, row.bucket, mean, row.solve_rate
        ));
    }
    out
}

/// Per-trial shrink measurement: sizes are the printed length of the
/// environment, the same metric the shrinker minimizes.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ShrinkTrial {
    pub seed: u64,
    pub original_size: u64,
    pub shrunk_size: u64,
    pub ratio: f64,
    pub outcome: String,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct ShrinkStats {
    pub trials: Vec<ShrinkTrial>,
    pub mean_ratio: f64,
    pub stddev_ratio: f64,
    pub smaller: usize,
    pub same: usize,
    pub larger: usize,
    pub failed: usize,
}

/// Runs up to `trials` campaigns; every falsifying trial contributes one
/// before/after shrink measurement. Trials whose search finds no bug are
/// skipped, so the stats may hold fewer entries than `trials`.
pub fn shrink_quality_report(
    config: &CampaignConfig,
) -> Result<ShrinkStats> {
    let resolved = config.validate()?;
    let prop = resolved.workload.property(
        &config.task.property,
        &resolved.mutant,
        resolved.strategy,
    )?;

    let mut stats = ShrinkStats::default();
    for i in 0..config.trials {
        let seed = config.seed + i as u64;
        let mut rng = SplitMix64::new(seed);
        let mut failing: Option<Env> = None;
        let mut passed = 0u64;
        let mut discards = 0u64;
        let deadline = config
            .time_limit
            .map(|secs| Instant::now() + Duration::from_secs_f64(secs));
        for _ in 0..config.fuel {
            if let Some(deadline) = deadline {
                if Instant::now() >= deadline {
                    break;
                }
            }
            let size = default_size(passed, discards);
            match gen_and_run(&prop, &mut rng, size)? {
                RunResult::Normal { env, truth: false } => {
                    failing = Some(env);
                    break;
                }
                RunResult::Normal { .. } => passed += 1,
                RunResult::Discard { .. } => discards += 1,
            }
        }
        let Some(original) = failing else {
            continue;
        };
        let original_size = printed_size(&prop, &original);
        let shrunk = shrink_loop_with(config.shrink_rounds, &prop, original, &printed_size)?;
        let shrunk_size = printed_size(&prop, &shrunk.env);
        let ratio = original_size as f64 / (shrunk_size.max(1)) as f64;
        let outcome = match shrunk_size.cmp(&original_size) {
            std::cmp::Ordering::Less => "smaller",
            std::cmp::Ordering::Equal => "same",
            std::cmp::Ordering::Greater => "larger",
        };
        match outcome {
            "smaller" => stats.smaller += 1,
            "same" => stats.same += 1,
            _ => stats.larger += 1,
        }
        stats.trials.push(ShrinkTrial {
            seed,
            original_size,
            shrunk_size,
            ratio,
            outcome: outcome.to_string(),
        });
    }

    let n = stats.trials.len();
    if n > 0 {
        let mean = stats.trials.iter().map(|t| t.ratio).sum::<f64>() / n as f64;
        let variance = stats
            .trials
            .iter()
            .map(|t| (t.ratio - mean).powi(2))
            .sum::<f64>()
            / n as f64;
        stats.mean_ratio = mean;
        stats.stddev_ratio = variance.sqrt();
    }
    Ok(stats)
}

/// Re-prints a report's counterexample for campaign summaries.
pub fn summarize(report: &RunnerReport) -> String {
    if report.foundbug {
        format!(
            "foundbug after {} passed / {} discarded:\n{}",
            report.passed,
            report.discards,
            report.counterexample.as_deref().unwrap_or("")
        )
    } else {
        format!(
            "no bug found ({} passed, {} discarded)",
            report.passed, report.discards
        )
    }
}
