//! Campaign harness CLI: run workload tasks under any runner, aggregate
//! results into bucket charts, and measure shrink quality.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use proptree::bench::{
    buckets_to_csv, emit_buckets, run_campaign, run_campaign_parallel_trials,
    shrink_quality_report, BucketRule, CampaignConfig, RunnerKind, TaskRef, TrialRecord,
};

#[derive(Parser)]
#[command(name = "pbt", about = "Property-based testing campaign harness", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a testing campaign on one task and emit one JSON line per trial.
    Run(RunArgs),
    /// Aggregate JSON-lines results into a solve-time bucket chart.
    Buckets(BucketArgs),
    /// Measure how much the external shrinker reduces counterexamples.
    ShrinkReport(ShrinkArgs),
}

#[derive(Args)]
struct TaskArgs {
    /// Workload id: bst, rbt, or stlc.
    #[arg(long)]
    workload: String,
    /// Mutant id: none, a descriptive id, or M<k>.
    #[arg(long, default_value = "none")]
    mutant: String,
    /// Property id within the workload.
    #[arg(long)]
    property: String,
    /// Generator strategy: bespoke or type-based.
    #[arg(long, default_value = "bespoke")]
    strategy: String,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    task: TaskArgs,
    /// Runner: generate, fuzz, target, parallel, or combinatorial.
    #[arg(long, default_value = "generate")]
    runner: String,
    /// Seed pool variant (fuzz/target only).
    #[arg(long)]
    pool: Option<String>,
    /// Seed energy: 1, 10, 100, or 1000 (fuzz/target only).
    #[arg(long)]
    energy: Option<u64>,
    /// Worker threads (parallel only); defaults to available parallelism.
    #[arg(long)]
    workers: Option<usize>,
    /// Candidates per iteration (combinatorial only).
    #[arg(long)]
    candidates: Option<usize>,
    /// Maximum number of trials to execute per campaign.
    #[arg(long, default_value_t = 100_000)]
    fuel: u64,
    /// Per-trial wallclock bound in seconds.
    #[arg(long)]
    time_limit: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Independent repetitions with seeds seed, seed+1, ...
    #[arg(long, default_value_t = 1)]
    trials: u32,
    /// Accepted-shrink budget per variable; 0 disables shrinking.
    #[arg(long, default_value_t = 10)]
    shrink_rounds: u64,
    /// Run the independent trials on separate threads.
    #[arg(long)]
    parallel_trials: bool,
    /// Output file for JSON-lines records; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BucketArgs {
    /// Aggregation rule: mean or any.
    #[arg(long, default_value = "any")]
    rule: String,
    /// Output format: csv or json.
    #[arg(long, default_value = "csv")]
    format: String,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON-lines files produced by `pbt run`.
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
}

#[derive(Args)]
struct ShrinkArgs {
    #[command(flatten)]
    task: TaskArgs,
    #[arg(long, default_value_t = 100_000)]
    fuel: u64,
    #[arg(long)]
    time_limit: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Trials to attempt; only falsifying trials contribute measurements.
    #[arg(long, default_value_t = 20)]
    trials: u32,
    /// Accepted-shrink budget per variable; 0 disables shrinking.
    #[arg(long, default_value_t = 10)]
    rounds: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn write_output(out: &Option<PathBuf>, content: &str) -> proptree::Result<()> {
    match out {
        Some(path) => std::fs::write(path, content)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(content.as_bytes())?;
        }
    }
    Ok(())
}

fn campaign_config(args: &RunArgs) -> proptree::Result<CampaignConfig> {
    Ok(CampaignConfig {
        task: TaskRef::new(
            args.task.workload.clone(),
            args.task.mutant.clone(),
            args.task.property.clone(),
        ),
        runner: RunnerKind::parse(&args.runner)?,
        strategy: args.task.strategy.clone(),
        pool: args.pool.clone(),
        energy: args.energy,
        workers: args.workers,
        candidates: args.candidates,
        fuel: args.fuel,
        time_limit: args.time_limit,
        seed: args.seed,
        trials: args.trials,
        shrink_rounds: args.shrink_rounds,
    })
}

fn cmd_run(args: RunArgs) -> proptree::Result<()> {
    let config = campaign_config(&args)?;
    config.validate()?;
    let outcome = if args.parallel_trials {
        run_campaign_parallel_trials(&config)?
    } else {
        run_campaign(&config)?
    };
    let mut lines = String::new();
    for record in &outcome.records {
        lines.push_str(&record.to_json());
        lines.push('\n');
    }
    write_output(&args.out, &lines)?;
    let solved = outcome.records.iter().filter(|r| r.foundbug).count();
    eprintln!(
        "{}: {}/{} trials found a bug",
        outcome.records[0].task,
        solved,
        outcome.records.len()
    );
    Ok(())
}

fn cmd_buckets(args: BucketArgs) -> proptree::Result<()> {
    let rule = BucketRule::parse(&args.rule)?;
    let mut records: Vec<TrialRecord> = Vec::new();
    for path in &args.inputs {
        let text = std::fs::read_to_string(path)?;
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            records.push(TrialRecord::from_json(line)?);
        }
    }
    let rows = emit_buckets(&records, rule);
    let content = match args.format.as_str() {
        "csv" => buckets_to_csv(&rows),
        "json" => {
            let mut s = serde_json::to_string_pretty(&rows).expect("bucket rows serialize");
            s.push('\n');
            s
        }
        other => {
            return Err(proptree::Error::Config(format!(
                "unknown format `{other}`"
            )))
        }
    };
    write_output(&args.out, &content)
}

fn cmd_shrink_report(args: ShrinkArgs) -> proptree::Result<()> {
    let config = CampaignConfig {
        task: TaskRef::new(
            args.task.workload.clone(),
            args.task.mutant.clone(),
            args.task.property.clone(),
        ),
        runner: RunnerKind::Generate,
        strategy: args.task.strategy.clone(),
        pool: None,
        energy: None,
        workers: None,
        candidates: None,
        fuel: args.fuel,
        time_limit: args.time_limit,
        seed: args.seed,
        trials: args.trials,
        shrink_rounds: args.rounds,
    };
    let stats = shrink_quality_report(&config)?;
    let mut json = serde_json::to_string_pretty(&stats).expect("shrink stats serialize");
    json.push('\n');
    write_output(&args.out, &json)?;
    eprintln!(
        "{} measurements, mean ratio {:.2}, stddev {:.2}",
        stats.trials.len(),
        stats.mean_ratio,
        stats.stddev_ratio
    );
    Ok(())
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Buckets(args) => cmd_buckets(args),
        Command::ShrinkReport(args) => cmd_shrink_report(args),
    };
    // Exit 0 means the campaign completed, bugs found or not; nonzero is a
    // harness error.
    if let Err(e) = result {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
