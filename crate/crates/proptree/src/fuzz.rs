//! Feedback-driven runners: the instrumented fuzzing loop and the
//! explicit-feedback targeted loop.

use std::time::Instant;

use crate::env::Env;
use crate::error::{Error, Result};
use crate::gen::mutate_value;
use crate::pool::{Directive, Feedback, SeedPool, Utility};
use crate::prop::PropTree;
use crate::report::{RunResult, RunnerReport};
use crate::rng::SplitMix64;
use crate::runner::{print_env, run_on, shrink_loop, RunOpts};

/// Observes a property execution and reduces what it saw to a feedback
/// score. Hooks default to no-ops so probes implement only what they need.
pub trait Probe: Send {
    /// Called before each run.
    fn reset(&mut self) {}
    /// Called after each precondition evaluation.
    fn on_precondition(&mut self, _env: &Env, _holds: bool) {}
    /// Called after the final predicate evaluation.
    fn on_check(&mut self, _env: &Env, _outcome: bool) {}
    /// The feedback for the finished run; consulted even on discards.
    fn feedback(&self, result: &RunResult) -> Feedback;
}

/// Counts predicate and precondition evaluations.
#[derive(Default)]
pub struct CheckCounter {
    count: i64,
}

impl Probe for CheckCounter {
    fn reset(&mut self) {
        self.count = 0;
    }

    fn on_precondition(&mut self, _env: &Env, _holds: bool) {
        self.count += 1;
    }

    fn on_check(&mut self, _env: &Env, _outcome: bool) {
        self.count += 1;
    }

    fn feedback(&self, _result: &RunResult) -> Feedback {
        self.count
    }
}

/// Fixed feedback regardless of what ran; makes a fuzzing loop degenerate
/// to pure generation under a strict usefulness judgment.
pub struct ConstantProbe(pub Feedback);

impl Probe for ConstantProbe {
    fn feedback(&self, _result: &RunResult) -> Feedback {
        self.0
    }
}

/// Scores the finished run's environment with a user function, in the
/// style of customizable-feedback fuzzers.
pub struct EnvProbe<F>(pub F);

impl<F: Fn(&Env) -> Feedback + Send> Probe for EnvProbe<F> {
    fn feedback(&self, result: &RunResult) -> Feedback {
        (self.0)(result.env())
    }
}

/// Where the inputs of an instrumented run come from.
pub enum EnvSource<'a> {
    /// Sample every generator annotation at this size.
    Generate { size: u64 },
    /// Replay a fixed environment, e.g. a mutated seed.
    Fixed(&'a Env),
}

/// Runs the property once while the probe observes execution. The feedback
/// is computed for every outcome, including discards.
pub fn instrumented_run(
    p: &PropTree,
    source: EnvSource<'_>,
    rng: &mut SplitMix64,
    probe: &mut dyn Probe,
) -> Result<(RunResult, Feedback)> {
    probe.reset();
    let mut env = Env::with_capacity(p.quantifier_count());
    let mut node = p;
    let result = loop {
        match node {
            PropTree::Forall {
                name,
                annotations,
                body,
            } => {
                let value = match &source {
                    EnvSource::Generate { size } => {
                        let generate = annotations
                            .generator
                            .as_ref()
                            .ok_or_else(|| Error::NoGenerator(name.to_string()))?;
                        generate.sample(&env, rng, *size)
                    }
                    EnvSource::Fixed(fixed) => fixed.get(name)?.clone(),
                };
                if let Some(contract) = &annotations.contract {
                    if !contract(&env, &value) {
                        return Err(Error::ContractViolation {
                            name: name.to_string(),
                            value: format!("{value:?}"),
                        });
                    }
                }
                env.bind(name.clone(), value)?;
                node = body;
            }
            PropTree::Implies { precondition, body } => {
                let holds = precondition(&env);
                probe.on_precondition(&env, holds);
                if !holds {
                    break RunResult::Discard { env };
                }
                node = body;
            }
            PropTree::Check { predicate } => {
                let truth = predicate(&env);
                probe.on_check(&env, truth);
                break RunResult::Normal { env, truth };
            }
        }
    };
    let feedback = probe.feedback(&result);
    Ok((result, feedback))
}

/// Mutates exactly one variable of `env`, chosen uniformly, using its
/// mutator annotation. The other bindings are untouched.
pub fn mutate_env(
    p: &PropTree,
    env: &Env,
    rng: &mut SplitMix64,
    size: u64,
) -> Result<Env> {
    let names = p.names();
    if names.is_empty() {
        return Ok(env.clone());
    }
    let index = rng.next_below(names.len() as u64) as usize;
    let name = names[index];
    let (_, annotations) = p
        .annotations_at(index)
        .expect("quantifier index within names()");
    let mutator = annotations
        .mutator
        .as_ref()
        .ok_or_else(|| Error::NoMutator(name.to_string()))?;
    let prefix = env.prefix(index);
    let value = env.get(name)?;
    let mutated = mutate_value(mutator, &prefix, value, rng, size);
    let mut out = env.clone();
    out.set(name, mutated)?;
    Ok(out)
}

fn require_mutators(p: &PropTree) -> Result<()> {
    for (k, name) in p.names().iter().enumerate() {
        let (_, annotations) = p.annotations_at(k).expect("annotations for quantifier");
        if annotations.mutator.is_none() {
            return Err(Error::NoMutator(name.to_string()));
        }
    }
    Ok(())
}

fn failure_report(
    p: &PropTree,
    env: Env,
    passed: u64,
    discards: u64,
    start: Instant,
    opts: &RunOpts,
) -> Result<RunnerReport> {
    let time_to_fail = start.elapsed();
    let shrink_start = Instant::now();
    let shrunk = shrink_loop(opts.shrink_rounds, p, env)?;
    let shrink_time = shrink_start.elapsed();
    Ok(RunnerReport {
        foundbug: true,
        passed,
        discards,
        counterexample: Some(print_env(p, &shrunk)),
        counterexample_env: Some(shrunk),
        wallclock: start.elapsed(),
        time_to_fail: Some(time_to_fail),
        shrink_time: Some(shrink_time),
    })
}

fn empty_report(passed: u64, discards: u64, start: Instant) -> RunnerReport {
    RunnerReport {
        foundbug: false,
        passed,
        discards,
        counterexample: None,
        counterexample_env: None,
        wallclock: start.elapsed(),
        time_to_fail: None,
        shrink_time: None,
    }
}

/// Coverage-guided-style fuzzing loop.
///
/// Each iteration asks the pool for a directive, produces an input (fresh
/// or mutated), and runs it under instrumentation. Passing trials with
/// useful feedback are invested; useless trials coming from a mutation cost
/// the seed energy. On a discarded mutation the pool is revised only when
/// the feedback was useless. The first falsification is shrunk and
/// reported.
#[allow(clippy::too_many_arguments)]
pub fn fuzz_loop(
    fuel: u64,
    p: &PropTree,
    pool: &mut dyn SeedPool,
    utility: &dyn Utility,
    probe: &mut dyn Probe,
    rng: &mut SplitMix64,
    size_policy: impl Fn(u64, u64) -> u64,
    opts: &RunOpts,
) -> Result<RunnerReport> {
    require_mutators(p)?;
    let start = Instant::now();
    let mut passed = 0u64;
    let mut discards = 0u64;

    for _ in 0..fuel {
        if let Some(deadline) = opts.deadline {
            if Instant::now() >= deadline {
                break;
            }
        }
        let size = size_policy(passed, discards);
        let directive = pool.sample();
        let (result, feedback) = match &directive {
            Directive::Generate => {
                instrumented_run(p, EnvSource::Generate { size }, rng, probe)?
            }
            Directive::Mutate(source) => {
                let mutated = mutate_env(p, &source.env, rng, size)?;
                instrumented_run(p, EnvSource::Fixed(&mutated), rng, probe)?
            }
        };
        match result {
            RunResult::Normal { env, truth: false } => {
                return failure_report(p, env, passed + 1, discards, start, opts);
            }
            RunResult::Normal { env, truth: true } => {
                passed += 1;
                if utility.useful(&*pool, feedback) {
                    pool.invest(env, feedback);
                } else if directive.is_mutate() {
                    pool.revise();
                }
            }
            RunResult::Discard { .. } => {
                discards += 1;
                if directive.is_mutate() && !utility.useful(&*pool, feedback) {
                    pool.revise();
                }
            }
        }
    }
    Ok(empty_report(passed, discards, start))
}

/// Targeted loop: like [`fuzz_loop`] but the feedback is an explicit
/// function of the completed environment, and discards never touch the
/// pool.
#[allow(clippy::too_many_arguments)]
pub fn target_loop(
    fuel: u64,
    p: &PropTree,
    feedback_fn: &(dyn Fn(&Env) -> Feedback + Sync),
    pool: &mut dyn SeedPool,
    utility: &dyn Utility,
    rng: &mut SplitMix64,
    size_policy: impl Fn(u64, u64) -> u64,
    opts: &RunOpts,
) -> Result<RunnerReport> {
    require_mutators(p)?;
    let start = Instant::now();
    let mut passed = 0u64;
    let mut discards = 0u64;

    for _ in 0..fuel {
        if let Some(deadline) = opts.deadline {
            if Instant::now() >= deadline {
                break;
            }
        }
        let size = size_policy(passed, discards);
        let directive = pool.sample();
        let result = match &directive {
            Directive::Generate => crate::runner::gen_and_run(p, rng, size)?,
            Directive::Mutate(source) => {
                let mutated = mutate_env(p, &source.env, rng, size)?;
                run_on(p, &mutated)?
            }
        };
        match result {
            RunResult::Normal { env, truth: false } => {
                return failure_report(p, env, passed + 1, discards, start, opts);
            }
            RunResult::Normal { env, truth: true } => {
                passed += 1;
                let feedback = feedback_fn(&env);
                if utility.useful(&*pool, feedback) {
                    pool.invest(env, feedback);
                } else if directive.is_mutate() {
                    pool.revise();
                }
            }
            RunResult::Discard { .. } => {
                discards += 1;
            }
        }
    }
    Ok(empty_report(passed, discards, start))
}
