//! Building-block interpreters over the property tree and the classic
//! generate-then-shrink runner.

use std::time::Instant;

use crate::env::Env;
use crate::error::{Error, Result};
use crate::prop::PropTree;
use crate::report::{RunResult, RunnerReport};
use crate::rng::SplitMix64;

/// Per-trial verdict used by the loop fast path; the environment lives in a
/// caller-owned scratch buffer.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Verdict {
    Pass,
    Fail,
    Discard,
}

/// One generate-and-check walk down the spine. `env` must come in empty and
/// holds the generated prefix when the walk stops.
pub(crate) fn run_trial(
    p: &PropTree,
    rng: &mut SplitMix64,
    size: u64,
    env: &mut Env,
) -> Result<Verdict> {
    let mut node = p;
    loop {
        match node {
            PropTree::Forall {
                name,
                annotations,
                body,
            } => {
                let generate = annotations
                    .generator
                    .as_ref()
                    .ok_or_else(|| Error::NoGenerator(name.to_string()))?;
                let value = generate.sample(env, rng, size);
                if let Some(contract) = &annotations.contract {
                    if !contract(env, &value) {
                        return Err(Error::ContractViolation {
                            name: name.to_string(),
                            value: format!("{value:?}"),
                        });
                    }
                }
                // Names are unique by construction of the tree.
                env.bind_unchecked(name.clone(), value);
                node = body;
            }
            PropTree::Implies { precondition, body } => {
                if !precondition(env) {
                    return Ok(Verdict::Discard);
                }
                node = body;
            }
            PropTree::Check { predicate } => {
                return Ok(if predicate(env) {
                    Verdict::Pass
                } else {
                    Verdict::Fail
                });
            }
        }
    }
}

/// Generates inputs for every quantifier and runs the property once.
pub fn gen_and_run(p: &PropTree, rng: &mut SplitMix64, size: u64) -> Result<RunResult> {
    let mut env = Env::with_capacity(p.quantifier_count());
    let verdict = run_trial(p, rng, size, &mut env)?;
    Ok(match verdict {
        Verdict::Pass => RunResult::Normal { env, truth: true },
        Verdict::Fail => RunResult::Normal { env, truth: false },
        Verdict::Discard => RunResult::Discard { env },
    })
}

/// Re-runs the property on a fixed environment, e.g. while shrinking.
/// `env` must bind every quantifier name; values are pulled by name so the
/// verdict matches what `gen_and_run` would produce for those inputs.
pub fn run_on(p: &PropTree, env: &Env) -> Result<RunResult> {
    let mut prefix = Env::with_capacity(env.len());
    let mut node = p;
    loop {
        match node {
            PropTree::Forall {
                name,
                annotations,
                body,
            } => {
                let value = env.get(name)?.clone();
                if let Some(contract) = &annotations.contract {
                    if !contract(&prefix, &value) {
                        return Err(Error::ContractViolation {
                            name: name.to_string(),
                            value: format!("{value:?}"),
                        });
                    }
                }
                prefix.bind(name.clone(), value)?;
                node = body;
            }
            PropTree::Implies { precondition, body } => {
                if !precondition(&prefix) {
                    return Ok(RunResult::Discard { env: prefix });
                }
                node = body;
            }
            PropTree::Check { predicate } => {
                let truth = predicate(&prefix);
                return Ok(RunResult::Normal { env: prefix, truth });
            }
        }
    }
}

/// Renders an environment for counterexample reports: one line per binding,
/// `name = <printed value>`, outermost quantifier first. Falls back to the
/// value's tagged debug form when a variable has no printer annotation.
pub fn print_env(p: &PropTree, env: &Env) -> String {
    let mut lines = Vec::with_capacity(env.len());
    for (k, name) in p.names().iter().enumerate() {
        let Some(value) = env.lookup(name) else {
            continue;
        };
        let rendered = match p.annotations_at(k).and_then(|(_, a)| a.printer.clone()) {
            Some(printer) => printer(&env.prefix(k), value),
            None => format!("{value:?}"),
        };
        lines.push(format!("{name} = {rendered}"));
    }
    lines.join("\n")
}

/// Default shrink size metric: the printed length of the environment.
pub fn printed_size(p: &PropTree, env: &Env) -> u64 {
    print_env(p, env).len() as u64
}

/// Result of a shrink search.
#[derive(Clone, Debug)]
pub struct ShrinkOutcome {
    pub env: Env,
    /// Number of accepted shrink steps.
    pub accepted: u64,
    /// True when the step budget ran out before a local minimum was reached.
    pub budget_exhausted: bool,
}

/// Best-first counterexample minimization, with a caller-supplied size
/// metric.
///
/// Each round computes every single-variable shrink candidate (one
/// variable's shrinker applied to its value, other bindings fixed), orders
/// them by the metric, and accepts the smallest candidate that still
/// falsifies the property. Candidates that pass, discard, or violate a
/// contract are rejected. The search stops at a local minimum or after
/// `rounds` accepted steps per variable.
pub fn shrink_loop_with(
    rounds: u64,
    p: &PropTree,
    env0: Env,
    metric: &dyn Fn(&PropTree, &Env) -> u64,
) -> Result<ShrinkOutcome> {
    match run_on(p, &env0)? {
        RunResult::Normal { truth: false, .. } => {}
        RunResult::Normal { truth: true, .. } => {
            return Err(Error::ShrinkOnNonFailing("passing"));
        }
        RunResult::Discard { .. } => return Err(Error::ShrinkOnNonFailing("discarded")),
    }

    let vars = p.names();
    let budget = rounds.saturating_mul(vars.len().max(1) as u64);
    let mut current = env0;
    let mut current_size = metric(p, &current);
    let mut accepted = 0u64;

    'search: while accepted < budget {
        let mut candidates: Vec<(u64, usize, Env)> = Vec::new();
        for (k, name) in vars.iter().enumerate() {
            let Some((_, annotations)) = p.annotations_at(k) else {
                continue;
            };
            let Some(shrinker) = &annotations.shrinker else {
                continue;
            };
            let prefix = current.prefix(k);
            let value = current.get(name)?;
            for candidate_value in shrinker(&prefix, value) {
                let mut candidate = current.clone();
                candidate.set(name, candidate_value)?;
                let size = metric(p, &candidate);
                // The metric never increases across accepted steps.
                if size <= current_size {
                    let order = candidates.len();
                    candidates.push((size, order, candidate));
                }
            }
        }
        candidates.sort_by_key(|(size, order, _)| (*size, *order));

        for (size, _, candidate) in candidates {
            match run_on(p, &candidate) {
                Ok(result) => {
                    if result.is_falsifying() {
                        current = candidate;
                        current_size = size;
                        accepted += 1;
                        continue 'search;
                    }
                }
                // A candidate outside its contract is not a valid input;
                // reject it and keep searching.
                Err(Error::ContractViolation { .. }) => {}
                Err(e) => return Err(e),
            }
        }
        // No candidate falsifies: local minimum.
        return Ok(ShrinkOutcome {
            env: current,
            accepted,
            budget_exhausted: false,
        });
    }

    Ok(ShrinkOutcome {
        env: current,
        accepted,
        budget_exhausted: true,
    })
}

/// Best-first shrink with the default printed-size metric.
///
/// Requires that `env0` falsifies the property; returns an environment that
/// still falsifies it and is no larger under the metric.
pub fn shrink_loop(rounds: u64, p: &PropTree, env0: Env) -> Result<Env> {
    Ok(shrink_loop_with(rounds, p, env0, &printed_size)?.env)
}

/// Options shared by the campaign loops.
#[derive(Clone, Debug)]
pub struct RunOpts {
    /// Accepted-shrink-step budget per variable; 0 disables shrinking.
    pub shrink_rounds: u64,
    /// Optional cap on discarded trials; off by default, so discards only
    /// consume fuel.
    pub discard_cap: Option<u64>,
    /// Optional wallclock cutoff for the whole loop.
    pub deadline: Option<Instant>,
}

impl Default for RunOpts {
    fn default() -> Self {
        RunOpts {
            shrink_rounds: 10,
            discard_cap: None,
            deadline: None,
        }
    }
}

/// The classic generate-and-check loop: runs up to `fuel` trials, stopping
/// early at the first falsification, which is then shrunk and printed.
/// Discards consume fuel. The failing trial counts towards `passed`.
pub fn run_loop(
    fuel: u64,
    p: &PropTree,
    rng: &mut SplitMix64,
    size_policy: impl Fn(u64, u64) -> u64,
) -> Result<RunnerReport> {
    run_loop_opts(fuel, p, rng, size_policy, &RunOpts::default())
}

pub fn run_loop_opts(
    fuel: u64,
    p: &PropTree,
    rng: &mut SplitMix64,
    size_policy: impl Fn(u64, u64) -> u64,
    opts: &RunOpts,
) -> Result<RunnerReport> {
    let start = Instant::now();
    let mut passed = 0u64;
    let mut discards = 0u64;
    let mut scratch = Env::with_capacity(p.quantifier_count());

    for _ in 0..fuel {
        if let Some(deadline) = opts.deadline {
            if Instant::now() >= deadline {
                break;
            }
        }
        if let Some(cap) = opts.discard_cap {
            if discards >= cap {
                break;
            }
        }
        let size = size_policy(passed, discards);
        scratch.clear();
        match run_trial(p, rng, size, &mut scratch)? {
            Verdict::Pass => passed += 1,
            Verdict::Discard => discards += 1,
            Verdict::Fail => {
                passed += 1;
                let time_to_fail = start.elapsed();
                let shrink_start = Instant::now();
                let shrunk = shrink_loop(opts.shrink_rounds, p, scratch.clone())?;
                let shrink_time = shrink_start.elapsed();
                let printed = print_env(p, &shrunk);
                return Ok(RunnerReport {
                    foundbug: true,
                    passed,
                    discards,
                    counterexample: Some(printed),
                    counterexample_env: Some(shrunk),
                    wallclock: start.elapsed(),
                    time_to_fail: Some(time_to_fail),
                    shrink_time: Some(shrink_time),
                });
            }
        }
    }

    Ok(RunnerReport {
        foundbug: false,
        passed,
        discards,
        counterexample: None,
        counterexample_env: None,
        wallclock: start.elapsed(),
        time_to_fail: None,
        shrink_time: None,
    })
}
