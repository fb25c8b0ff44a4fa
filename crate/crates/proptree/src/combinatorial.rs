//! Online generator thinning guided by constructor-interaction coverage:
//! draw several candidate inputs per iteration, execute only the one that
//! covers the most unseen constructor pairs.

use std::collections::{HashMap, HashSet};
use std::sync::Arc;
use std::time::Instant;

use crate::env::Env;
use crate::error::{Error, Result};
use crate::prop::PropTree;
use crate::report::RunnerReport;
use crate::rng::SplitMix64;
use crate::runner::{print_env, shrink_loop, RunOpts};
use crate::value::Value;

/// A 2-way constructor interaction: parent constructor, child constructor,
/// and the child's position under the parent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Feature {
    pub parent: &'static str,
    pub child: &'static str,
    pub position: usize,
}

impl Feature {
    pub fn new(parent: &'static str, child: &'static str, position: usize) -> Feature {
        Feature {
            parent,
            child,
            position,
        }
    }
}

type ExtractorFn = Arc<dyn Fn(&Value) -> Vec<Feature> + Send + Sync>;

/// Per-type-tag feature extractors. Values whose tag has no extractor
/// contribute no features.
#[derive(Clone, Default)]
pub struct FeatureExtractors {
    by_tag: HashMap<String, ExtractorFn>,
}

impl FeatureExtractors {
    pub fn new() -> FeatureExtractors {
        FeatureExtractors::default()
    }

    pub fn register(
        &mut self,
        tag: impl Into<String>,
        f: impl Fn(&Value) -> Vec<Feature> + Send + Sync + 'static,
    ) {
        self.by_tag.insert(tag.into(), Arc::new(f));
    }
}

/// The static features of one environment: the union over its bindings.
pub fn featurize(env: &Env, extractors: &FeatureExtractors) -> HashSet<Feature> {
    let mut out = HashSet::new();
    for (_, value) in env.iter() {
        if let Some(extract) = extractors.by_tag.get(value.tag()) {
            out.extend(extract(value));
        }
    }
    out
}

/// Cumulative set of constructor interactions observed by executed inputs.
#[derive(Clone, Debug, Default)]
pub struct CoverageUniverse {
    seen: HashSet<Feature>,
}

impl CoverageUniverse {
    pub fn new() -> CoverageUniverse {
        CoverageUniverse::default()
    }

    pub fn novelty(&self, features: &HashSet<Feature>) -> usize {
        features.iter().filter(|f| !self.seen.contains(f)).count()
    }

    /// Grows monotonically; features are never removed.
    pub fn absorb(&mut self, features: &HashSet<Feature>) {
        self.seen.extend(features.iter().copied());
    }

    pub fn len(&self) -> usize {
        self.seen.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seen.is_empty()
    }
}

/// Generates one candidate without executing the final predicate.
/// Preconditions are evaluated in place (and stop generation on failure,
/// matching the generate-and-run interpretation), so a `k = 1` campaign
/// consumes the exact random stream the plain loop would.
fn generate_candidate(
    p: &PropTree,
    rng: &mut SplitMix64,
    size: u64,
) -> Result<(Env, bool)> {
    let mut env = Env::with_capacity(p.quantifier_count());
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
                let value = generate.sample(&env, rng, size);
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
                if !precondition(&env) {
                    return Ok((env, true));
                }
                node = body;
            }
            PropTree::Check { .. } => return Ok((env, false)),
        }
    }
}

fn check_predicate(p: &PropTree) -> &crate::prop::PredicateFn {
    let mut node = p;
    loop {
        match node {
            PropTree::Forall { body, .. } | PropTree::Implies { body, .. } => node = body,
            PropTree::Check { predicate } => return predicate,
        }
    }
}

/// The thinning loop. Per iteration: draw `k` candidate environments,
/// score each by how many unseen features it adds, execute only the best
/// one (ties to the first drawn), and absorb the executed input's features
/// into the universe. Fuel counts executed trials, not generator draws;
/// the failure path matches the plain loop.
pub fn combinatorial_loop(
    fuel: u64,
    p: &PropTree,
    k: usize,
    extractors: &FeatureExtractors,
    rng: &mut SplitMix64,
    size_policy: impl Fn(u64, u64) -> u64,
    opts: &RunOpts,
) -> Result<RunnerReport> {
    assert!(k >= 1, "thinning needs at least one candidate per trial");
    let start = Instant::now();
    let mut passed = 0u64;
    let mut discards = 0u64;
    let mut universe = CoverageUniverse::new();
    let predicate = check_predicate(p);

    for _ in 0..fuel {
        if let Some(deadline) = opts.deadline {
            if Instant::now() >= deadline {
                break;
            }
        }
        let size = size_policy(passed, discards);

        let mut chosen: Option<(usize, Env, bool, HashSet<Feature>)> = None;
        for _ in 0..k {
            let (env, discarded) = generate_candidate(p, rng, size)?;
            let features = featurize(&env, extractors);
            let novelty = universe.novelty(&features);
            let better = match &chosen {
                None => true,
                Some((best, ..)) => novelty > *best,
            };
            if better {
                chosen = Some((novelty, env, discarded, features));
            }
        }
        let (_, env, discarded, features) =
            chosen.expect("k >= 1 always yields a candidate");
        universe.absorb(&features);

        if discarded {
            discards += 1;
            continue;
        }
        if predicate(&env) {
            passed += 1;
        } else {
            passed += 1;
            let time_to_fail = start.elapsed();
            let shrink_start = Instant::now();
            let shrunk = shrink_loop(opts.shrink_rounds, p, env)?;
            let shrink_time = shrink_start.elapsed();
            return Ok(RunnerReport {
                foundbug: true,
                passed,
                discards,
                counterexample: Some(print_env(p, &shrunk)),
                counterexample_env: Some(shrunk),
                wallclock: start.elapsed(),
                time_to_fail: Some(time_to_fail),
                shrink_time: Some(shrink_time),
            });
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
