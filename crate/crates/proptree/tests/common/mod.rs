//! Shared brute-force oracles for the integration suites: exhaustive
//! small-scope enumeration of workload inputs, solvable-task computation,
//! and hand-written shallow twin loops. Everything here is independent of
//! the property-tree interpreters it is used to check.

#![allow(dead_code)]

pub mod pool_model;

use proptree::rng::SplitMix64;
use proptree::workloads::{bst, rbt, stlc};

// ---------------------------------------------------------------------
// Exhaustive input enumeration
// ---------------------------------------------------------------------

/// Every binary search tree with exactly `n` nodes and keys drawn from
/// `lo..=hi`, values from `vals`.
fn bsts_with(lo: i64, hi: i64, n: usize, vals: &[i64]) -> Vec<bst::Tree> {
    if n == 0 {
        return vec![bst::Tree::Leaf];
    }
    if lo > hi {
        return Vec::new();
    }
    let mut out = Vec::new();
    for k in lo..=hi {
        for left_size in 0..n {
            for l in bsts_with(lo, k - 1, left_size, vals) {
                for r in bsts_with(k + 1, hi, n - 1 - left_size, vals) {
                    for &v in vals {
                        out.push(bst::Tree::Node(
                            Box::new(l.clone()),
                            k,
                            v,
                            Box::new(r.clone()),
                        ));
                    }
                }
            }
        }
    }
    out
}

/// All valid BSTs with up to `max_nodes` nodes over keys `0..=max_key`.
pub fn all_bsts(max_nodes: usize, max_key: i64, vals: &[i64]) -> Vec<bst::Tree> {
    (0..=max_nodes)
        .flat_map(|n| bsts_with(0, max_key, n, vals))
        .collect()
}

/// All red-black trees reachable by reference-insert sequences over keys
/// `0..=max_key` and the given values, up to `max_inserts` insertions.
/// This is exactly the input space the bespoke generator can produce.
pub fn reachable_rbts(max_inserts: usize, max_key: i64, vals: &[i64]) -> Vec<rbt::Tree> {
    use std::collections::BTreeSet;
    let mut seen: BTreeSet<String> = BTreeSet::new();
    let mut out = vec![rbt::Tree::Leaf];
    seen.insert(rbt::print_tree(&rbt::Tree::Leaf));
    let mut frontier = out.clone();
    for _ in 0..max_inserts {
        let mut next = Vec::new();
        for t in &frontier {
            for k in 0..=max_key {
                for &v in vals {
                    let grown = rbt::insert_reference(t, k, v);
                    let key = rbt::print_tree(&grown);
                    if seen.insert(key) {
                        next.push(grown);
                    }
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// Visits every closed-syntax lambda term up to the given operator depth,
/// in order of increasing depth, stopping early when the visitor returns
/// `true`. Depth-0 terms are the leaves `Var 0`, `Var 1`, and the two
/// literals; binder annotations range over `Bool` and `Bool -> Bool`.
///
/// Terms of exact depth d are `Abs` over a depth d-1 body, or `App` whose
/// deeper argument has depth d-1. Only the layers below `max_depth` are
/// materialized; the deepest layer streams through the visitor.
pub fn search_terms(max_depth: usize, mut visit: impl FnMut(&stlc::Term) -> bool) -> bool {
    use stlc::Term;
    let tys = [stlc::Ty::Bool, stlc::fun(stlc::Ty::Bool, stlc::Ty::Bool)];
    let leaves = vec![
        Term::Var(0),
        Term::Var(1),
        Term::Lit(true),
        Term::Lit(false),
    ];
    for t in &leaves {
        if visit(t) {
            return true;
        }
    }
    let mut layers: Vec<Vec<Term>> = vec![leaves];
    for depth in 1..=max_depth {
        let store = depth < max_depth;
        let prev: Vec<Term> = layers[depth - 1].clone();
        let up_to_prev: Vec<Term> = layers.iter().flatten().cloned().collect();
        let below_prev: Vec<Term> = layers[..depth - 1].iter().flatten().cloned().collect();
        let mut layer: Vec<Term> = Vec::new();

        for body in &prev {
            for ty in &tys {
                let t = Term::Abs(ty.clone(), Box::new(body.clone()));
                if visit(&t) {
                    return true;
                }
                if store {
                    layer.push(t);
                }
            }
        }
        for f in &prev {
            for x in &up_to_prev {
                let t = Term::App(Box::new(f.clone()), Box::new(x.clone()));
                if visit(&t) {
                    return true;
                }
                if store {
                    layer.push(t);
                }
            }
        }
        for f in &below_prev {
            for x in &prev {
                let t = Term::App(Box::new(f.clone()), Box::new(x.clone()));
                if visit(&t) {
                    return true;
                }
                if store {
                    layer.push(t);
                }
            }
        }
        layers.push(layer);
    }
    false
}

// ---------------------------------------------------------------------
// Task solvability
// ---------------------------------------------------------------------

pub const BST_ORACLE_NODES: usize = 4;
pub const BST_ORACLE_KEY: i64 = 4;
pub const ORACLE_VALS: [i64; 2] = [0, 1];

/// Searches the exhaustive small scope for a counterexample to one BST
/// task; `None` means the task is not solvable at this scope.
pub fn bst_counterexample(
    mutant: Option<usize>,
    property: &str,
) -> Option<(bst::Tree, Vec<i64>)> {
    let sut = bst::Sut::new(mutant);
    let trees = all_bsts(BST_ORACLE_NODES, BST_ORACLE_KEY, &ORACLE_VALS);
    let keys: Vec<i64> = (0..=BST_ORACLE_KEY).collect();
    for t in &trees {
        for &k in &keys {
            match property {
                "delete-valid" => {
                    if !bst::delete_valid(sut, t, k) {
                        return Some((t.clone(), vec![k]));
                    }
                }
                "delete-model" => {
                    if !bst::delete_model(sut, t, k) {
                        return Some((t.clone(), vec![k]));
                    }
                }
                "delete-post" => {
                    for &k2 in &keys {
                        if !bst::delete_post(sut, t, k, k2) {
                            return Some((t.clone(), vec![k, k2]));
                        }
                    }
                }
                "insert-valid" | "insert-model" => {
                    for &v in &ORACLE_VALS {
                        let ok = if property == "insert-valid" {
                            bst::insert_valid(sut, t, k, v)
                        } else {
                            bst::insert_model(sut, t, k, v)
                        };
                        if !ok {
                            return Some((t.clone(), vec![k, v]));
                        }
                    }
                }
                "insert-post" => {
                    for &k2 in &keys {
                        for &v in &ORACLE_VALS {
                            if !bst::insert_post(sut, t, k, k2, v) {
                                return Some((t.clone(), vec![k, k2, v]));
                            }
                        }
                    }
                }
                other => panic!("unknown bst property {other}"),
            }
        }
    }
    None
}

/// Searches the reachable red-black trees for a counterexample.
pub fn rbt_counterexample(
    mutant: Option<usize>,
    property: &str,
) -> Option<(rbt::Tree, Vec<i64>)> {
    let sut = rbt::Sut::new(mutant);
    let trees = reachable_rbts(4, 4, &ORACLE_VALS);
    let keys: Vec<i64> = (0..=4).collect();
    for t in &trees {
        for &k in &keys {
            match property {
                "insert-valid" | "insert-model" => {
                    for &v in &ORACLE_VALS {
                        let ok = if property == "insert-valid" {
                            rbt::insert_valid(sut, t, k, v)
                        } else {
                            rbt::insert_model(sut, t, k, v)
                        };
                        if !ok {
                            return Some((t.clone(), vec![k, v]));
                        }
                    }
                }
                "insert-post" => {
                    for &k2 in &keys {
                        for &v in &ORACLE_VALS {
                            if !rbt::insert_post(sut, t, k, k2, v) {
                                return Some((t.clone(), vec![k, k2, v]));
                            }
                        }
                    }
                }
                other => panic!("unknown rbt property {other}"),
            }
        }
    }
    None
}

/// Searches closed lambda terms (accepted by the mutant's own typechecker)
/// for a counterexample to one STLC task.
pub fn stlc_counterexample(mutant: usize, property: &str) -> Option<stlc::Term> {
    let sut = stlc::Sut::new(Some(mutant));
    let mut found = None;
    search_terms(3, |t| {
        if sut.type_of(t).is_none() {
            return false;
        }
        let holds = match property {
            "preservation" => stlc::preservation(sut, t),
            "progress" => stlc::progress(sut, t),
            "eval-opt" => stlc::eval_opt(sut, t),
            other => panic!("unknown stlc property {other}"),
        };
        if !holds {
            found = Some(t.clone());
            true
        } else {
            false
        }
    });
    found
}

/// The (mutant, property) pairs of a workload that the exhaustive oracle
/// proves solvable.
pub fn bst_solvable_tasks() -> Vec<(usize, &'static str)> {
    let mut out = Vec::new();
    for m in 0..bst::MUTANTS.len() {
        for prop in bst::PROPERTIES {
            if bst_counterexample(Some(m), prop).is_some() {
                out.push((m, prop));
            }
        }
    }
    out
}

pub fn rbt_solvable_tasks() -> Vec<(usize, &'static str)> {
    let mut out = Vec::new();
    for m in 0..rbt::MUTANTS.len() {
        for prop in rbt::PROPERTIES {
            if rbt_counterexample(Some(m), prop).is_some() {
                out.push((m, prop));
            }
        }
    }
    out
}

// ---------------------------------------------------------------------
// Shallow twin loops: direct closures, no property tree, same draws
// ---------------------------------------------------------------------

pub struct ShallowOutcome {
    pub foundbug: bool,
    pub passed: u64,
    pub discards: u64,
}

/// The classic loop written directly against the BST workload functions,
/// consuming the exact random stream of the reified insert-valid property.
pub fn shallow_bst_insert_valid(
    fuel: u64,
    seed: u64,
    mutant: Option<usize>,
    size_policy: impl Fn(u64, u64) -> u64,
) -> ShallowOutcome {
    let sut = bst::Sut::new(mutant);
    let mut rng = SplitMix64::new(seed);
    let mut passed = 0;
    let discards = 0;
    for _ in 0..fuel {
        let size = size_policy(passed, discards);
        let t = bst::gen_valid_tree(&mut rng, size);
        let k = rng.next_below(size + 1) as i64;
        let v = rng.next_below(size + 1) as i64;
        passed += 1;
        if !bst::insert_valid(sut, &t, k, v) {
            return ShallowOutcome {
                foundbug: true,
                passed,
                discards,
            };
        }
    }
    ShallowOutcome {
        foundbug: false,
        passed,
        discards,
    }
}

pub fn shallow_rbt_insert_valid(
    fuel: u64,
    seed: u64,
    mutant: Option<usize>,
    size_policy: impl Fn(u64, u64) -> u64,
) -> ShallowOutcome {
    let sut = rbt::Sut::new(mutant);
    let mut rng = SplitMix64::new(seed);
    let mut passed = 0;
    let discards = 0;
    for _ in 0..fuel {
        let size = size_policy(passed, discards);
        let t = rbt::gen_valid_tree(&mut rng, size);
        let k = rng.next_below(size + 1) as i64;
        let v = rng.next_below(size + 1) as i64;
        passed += 1;
        if !rbt::insert_valid(sut, &t, k, v) {
            return ShallowOutcome {
                foundbug: true,
                passed,
                discards,
            };
        }
    }
    ShallowOutcome {
        foundbug: false,
        passed,
        discards,
    }
}

pub fn shallow_stlc_preservation(
    fuel: u64,
    seed: u64,
    mutant: Option<usize>,
    size_policy: impl Fn(u64, u64) -> u64,
) -> ShallowOutcome {
    let sut = stlc::Sut::new(mutant);
    let mut rng = SplitMix64::new(seed);
    let mut passed = 0;
    let mut discards = 0;
    for _ in 0..fuel {
        let size = size_policy(passed, discards);
        let e = stlc::gen_typed_term(&mut rng, size);
        if sut.type_of(&e).is_none() {
            discards += 1;
            continue;
        }
        passed += 1;
        if !stlc::preservation(sut, &e) {
            return ShallowOutcome {
                foundbug: true,
                passed,
                discards,
            };
        }
    }
    ShallowOutcome {
        foundbug: false,
        passed,
        discards,
    }
}
