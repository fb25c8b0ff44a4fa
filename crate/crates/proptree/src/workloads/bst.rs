//! Binary search tree workload: insert/delete/find over unbalanced trees,
//! with eight injected mutants.

use std::sync::Arc;

use crate::combinatorial::{Feature, FeatureExtractors};
use crate::env::Env;
use crate::error::Result;
use crate::gen::{int_shrinker, int_step_mutator, small_nat_action, GenAction};
use crate::pool::Feedback;
use crate::prop::{check, forall, implies, Annotations, MutateFn, PropTree, ShrinkFn};
use crate::rng::SplitMix64;
use crate::value::Value;

use super::GenStrategy;

pub const TAG: &str = "bst";

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tree {
    Leaf,
    Node(Box<Tree>, i64, i64, Box<Tree>),
}

use Tree::{Leaf, Node};

fn node(l: Tree, k: i64, v: i64, r: Tree) -> Tree {
    Node(Box::new(l), k, v, Box::new(r))
}

pub fn node_count(t: &Tree) -> usize {
    match t {
        Leaf => 0,
        Node(l, _, _, r) => 1 + node_count(l) + node_count(r),
    }
}

fn bounded(t: &Tree, lo: Option<i64>, hi: Option<i64>) -> bool {
    match t {
        Leaf => true,
        Node(l, k, _, r) => {
            lo.is_none_or(|b| *k > b)
                && hi.is_none_or(|b| *k < b)
                && bounded(l, lo, Some(*k))
                && bounded(r, Some(*k), hi)
        }
    }
}

/// Strict search-tree order: left keys below, right keys above, no
/// duplicates.
pub fn is_bst(t: &Tree) -> bool {
    bounded(t, None, None)
}

/// In-order (key, value) pairs.
pub fn to_list(t: &Tree) -> Vec<(i64, i64)> {
    fn walk(t: &Tree, out: &mut Vec<(i64, i64)>) {
        if let Node(l, k, v, r) = t {
            walk(l, out);
            out.push((*k, *v));
            walk(r, out);
        }
    }
    let mut out = Vec::new();
    walk(t, &mut out);
    out
}

/// Known-good insert, used by generators, mutators, and shrinkers.
pub fn insert_reference(t: &Tree, k: i64, v: i64) -> Tree {
    match t {
        Leaf => node(Leaf, k, v, Leaf),
        Node(l, k0, v0, r) => {
            if k < *k0 {
                Node(Box::new(insert_reference(l, k, v)), *k0, *v0, r.clone())
            } else if k > *k0 {
                Node(l.clone(), *k0, *v0, Box::new(insert_reference(r, k, v)))
            } else {
                Node(l.clone(), k, v, r.clone())
            }
        }
    }
}

fn max_entry(t: &Tree) -> Option<(i64, i64)> {
    match t {
        Leaf => None,
        Node(_, k, v, r) => Some(max_entry(r).unwrap_or((*k, *v))),
    }
}

fn delete_max(t: &Tree) -> Tree {
    match t {
        Leaf => Leaf,
        Node(l, k, v, r) => match **r {
            Leaf => (**l).clone(),
            _ => Node(l.clone(), *k, *v, Box::new(delete_max(r))),
        },
    }
}

/// Known-good delete.
pub fn delete_reference(t: &Tree, k: i64) -> Tree {
    match t {
        Leaf => Leaf,
        Node(l, k0, v0, r) => {
            if k < *k0 {
                Node(Box::new(delete_reference(l, k)), *k0, *v0, r.clone())
            } else if k > *k0 {
                Node(l.clone(), *k0, *v0, Box::new(delete_reference(r, k)))
            } else {
                match (&**l, &**r) {
                    (Leaf, _) => (**r).clone(),
                    (_, Leaf) => (**l).clone(),
                    _ => {
                        let (mk, mv) = max_entry(l).expect("nonempty left subtree");
                        Node(Box::new(delete_max(l)), mk, mv, r.clone())
                    }
                }
            }
        }
    }
}

pub const MUTANTS: [&str; 8] = [
    "insert-root-replace",
    "insert-flip-compare",
    "insert-dup-on-equal",
    "insert-drop-right",
    "delete-flip-compare",
    "delete-keep-two-child",
    "delete-lift-left",
    "find-flip-compare",
];

/// The system under test with one selectable injected bug; `None` is the
/// pristine implementation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Sut {
    mutant: Option<usize>,
}

impl Sut {
    pub fn new(mutant: Option<usize>) -> Sut {
        Sut { mutant }
    }

    fn is(&self, m: usize) -> bool {
        self.mutant == Some(m)
    }

    pub fn insert(&self, t: &Tree, k: i64, v: i64) -> Tree {
        if self.is(0) {
            return node(Leaf, k, v, Leaf);
        }
        match t {
            Leaf => node(Leaf, k, v, Leaf),
            Node(l, k0, v0, r) => {
                let (lt, gt) = if self.is(1) {
                    (k > *k0, k < *k0)
                } else {
                    (k < *k0, k > *k0)
                };
                if lt {
                    let right = if self.is(3) { Leaf } else { (**r).clone() };
                    node(self.insert(l, k, v), *k0, *v0, right)
                } else if gt {
                    Node(l.clone(), *k0, *v0, Box::new(self.insert(r, k, v)))
                } else if self.is(2) {
                    Node(Box::new(self.insert(l, k, v)), *k0, *v0, r.clone())
                } else {
                    Node(l.clone(), k, v, r.clone())
                }
            }
        }
    }

    pub fn delete(&self, t: &Tree, k: i64) -> Tree {
        match t {
            Leaf => Leaf,
            Node(l, k0, v0, r) => {
                let (lt, gt) = if self.is(4) {
                    (k > *k0, k < *k0)
                } else {
                    (k < *k0, k > *k0)
                };
                if lt {
                    Node(Box::new(self.delete(l, k)), *k0, *v0, r.clone())
                } else if gt {
                    Node(l.clone(), *k0, *v0, Box::new(self.delete(r, k)))
                } else {
                    match (&**l, &**r) {
                        (Leaf, _) => (**r).clone(),
                        (_, Leaf) => (**l).clone(),
                        _ if self.is(5) => t.clone(),
                        _ if self.is(6) => (**l).clone(),
                        _ => {
                            let (mk, mv) = max_entry(l).expect("nonempty left subtree");
                            Node(Box::new(delete_max(l)), mk, mv, r.clone())
                        }
                    }
                }
            }
        }
    }

    pub fn find(&self, t: &Tree, k: i64) -> Option<i64> {
        match t {
            Leaf => None,
            Node(l, k0, v0, r) => {
                let (lt, gt) = if self.is(7) {
                    (k > *k0, k < *k0)
                } else {
                    (k < *k0, k > *k0)
                };
                if lt {
                    self.find(l, k)
                } else if gt {
                    self.find(r, k)
                } else {
                    Some(*v0)
                }
            }
        }
    }
}

// Assoc-list model of the map operations, for the model-based properties.
fn list_insert(mut list: Vec<(i64, i64)>, k: i64, v: i64) -> Vec<(i64, i64)> {
    list.retain(|(k0, _)| *k0 != k);
    list.push((k, v));
    list.sort_by_key(|(k0, _)| *k0);
    list
}

fn list_delete(mut list: Vec<(i64, i64)>, k: i64) -> Vec<(i64, i64)> {
    list.retain(|(k0, _)| *k0 != k);
    list
}

pub const PROPERTIES: [&str; 6] = [
    "insert-valid",
    "delete-valid",
    "insert-post",
    "delete-post",
    "insert-model",
    "delete-model",
];

// Property bodies over concrete inputs, shared between the property trees
// and the exhaustive search used in tests.
pub fn insert_valid(sut: Sut, t: &Tree, k: i64, v: i64) -> bool {
    is_bst(&sut.insert(t, k, v))
}

pub fn delete_valid(sut: Sut, t: &Tree, k: i64) -> bool {
    is_bst(&sut.delete(t, k))
}

pub fn insert_post(sut: Sut, t: &Tree, k: i64, k2: i64, v: i64) -> bool {
    let found = sut.find(&sut.insert(t, k, v), k2);
    let expected = if k2 == k { Some(v) } else { sut.find(t, k2) };
    found == expected
}

pub fn delete_post(sut: Sut, t: &Tree, k: i64, k2: i64) -> bool {
    let found = sut.find(&sut.delete(t, k), k2);
    let expected = if k2 == k { None } else { sut.find(t, k2) };
    found == expected
}

pub fn insert_model(sut: Sut, t: &Tree, k: i64, v: i64) -> bool {
    to_list(&sut.insert(t, k, v)) == list_insert(to_list(t), k, v)
}

pub fn delete_model(sut: Sut, t: &Tree, k: i64) -> bool {
    to_list(&sut.delete(t, k)) == list_delete(to_list(t), k)
}

/// Valid tree by construction: fold reference inserts over random entries.
pub fn gen_valid_tree(rng: &mut SplitMix64, size: u64) -> Tree {
    let n = rng.next_below(size + 1);
    let mut t = Leaf;
    for _ in 0..n {
        let k = rng.next_below(size + 1) as i64;
        let v = rng.next_below(size + 1) as i64;
        t = insert_reference(&t, k, v);
    }
    t
}

/// Arbitrary tree shape, depth-bounded by `size`; at most `2^size - 1`
/// nodes and usually not a valid search tree.
pub fn gen_any_tree(rng: &mut SplitMix64, size: u64) -> Tree {
    if size == 0 || rng.next_below(3) == 0 {
        return Leaf;
    }
    let k = rng.next_below(size + 1) as i64;
    let v = rng.next_below(size + 1) as i64;
    let l = gen_any_tree(rng, size - 1);
    let r = gen_any_tree(rng, size - 1);
    node(l, k, v, r)
}

pub fn print_tree(t: &Tree) -> String {
    match t {
        Leaf => "E".to_string(),
        Node(l, k, v, r) => format!("({k}:{v} {} {})", print_tree(l), print_tree(r)),
    }
}

fn rebuild(entries: impl IntoIterator<Item = (i64, i64)>) -> Tree {
    entries
        .into_iter()
        .fold(Leaf, |t, (k, v)| insert_reference(&t, k, v))
}

/// Shrink candidates: the empty tree, both subtrees, the tree rebuilt with
/// one entry removed, and rebuilds with one key or value halved. Rebuilt
/// candidates are valid search trees by construction.
pub fn shrink_tree(t: &Tree) -> Vec<Tree> {
    let Node(l, _, _, r) = t else {
        return Vec::new();
    };
    let mut out = vec![Leaf, (**l).clone(), (**r).clone()];
    let entries = to_list(t);
    for i in 0..entries.len() {
        let mut rest = entries.clone();
        rest.remove(i);
        out.push(rebuild(rest));
    }
    for i in 0..entries.len() {
        let (k, v) = entries[i];
        if k > 0 {
            let mut halved = entries.clone();
            halved[i].0 = k / 2;
            out.push(rebuild(halved));
        }
        if v > 0 {
            let mut halved = entries.clone();
            halved[i].1 = v / 2;
            out.push(rebuild(halved));
        }
    }
    out
}

fn tree_shrinker() -> ShrinkFn {
    Arc::new(|_env: &Env, v: &Value| {
        shrink_tree(v.expect_tree())
            .into_iter()
            .map(|t| Value::new(TAG, t))
            .collect()
    })
}

trait ValueExt {
    fn expect_tree(&self) -> &Tree;
}

impl ValueExt for Value {
    fn expect_tree(&self) -> &Tree {
        self.downcast_ref::<Tree>()
            .expect("bst workload value should hold a tree")
    }
}

fn bespoke_mutator() -> MutateFn {
    Arc::new(|_env: &Env, v: &Value| {
        let t = v.expect_tree().clone();
        GenAction::new(move |rng, size| {
            let k = rng.next_below(size + 1) as i64;
            if rng.next_bool() {
                let val = rng.next_below(size + 1) as i64;
                Value::new(TAG, insert_reference(&t, k, val))
            } else {
                Value::new(TAG, delete_reference(&t, k))
            }
        })
    })
}

fn perturb_nth_key(t: &Tree, target: usize, delta: i64) -> Tree {
    fn walk(t: &Tree, target: usize, delta: i64, seen: &mut usize) -> Tree {
        match t {
            Leaf => Leaf,
            Node(l, k, v, r) => {
                let left = walk(l, target, delta, seen);
                let here = *seen;
                *seen += 1;
                let k = if here == target { *k + delta } else { *k };
                let right = walk(r, target, delta, seen);
                node(left, k, *v, right)
            }
        }
    }
    walk(t, target, delta, &mut 0)
}

fn type_based_mutator() -> MutateFn {
    Arc::new(|_env: &Env, v: &Value| {
        let t = v.expect_tree().clone();
        GenAction::new(move |rng, size| {
            let n = node_count(&t);
            if n == 0 {
                let k = rng.next_below(size + 1) as i64;
                return Value::new(TAG, node(Leaf, k, k, Leaf));
            }
            let target = rng.next_below(n as u64) as usize;
            let delta = if rng.next_bool() { 1 } else { -1 };
            Value::new(TAG, perturb_nth_key(&t, target, delta))
        })
    })
}

fn tree_annotations(strategy: GenStrategy) -> Annotations {
    let base = Annotations::new()
        .shrinker_fn(tree_shrinker())
        .printer(|_env, v| print_tree(v.expect_tree()));
    match strategy {
        GenStrategy::Bespoke => base
            .generator_action(GenAction::new(|rng, size| {
                Value::new(TAG, gen_valid_tree(rng, size))
            }))
            .mutator_fn(bespoke_mutator())
            .contract(|_env, v| v.downcast_ref::<Tree>().is_some_and(is_bst)),
        GenStrategy::TypeBased => base
            .generator_action(GenAction::new(|rng, size| {
                Value::new(TAG, gen_any_tree(rng, size))
            }))
            .mutator_fn(type_based_mutator())
            .contract(|_env, v| v.downcast_ref::<Tree>().is_some()),
    }
}

fn key_annotations() -> Annotations {
    Annotations::new()
        .generator_action(small_nat_action())
        .mutator_fn(int_step_mutator(1))
        .shrinker_fn(int_shrinker())
        .printer(|_env, v| v.as_int().unwrap_or_default().to_string())
}

fn assemble(
    vars: &[(&'static str, Annotations)],
    strategy: GenStrategy,
    pred: impl Fn(&Env) -> bool + Send + Sync + 'static,
) -> PropTree {
    let mut body = check(pred);
    if strategy == GenStrategy::TypeBased {
        body = implies(|e: &Env| is_bst(e.get("t").unwrap().expect_tree()), body);
    }
    for (name, ann) in vars.iter().rev() {
        body = forall(*name, ann.clone(), body).expect("distinct quantifier names");
    }
    body
}

/// Builds one BST property tree.
pub(super) fn build(
    property: &str,
    mutant: Option<usize>,
    strategy: GenStrategy,
) -> Result<PropTree> {
    let sut = Sut::new(mutant);
    let t = || ("t", tree_annotations(strategy));
    let k = |name: &'static str| (name, key_annotations());
    fn tree(e: &Env) -> &Tree {
        e.get("t").unwrap().expect_tree()
    }
    fn int(e: &Env, name: &str) -> i64 {
        *e.expect::<i64>(name)
    }

    Ok(match property {
        "insert-valid" => assemble(&[t(), k("k"), k("v")], strategy, move |e| {
            insert_valid(sut, tree(e), int(e, "k"), int(e, "v"))
        }),
        "delete-valid" => assemble(&[t(), k("k")], strategy, move |e| {
            delete_valid(sut, tree(e), int(e, "k"))
        }),
        "insert-post" => assemble(&[t(), k("k"), k("k2"), k("v")], strategy, move |e| {
            insert_post(sut, tree(e), int(e, "k"), int(e, "k2"), int(e, "v"))
        }),
        "delete-post" => assemble(&[t(), k("k"), k("k2")], strategy, move |e| {
            delete_post(sut, tree(e), int(e, "k"), int(e, "k2"))
        }),
        "insert-model" => assemble(&[t(), k("k"), k("v")], strategy, move |e| {
            insert_model(sut, tree(e), int(e, "k"), int(e, "v"))
        }),
        "delete-model" => assemble(&[t(), k("k")], strategy, move |e| {
            delete_model(sut, tree(e), int(e, "k"))
        }),
        other => return Err(crate::error::Error::UnknownProperty(other.to_string())),
    })
}

/// Total node count of every tree in the environment; the default feedback
/// signal for this workload.
pub(super) fn feedback(env: &Env) -> Feedback {
    env.iter()
        .filter_map(|(_, v)| v.downcast_ref::<Tree>())
        .map(|t| node_count(t) as i64)
        .sum()
}

fn ctor(t: &Tree) -> &'static str {
    match t {
        Leaf => "Leaf",
        Node(..) => "Node",
    }
}

fn tree_features(t: &Tree, out: &mut Vec<Feature>) {
    if let Node(l, _, _, r) = t {
        out.push(Feature::new(ctor(t), ctor(l), 0));
        out.push(Feature::new(ctor(t), ctor(r), 1));
        tree_features(l, out);
        tree_features(r, out);
    }
}

pub(super) fn extractors() -> FeatureExtractors {
    let mut ex = FeatureExtractors::new();
    ex.register(TAG, |v: &Value| {
        let mut out = Vec::new();
        tree_features(v.expect_tree(), &mut out);
        out
    });
    ex
}
