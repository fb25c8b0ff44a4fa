//! Red-black tree workload: functional insert with rebalancing, eight
//! injected mutants targeting the balance and recoloring logic.

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

pub const TAG: &str = "rbt";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Color {
    Red,
    Black,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tree {
    Leaf,
    Node(Color, Box<Tree>, i64, i64, Box<Tree>),
}

use Color::{Black, Red};
use Tree::{Leaf, Node};

fn node(c: Color, l: Tree, k: i64, v: i64, r: Tree) -> Tree {
    Node(c, Box::new(l), k, v, Box::new(r))
}

pub fn node_count(t: &Tree) -> usize {
    match t {
        Leaf => 0,
        Node(_, l, _, _, r) => 1 + node_count(l) + node_count(r),
    }
}

fn bounded(t: &Tree, lo: Option<i64>, hi: Option<i64>) -> bool {
    match t {
        Leaf => true,
        Node(_, l, k, _, r) => {
            lo.is_none_or(|b| *k > b)
                && hi.is_none_or(|b| *k < b)
                && bounded(l, lo, Some(*k))
                && bounded(r, Some(*k), hi)
        }
    }
}

fn no_red_red(t: &Tree) -> bool {
    match t {
        Leaf => true,
        Node(c, l, _, _, r) => {
            let child_red = |t: &Tree| matches!(t, Node(Red, ..));
            (*c == Black || (!child_red(l) && !child_red(r))) && no_red_red(l) && no_red_red(r)
        }
    }
}

fn black_height(t: &Tree) -> Option<u32> {
    match t {
        Leaf => Some(1),
        Node(c, l, _, _, r) => {
            let lh = black_height(l)?;
            let rh = black_height(r)?;
            if lh != rh {
                return None;
            }
            Some(lh + u32::from(*c == Black))
        }
    }
}

/// The full red-black invariant: search-tree order, a black root, no red
/// node with a red child, and equal black height on every path.
pub fn is_rbt(t: &Tree) -> bool {
    let root_ok = !matches!(t, Node(Red, ..));
    root_ok && bounded(t, None, None) && no_red_red(t) && black_height(t).is_some()
}

pub fn to_list(t: &Tree) -> Vec<(i64, i64)> {
    fn walk(t: &Tree, out: &mut Vec<(i64, i64)>) {
        if let Node(_, l, k, v, r) = t {
            walk(l, out);
            out.push((*k, *v));
            walk(r, out);
        }
    }
    let mut out = Vec::new();
    walk(t, &mut out);
    out
}

fn balance_reference(c: Color, l: Tree, k: i64, v: i64, r: Tree) -> Tree {
    if c == Black {
        // The four double-red shapes, rebuilt as a red node with two black
        // children.
        if let Node(Red, ll, lk, lv, lr) = &l {
            if let Node(Red, a, xk, xv, b) = &**ll {
                return node(
                    Red,
                    node(Black, (**a).clone(), *xk, *xv, (**b).clone()),
                    *lk,
                    *lv,
                    node(Black, (**lr).clone(), k, v, r),
                );
            }
            if let Node(Red, b, yk, yv, c2) = &**lr {
                return node(
                    Red,
                    node(Black, (**ll).clone(), *lk, *lv, (**b).clone()),
                    *yk,
                    *yv,
                    node(Black, (**c2).clone(), k, v, r),
                );
            }
        }
        if let Node(Red, rl, rk, rv, rr) = &r {
            if let Node(Red, b, yk, yv, c2) = &**rl {
                return node(
                    Red,
                    node(Black, l, k, v, (**b).clone()),
                    *yk,
                    *yv,
                    node(Black, (**c2).clone(), *rk, *rv, (**rr).clone()),
                );
            }
            if let Node(Red, c2, zk, zv, d) = &**rr {
                return node(
                    Red,
                    node(Black, l, k, v, (**rl).clone()),
                    *rk,
                    *rv,
                    node(Black, (**c2).clone(), *zk, *zv, (**d).clone()),
                );
            }
        }
    }
    node(c, l, k, v, r)
}

fn ins_reference(t: &Tree, k: i64, v: i64) -> Tree {
    match t {
        Leaf => node(Red, Leaf, k, v, Leaf),
        Node(c, l, k0, v0, r) => {
            if k < *k0 {
                balance_reference(*c, ins_reference(l, k, v), *k0, *v0, (**r).clone())
            } else if k > *k0 {
                balance_reference(*c, (**l).clone(), *k0, *v0, ins_reference(r, k, v))
            } else {
                node(*c, (**l).clone(), k, v, (**r).clone())
            }
        }
    }
}

fn blacken(t: Tree) -> Tree {
    match t {
        Leaf => Leaf,
        Node(_, l, k, v, r) => Node(Black, l, k, v, r),
    }
}

/// Known-good insert, used by generators, mutators, and shrinkers.
pub fn insert_reference(t: &Tree, k: i64, v: i64) -> Tree {
    blacken(ins_reference(t, k, v))
}

pub const MUTANTS: [&str; 8] = [
    "blacken-skip",
    "balance-skip-ll",
    "balance-skip-rr",
    "balance-swap-keys",
    "ins-flip-compare",
    "ins-dup-on-equal",
    "ins-new-node-black",
    "find-flip-compare",
];

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

    fn balance(&self, c: Color, l: Tree, k: i64, v: i64, r: Tree) -> Tree {
        if c == Black {
            if let Node(Red, ll, lk, lv, lr) = &l {
                if let Node(Red, a, xk, xv, b) = &**ll {
                    if self.is(1) {
                        // Left-left double red left unbalanced.
                        return node(c, l, k, v, r);
                    }
                    if self.is(3) {
                        // Pivot and child keys swapped during the rebuild.
                        return node(
                            Red,
                            node(Black, (**a).clone(), *lk, *lv, (**b).clone()),
                            *xk,
                            *xv,
                            node(Black, (**lr).clone(), k, v, r),
                        );
                    }
                    return node(
                        Red,
                        node(Black, (**a).clone(), *xk, *xv, (**b).clone()),
                        *lk,
                        *lv,
                        node(Black, (**lr).clone(), k, v, r),
                    );
                }
                if let Node(Red, b, yk, yv, c2) = &**lr {
                    return node(
                        Red,
                        node(Black, (**ll).clone(), *lk, *lv, (**b).clone()),
                        *yk,
                        *yv,
                        node(Black, (**c2).clone(), k, v, r),
                    );
                }
            }
            if let Node(Red, rl, rk, rv, rr) = &r {
                if let Node(Red, b, yk, yv, c2) = &**rl {
                    return node(
                        Red,
                        node(Black, l, k, v, (**b).clone()),
                        *yk,
                        *yv,
                        node(Black, (**c2).clone(), *rk, *rv, (**rr).clone()),
                    );
                }
                if let Node(Red, c2, zk, zv, d) = &**rr {
                    if self.is(2) {
                        // Right-right double red left unbalanced.
                        return node(c, l, k, v, r);
                    }
                    return node(
                        Red,
                        node(Black, l, k, v, (**rl).clone()),
                        *rk,
                        *rv,
                        node(Black, (**c2).clone(), *zk, *zv, (**d).clone()),
                    );
                }
            }
        }
        node(c, l, k, v, r)
    }

    fn ins(&self, t: &Tree, k: i64, v: i64) -> Tree {
        match t {
            Leaf => {
                let color = if self.is(6) { Black } else { Red };
                node(color, Leaf, k, v, Leaf)
            }
            Node(c, l, k0, v0, r) => {
                let (lt, gt) = if self.is(4) {
                    (k > *k0, k < *k0)
                } else {
                    (k < *k0, k > *k0)
                };
                if lt {
                    self.balance(*c, self.ins(l, k, v), *k0, *v0, (**r).clone())
                } else if gt {
                    self.balance(*c, (**l).clone(), *k0, *v0, self.ins(r, k, v))
                } else if self.is(5) {
                    self.balance(*c, self.ins(l, k, v), *k0, *v0, (**r).clone())
                } else {
                    node(*c, (**l).clone(), k, v, (**r).clone())
                }
            }
        }
    }

    pub fn insert(&self, t: &Tree, k: i64, v: i64) -> Tree {
        let inserted = self.ins(t, k, v);
        if self.is(0) {
            inserted
        } else {
            blacken(inserted)
        }
    }

    pub fn find(&self, t: &Tree, k: i64) -> Option<i64> {
        match t {
            Leaf => None,
            Node(_, l, k0, v0, r) => {
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

fn list_insert(mut list: Vec<(i64, i64)>, k: i64, v: i64) -> Vec<(i64, i64)> {
    list.retain(|(k0, _)| *k0 != k);
    list.push((k, v));
    list.sort_by_key(|(k0, _)| *k0);
    list
}

pub const PROPERTIES: [&str; 3] = ["insert-valid", "insert-post", "insert-model"];

pub fn insert_valid(sut: Sut, t: &Tree, k: i64, v: i64) -> bool {
    is_rbt(&sut.insert(t, k, v))
}

pub fn insert_post(sut: Sut, t: &Tree, k: i64, k2: i64, v: i64) -> bool {
    let found = sut.find(&sut.insert(t, k, v), k2);
    let expected = if k2 == k { Some(v) } else { sut.find(t, k2) };
    found == expected
}

pub fn insert_model(sut: Sut, t: &Tree, k: i64, v: i64) -> bool {
    to_list(&sut.insert(t, k, v)) == list_insert(to_list(t), k, v)
}

/// Valid red-black tree by construction.
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

/// Arbitrary colored tree, depth-bounded by `size`; rarely a valid
/// red-black tree.
pub fn gen_any_tree(rng: &mut SplitMix64, size: u64) -> Tree {
    if size == 0 || rng.next_below(3) == 0 {
        return Leaf;
    }
    let color = if rng.next_bool() { Red } else { Black };
    let k = rng.next_below(size + 1) as i64;
    let v = rng.next_below(size + 1) as i64;
    let l = gen_any_tree(rng, size - 1);
    let r = gen_any_tree(rng, size - 1);
    node(color, l, k, v, r)
}

pub fn print_tree(t: &Tree) -> String {
    match t {
        Leaf => "E".to_string(),
        Node(c, l, k, v, r) => {
            let c = if *c == Red { "R" } else { "B" };
            format!("({c} {k}:{v} {} {})", print_tree(l), print_tree(r))
        }
    }
}

fn rebuild(entries: impl IntoIterator<Item = (i64, i64)>) -> Tree {
    entries
        .into_iter()
        .fold(Leaf, |t, (k, v)| insert_reference(&t, k, v))
}

/// Shrink candidates: empty tree, blackened subtrees (which keep the
/// red-black invariant), entry-removal rebuilds, and halved keys/values.
pub fn shrink_tree(t: &Tree) -> Vec<Tree> {
    let Node(_, l, _, _, r) = t else {
        return Vec::new();
    };
    let mut out = vec![Leaf, blacken((**l).clone()), blacken((**r).clone())];
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

trait ValueExt {
    fn expect_tree(&self) -> &Tree;
}

impl ValueExt for Value {
    fn expect_tree(&self) -> &Tree {
        self.downcast_ref::<Tree>()
            .expect("rbt workload value should hold a tree")
    }
}

fn tree_shrinker() -> ShrinkFn {
    Arc::new(|_env: &Env, v: &Value| {
        shrink_tree(v.expect_tree())
            .into_iter()
            .map(|t| Value::new(TAG, t))
            .collect()
    })
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
                // Validity-preserving removal: rebuild without one entry.
                let entries = to_list(&t);
                if entries.is_empty() {
                    return Value::new(TAG, insert_reference(&t, k, k));
                }
                let drop = rng.next_below(entries.len() as u64) as usize;
                let rest = entries
                    .into_iter()
                    .enumerate()
                    .filter(|(i, _)| *i != drop)
                    .map(|(_, e)| e);
                Value::new(TAG, rebuild(rest))
            }
        })
    })
}

fn recolor_nth(t: &Tree, target: usize, seen: &mut usize) -> Tree {
    match t {
        Leaf => Leaf,
        Node(c, l, k, v, r) => {
            let left = recolor_nth(l, target, seen);
            let here = *seen;
            *seen += 1;
            let color = if here == target {
                if *c == Red {
                    Black
                } else {
                    Red
                }
            } else {
                *c
            };
            let right = recolor_nth(r, target, seen);
            node(color, left, *k, *v, right)
        }
    }
}

fn type_based_mutator() -> MutateFn {
    Arc::new(|_env: &Env, v: &Value| {
        let t = v.expect_tree().clone();
        GenAction::new(move |rng, size| {
            let n = node_count(&t);
            if n == 0 {
                let k = rng.next_below(size + 1) as i64;
                return Value::new(TAG, node(Black, Leaf, k, k, Leaf));
            }
            let target = rng.next_below(n as u64) as usize;
            Value::new(TAG, recolor_nth(&t, target, &mut 0))
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
            .contract(|_env, v| v.downcast_ref::<Tree>().is_some_and(is_rbt)),
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
        body = implies(|e: &Env| is_rbt(e.get("t").unwrap().expect_tree()), body);
    }
    for (name, ann) in vars.iter().rev() {
        body = forall(*name, ann.clone(), body).expect("distinct quantifier names");
    }
    body
}

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
        "insert-post" => assemble(&[t(), k("k"), k("k2"), k("v")], strategy, move |e| {
            insert_post(sut, tree(e), int(e, "k"), int(e, "k2"), int(e, "v"))
        }),
        "insert-model" => assemble(&[t(), k("k"), k("v")], strategy, move |e| {
            insert_model(sut, tree(e), int(e, "k"), int(e, "v"))
        }),
        other => return Err(crate::error::Error::UnknownProperty(other.to_string())),
    })
}

pub(super) fn feedback(env: &Env) -> Feedback {
    env.iter()
        .filter_map(|(_, v)| v.downcast_ref::<Tree>())
        .map(|t| node_count(t) as i64)
        .sum()
}

fn ctor(t: &Tree) -> &'static str {
    match t {
        Leaf => "Leaf",
        Node(Red, ..) => "RedNode",
        Node(Black, ..) => "BlackNode",
    }
}

fn tree_features(t: &Tree, out: &mut Vec<Feature>) {
    if let Node(_, l, _, _, r) = t {
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
