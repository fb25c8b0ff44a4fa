//! Simply typed lambda calculus workload: de Bruijn terms, a small-step
//! call-by-value evaluator, and a beta-inlining optimizer, with eight
//! injected mutants across substitution, typing, stepping, and
//! optimization.

use std::sync::Arc;

use crate::combinatorial::{Feature, FeatureExtractors};
use crate::env::Env;
use crate::error::Result;
use crate::gen::GenAction;
use crate::pool::Feedback;
use crate::prop::{check, forall, implies, Annotations, MutateFn, PropTree, ShrinkFn};
use crate::rng::SplitMix64;
use crate::value::Value;

use super::GenStrategy;

pub const TAG: &str = "expr";

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Ty {
    Bool,
    Fun(Box<Ty>, Box<Ty>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Term {
    Var(usize),
    Lit(bool),
    Abs(Ty, Box<Term>),
    App(Box<Term>, Box<Term>),
}

use Term::{Abs, App, Lit, Var};
use Ty::{Bool, Fun};

pub fn fun(a: Ty, b: Ty) -> Ty {
    Fun(Box::new(a), Box::new(b))
}

fn abs(ty: Ty, body: Term) -> Term {
    Abs(ty, Box::new(body))
}

fn app(f: Term, x: Term) -> Term {
    App(Box::new(f), Box::new(x))
}

pub fn term_size(t: &Term) -> usize {
    match t {
        Var(_) | Lit(_) => 1,
        Abs(_, b) => 1 + term_size(b),
        App(f, x) => 1 + term_size(f) + term_size(x),
    }
}

pub fn is_value(t: &Term) -> bool {
    matches!(t, Lit(_) | Abs(..))
}

const EVAL_FUEL: u32 = 256;

pub const MUTANTS: [&str; 8] = [
    "beta-return-arg",
    "subst-wrong-index",
    "step-missing-arg-rule",
    "beta-no-subst",
    "typeof-app-skip-argcheck",
    "typeof-abs-wrong-binder",
    "optimize-drop-subst",
    "eval-fuel-one",
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

    fn shift(&self, t: &Term, d: i64, cutoff: usize) -> Term {
        match t {
            Var(i) => {
                if *i >= cutoff {
                    Var((*i as i64 + d).max(0) as usize)
                } else {
                    Var(*i)
                }
            }
            Lit(b) => Lit(*b),
            Abs(ty, b) => abs(ty.clone(), self.shift(b, d, cutoff + 1)),
            App(f, x) => app(self.shift(f, d, cutoff), self.shift(x, d, cutoff)),
        }
    }

    fn subst(&self, t: &Term, j: usize, s: &Term) -> Term {
        match t {
            Var(i) => {
                if *i == j {
                    s.clone()
                } else {
                    Var(*i)
                }
            }
            Lit(b) => Lit(*b),
            Abs(ty, b) => {
                let j = if self.is(1) { j } else { j + 1 };
                let s = self.shift(s, 1, 0);
                abs(ty.clone(), self.subst(b, j, &s))
            }
            App(f, x) => app(self.subst(f, j, s), self.subst(x, j, s)),
        }
    }

    fn beta(&self, body: &Term, arg: &Term) -> Term {
        if self.is(3) {
            return body.clone();
        }
        let substituted = self.subst(body, 0, &self.shift(arg, 1, 0));
        self.shift(&substituted, -1, 0)
    }

    pub fn type_of(&self, t: &Term) -> Option<Ty> {
        self.type_in(&mut Vec::new(), t)
    }

    fn type_in(&self, ctx: &mut Vec<Ty>, t: &Term) -> Option<Ty> {
        match t {
            Var(i) => {
                if *i < ctx.len() {
                    Some(ctx[ctx.len() - 1 - i].clone())
                } else {
                    None
                }
            }
            Lit(_) => Some(Bool),
            Abs(ty, b) => {
                let binder = if self.is(5) {
                    fun(Bool, Bool)
                } else {
                    ty.clone()
                };
                ctx.push(binder);
                let body_ty = self.type_in(ctx, b);
                ctx.pop();
                Some(fun(ty.clone(), body_ty?))
            }
            App(f, x) => {
                let Fun(a, b) = self.type_in(ctx, f)? else {
                    return None;
                };
                if self.is(4) {
                    return Some(*b);
                }
                let arg_ty = self.type_in(ctx, x)?;
                if arg_ty == *a {
                    Some(*b)
                } else {
                    None
                }
            }
        }
    }

    /// One call-by-value step; `None` on values and stuck terms.
    pub fn step(&self, t: &Term) -> Option<Term> {
        match t {
            App(f, x) => {
                if !is_value(f) {
                    return Some(app(self.step(f)?, (**x).clone()));
                }
                if !is_value(x) {
                    if self.is(2) {
                        // Congruence rule for the argument position missing.
                        return None;
                    }
                    return Some(app((**f).clone(), self.step(x)?));
                }
                match &**f {
                    Abs(_, body) => {
                        if self.is(0) {
                            return Some((**x).clone());
                        }
                        Some(self.beta(body, x))
                    }
                    _ => None,
                }
            }
            _ => None,
        }
    }

    /// Normalizes under a step budget; `None` when stuck or out of fuel.
    pub fn eval(&self, t: &Term) -> Option<Term> {
        let mut fuel = if self.is(7) { 1 } else { EVAL_FUEL };
        let mut current = t.clone();
        loop {
            if is_value(&current) {
                return Some(current);
            }
            if fuel == 0 {
                return None;
            }
            fuel -= 1;
            current = self.step(&current)?;
        }
    }

    /// Beta-inlines applications whose argument is already a value,
    /// without reducing under binders, so the rewrite performs a prefix of
    /// the call-by-value reduction sequence. The inline budget keeps it
    /// total even on ill-typed terms.
    pub fn optimize(&self, t: &Term) -> Term {
        self.opt(t, &mut 32)
    }

    fn opt(&self, t: &Term, budget: &mut u32) -> Term {
        match t {
            Var(_) | Lit(_) | Abs(..) => t.clone(),
            App(f, x) => {
                let f = self.opt(f, budget);
                let x = self.opt(x, budget);
                if let Abs(_, body) = &f {
                    if is_value(&x) && *budget > 0 {
                        *budget -= 1;
                        if self.is(6) {
                            return (**body).clone();
                        }
                        let reduced = self.beta(body, &x);
                        return self.opt(&reduced, budget);
                    }
                }
                app(f, x)
            }
        }
    }
}

pub const PROPERTIES: [&str; 3] = ["preservation", "progress", "eval-opt"];

// Property bodies; the well-typedness precondition is handled by the
// property spine, not here.
pub fn preservation(sut: Sut, e: &Term) -> bool {
    match sut.step(e) {
        None => true,
        Some(next) => sut.type_of(&next) == sut.type_of(e),
    }
}

pub fn progress(sut: Sut, e: &Term) -> bool {
    is_value(e) || sut.step(e).is_some()
}

pub fn eval_opt(sut: Sut, e: &Term) -> bool {
    sut.eval(&sut.optimize(e)) == sut.eval(e)
}

pub fn gen_type(rng: &mut SplitMix64, depth: u32) -> Ty {
    if depth == 0 || rng.next_below(4) < 3 {
        Bool
    } else {
        fun(gen_type(rng, depth - 1), gen_type(rng, depth - 1))
    }
}

fn vars_of_type(ctx: &[Ty], ty: &Ty) -> Vec<usize> {
    ctx.iter()
        .rev()
        .enumerate()
        .filter(|(_, t)| *t == ty)
        .map(|(i, _)| i)
        .collect()
}

fn gen_term_at(rng: &mut SplitMix64, ctx: &mut Vec<Ty>, ty: &Ty, size: u64) -> Term {
    let terminal = |rng: &mut SplitMix64, ctx: &mut Vec<Ty>| {
        let candidates = vars_of_type(ctx, ty);
        if !candidates.is_empty() && rng.next_bool() {
            return Var(candidates[rng.next_below(candidates.len() as u64) as usize]);
        }
        match ty {
            Bool => Lit(rng.next_bool()),
            Fun(a, b) => {
                ctx.push((**a).clone());
                let body = gen_term_at(rng, ctx, &b.clone(), 0);
                ctx.pop();
                abs((**a).clone(), body)
            }
        }
    };
    if size == 0 {
        return terminal(rng, ctx);
    }
    match rng.next_below(3) {
        0 => terminal(rng, ctx),
        1 => match ty {
            Bool => Lit(rng.next_bool()),
            Fun(a, b) => {
                ctx.push((**a).clone());
                let body = gen_term_at(rng, ctx, &b.clone(), size - 1);
                ctx.pop();
                abs((**a).clone(), body)
            }
        },
        _ => {
            let arg_ty = gen_type(rng, 1);
            let f = gen_term_at(rng, ctx, &fun(arg_ty.clone(), ty.clone()), size / 2);
            let x = gen_term_at(rng, ctx, &arg_ty, size / 2);
            app(f, x)
        }
    }
}

/// Closed, well-typed term of a random goal type.
pub fn gen_typed_term(rng: &mut SplitMix64, size: u64) -> Term {
    let ty = gen_type(rng, 2);
    gen_term_at(rng, &mut Vec::new(), &ty, size)
}

/// Arbitrary term, frequently ill-typed or open.
pub fn gen_any_term(rng: &mut SplitMix64, size: u64) -> Term {
    if size == 0 {
        return if rng.next_bool() {
            Lit(rng.next_bool())
        } else {
            Var(rng.next_below(2) as usize)
        };
    }
    match rng.next_below(4) {
        0 => Lit(rng.next_bool()),
        1 => Var(rng.next_below(2) as usize),
        2 => abs(gen_type(rng, 1), gen_any_term(rng, size - 1)),
        _ => app(gen_any_term(rng, size / 2), gen_any_term(rng, size / 2)),
    }
}

fn letter(depth: usize) -> char {
    (b'a' + (depth % 26) as u8) as char
}

pub fn print_ty(ty: &Ty) -> String {
    match ty {
        Bool => "Bool".to_string(),
        Fun(a, b) => format!("({}->{})", print_ty(a), print_ty(b)),
    }
}

/// Renders de Bruijn indices as named variables, `a` for the outermost
/// binder.
pub fn print_term(t: &Term) -> String {
    fn walk(t: &Term, depth: usize) -> String {
        match t {
            Var(i) => {
                if *i < depth {
                    letter(depth - 1 - i).to_string()
                } else {
                    format!("?{i}")
                }
            }
            Lit(b) => b.to_string(),
            Abs(ty, b) => format!("(\\{}:{}. {})", letter(depth), print_ty(ty), walk(b, depth + 1)),
            App(f, x) => format!("({} {})", walk(f, depth), walk(x, depth)),
        }
    }
    walk(t, 0)
}

/// Shrink candidates: boolean literals, immediate subterms, and the
/// pristine-optimized form. Open or ill-typed candidates are rejected by
/// the property's precondition when re-run.
pub fn shrink_term(t: &Term) -> Vec<Term> {
    let mut out = Vec::new();
    for lit in [Lit(true), Lit(false)] {
        if *t != lit {
            out.push(lit);
        }
    }
    match t {
        Var(_) | Lit(_) => {}
        Abs(_, b) => out.push((**b).clone()),
        App(f, x) => {
            out.push((**f).clone());
            out.push((**x).clone());
        }
    }
    let reduced = Sut::new(None).optimize(t);
    if reduced != *t {
        out.push(reduced);
    }
    out
}

trait ValueExt {
    fn expect_term(&self) -> &Term;
}

impl ValueExt for Value {
    fn expect_term(&self) -> &Term {
        self.downcast_ref::<Term>()
            .expect("stlc workload value should hold a term")
    }
}

fn term_shrinker() -> ShrinkFn {
    Arc::new(|_env: &Env, v: &Value| {
        shrink_term(v.expect_term())
            .into_iter()
            .map(|t| Value::new(TAG, t))
            .collect()
    })
}

fn bespoke_mutator() -> MutateFn {
    Arc::new(|_env: &Env, v: &Value| {
        let t = v.expect_term().clone();
        GenAction::new(move |rng, size| {
            if rng.next_bool() {
                // Type-preserving growth: wrap in an identity application.
                if let Some(ty) = Sut::new(None).type_of(&t) {
                    return Value::new(TAG, app(abs(ty, Var(0)), t.clone()));
                }
            }
            Value::new(TAG, gen_typed_term(rng, size))
        })
    })
}

fn replace_nth(t: &Term, target: usize, replacement: &Term, seen: &mut usize) -> Term {
    let here = *seen;
    *seen += 1;
    if here == target {
        return replacement.clone();
    }
    match t {
        Var(_) | Lit(_) => t.clone(),
        Abs(ty, b) => abs(ty.clone(), replace_nth(b, target, replacement, seen)),
        App(f, x) => {
            let f = replace_nth(f, target, replacement, seen);
            let x = replace_nth(x, target, replacement, seen);
            app(f, x)
        }
    }
}

fn type_based_mutator() -> MutateFn {
    Arc::new(|_env: &Env, v: &Value| {
        let t = v.expect_term().clone();
        GenAction::new(move |rng, _size| {
            let target = rng.next_below(term_size(&t) as u64) as usize;
            let replacement = gen_any_term(rng, 1);
            Value::new(TAG, replace_nth(&t, target, &replacement, &mut 0))
        })
    })
}

fn term_annotations(strategy: GenStrategy) -> Annotations {
    let base = Annotations::new()
        .shrinker_fn(term_shrinker())
        .printer(|_env, v| print_term(v.expect_term()));
    match strategy {
        GenStrategy::Bespoke => base
            .generator_action(GenAction::new(|rng, size| {
                Value::new(TAG, gen_typed_term(rng, size))
            }))
            .mutator_fn(bespoke_mutator())
            .contract(|_env, v| {
                v.downcast_ref::<Term>()
                    .is_some_and(|t| Sut::new(None).type_of(t).is_some())
            }),
        GenStrategy::TypeBased => base
            .generator_action(GenAction::new(|rng, size| {
                Value::new(TAG, gen_any_term(rng, size))
            }))
            .mutator_fn(type_based_mutator())
            .contract(|_env, v| v.downcast_ref::<Term>().is_some()),
    }
}

pub(super) fn build(
    property: &str,
    mutant: Option<usize>,
    strategy: GenStrategy,
) -> Result<PropTree> {
    let sut = Sut::new(mutant);
    fn term(e: &Env) -> &Term {
        e.get("e").unwrap().expect_term()
    }
    let body = match property {
        "preservation" => check(move |e: &Env| preservation(sut, term(e))),
        "progress" => check(move |e: &Env| progress(sut, term(e))),
        "eval-opt" => check(move |e: &Env| eval_opt(sut, term(e))),
        other => return Err(crate::error::Error::UnknownProperty(other.to_string())),
    };
    // Well-typedness is judged by the system under test: mutant
    // typecheckers admit their own junk.
    let guarded = implies(
        move |e: &Env| sut.type_of(e.get("e").unwrap().expect_term()).is_some(),
        body,
    );
    forall("e", term_annotations(strategy), guarded)
}

pub(super) fn feedback(env: &Env) -> Feedback {
    env.iter()
        .filter_map(|(_, v)| v.downcast_ref::<Term>())
        .map(|t| term_size(t) as i64)
        .sum()
}

fn ctor(t: &Term) -> &'static str {
    match t {
        Var(_) => "Var",
        Lit(_) => "Lit",
        Abs(..) => "Abs",
        App(..) => "App",
    }
}

fn term_features(t: &Term, out: &mut Vec<Feature>) {
    match t {
        Var(_) | Lit(_) => {}
        Abs(_, b) => {
            out.push(Feature::new(ctor(t), ctor(b), 0));
            term_features(b, out);
        }
        App(f, x) => {
            out.push(Feature::new(ctor(t), ctor(f), 0));
            out.push(Feature::new(ctor(t), ctor(x), 1));
            term_features(f, out);
            term_features(x, out);
        }
    }
}

pub(super) fn extractors() -> FeatureExtractors {
    let mut ex = FeatureExtractors::new();
    ex.register(TAG, |v: &Value| {
        let mut out = Vec::new();
        term_features(v.expect_term(), &mut out);
        out
    });
    ex
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pristine() -> Sut {
        Sut::new(None)
    }

    #[test]
    fn typed_generator_produces_well_typed_closed_terms() {
        let mut rng = SplitMix64::new(7);
        for _ in 0..500 {
            let t = gen_typed_term(&mut rng, 8);
            assert!(
                pristine().type_of(&t).is_some(),
                "ill-typed term generated: {}",
                print_term(&t)
            );
        }
    }

    #[test]
    fn pristine_metatheory_holds_on_random_terms() {
        let sut = pristine();
        let mut rng = SplitMix64::new(13);
        for _ in 0..500 {
            let t = gen_typed_term(&mut rng, 8);
            assert!(preservation(sut, &t), "preservation: {}", print_term(&t));
            assert!(progress(sut, &t), "progress: {}", print_term(&t));
            assert!(eval_opt(sut, &t), "eval-opt: {}", print_term(&t));
        }
    }

    #[test]
    fn eval_reduces_identity_application() {
        let id = abs(Bool, Var(0));
        let t = app(id.clone(), Lit(true));
        assert_eq!(pristine().eval(&t), Some(Lit(true)));
        assert_eq!(pristine().optimize(&t), Lit(true));
        // Nested redex needs two steps.
        let t2 = app(id.clone(), app(id, Lit(false)));
        assert_eq!(pristine().eval(&t2), Some(Lit(false)));
        assert_eq!(Sut::new(Some(7)).eval(&t2), None);
    }

    #[test]
    fn optimizer_is_total_on_divergent_untyped_terms() {
        // (\x. x x)(\x. x x) loops under naive inlining; the budget keeps
        // the rewrite finite.
        let omega = abs(Bool, app(Var(0), Var(0)));
        let t = app(omega.clone(), omega);
        let _ = pristine().optimize(&t);
    }

    #[test]
    fn beta_no_subst_breaks_preservation() {
        let sut = Sut::new(Some(3));
        let t = app(abs(Bool, Var(0)), Lit(true));
        assert!(sut.type_of(&t).is_some());
        assert!(!preservation(sut, &t));
    }

    #[test]
    fn beta_return_arg_breaks_eval_opt() {
        let sut = Sut::new(Some(0));
        // A constant-false function applied to true: the broken step hands
        // back the argument while the optimizer reduces correctly.
        let t = app(abs(Bool, Lit(false)), Lit(true));
        assert_eq!(sut.eval(&t), Some(Lit(true)));
        assert!(!eval_opt(sut, &t));
    }

    #[test]
    fn missing_arg_rule_breaks_progress() {
        let sut = Sut::new(Some(2));
        let id = abs(Bool, Var(0));
        let t = app(id.clone(), app(id, Lit(true)));
        assert!(sut.type_of(&t).is_some());
        assert!(!is_value(&t));
        assert!(sut.step(&t).is_none());
        assert!(!progress(sut, &t));
    }

    #[test]
    fn skip_argcheck_admits_junk_that_breaks_preservation() {
        let sut = Sut::new(Some(4));
        // id applied to id: argument type mismatches, the mutant accepts it.
        let id = abs(Bool, Var(0));
        let t = app(id.clone(), id);
        assert!(pristine().type_of(&t).is_none());
        assert!(sut.type_of(&t).is_some());
        assert!(!preservation(sut, &t));
    }

    #[test]
    fn optimize_drop_subst_changes_eval() {
        let sut = Sut::new(Some(6));
        let t = app(abs(Bool, Var(0)), Lit(true));
        assert!(!eval_opt(sut, &t));
    }

    #[test]
    fn printer_names_variables() {
        let t = abs(Bool, abs(fun(Bool, Bool), app(Var(0), Var(1))));
        assert_eq!(t.clone(), t);
        assert_eq!(print_term(&t), "(\\a:Bool. (\\b:(Bool->Bool). (b a)))");
        assert_eq!(print_term(&Var(3)), "?3");
    }

    #[test]
    fn every_mutant_changes_behavior_somewhere() {
        for m in 0..MUTANTS.len() {
            let sut = Sut::new(Some(m));
            let mut rng = SplitMix64::new(m as u64 + 17);
            let mut differs = false;
            for _ in 0..2000 {
                let t = gen_any_term(&mut rng, 5);
                if sut.type_of(&t) != pristine().type_of(&t)
                    || sut.step(&t) != pristine().step(&t)
                    || sut.eval(&t) != pristine().eval(&t)
                    || sut.optimize(&t) != pristine().optimize(&t)
                {
                    differs = true;
                    break;
                }
            }
            assert!(differs, "mutant {} is behaviorally dead", MUTANTS[m]);
        }
    }
}
