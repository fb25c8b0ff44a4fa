//! The reified property language.
//!
//! A property is a plain data structure: a linear spine of `Forall` and
//! `Implies` nodes ending in exactly one `Check`. Quantifier nodes carry no
//! binder; instead every use site (predicates, preconditions, annotation
//! functions) receives the whole environment of values generated so far.
//! Runners pattern-match on the spine and decide for themselves how to
//! generate, mutate, check, shrink, and report.

use std::any::Any;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::env::Env;
use crate::error::{Error, Result};
use crate::gen::GenAction;
use crate::value::Value;

pub type PredicateFn = Arc<dyn Fn(&Env) -> bool + Send + Sync>;
pub type GenFn = Arc<dyn Fn(&Env) -> GenAction + Send + Sync>;
pub type MutateFn = Arc<dyn Fn(&Env, &Value) -> GenAction + Send + Sync>;
pub type ShrinkFn = Arc<dyn Fn(&Env, &Value) -> Vec<Value> + Send + Sync>;
pub type PrintFn = Arc<dyn Fn(&Env, &Value) -> String + Send + Sync>;
pub type ContractFn = Arc<dyn Fn(&Env, &Value) -> bool + Send + Sync>;

/// A generator annotation: either one fixed action, or a function of the
/// enclosing environment. Most generators do not depend on earlier
/// variables, and the fixed form spares the interpreters an indirection
/// per trial.
#[derive(Clone)]
pub enum Generator {
    Action(GenAction),
    FromEnv(GenFn),
}

impl Generator {
    #[inline]
    pub fn sample(&self, env: &Env, rng: &mut crate::rng::SplitMix64, size: u64) -> Value {
        match self {
            Generator::Action(action) => action.run(rng, size),
            Generator::FromEnv(f) => f(env).run(rng, size),
        }
    }
}

/// Per-quantifier annotation bundle. Every function takes the environment
/// of the *enclosing* quantifiers, like the property language itself:
/// binders carry no closures, use sites see the whole prefix.
#[derive(Clone, Default)]
pub struct Annotations {
    pub generator: Option<Generator>,
    pub mutator: Option<MutateFn>,
    pub shrinker: Option<ShrinkFn>,
    pub printer: Option<PrintFn>,
    pub contract: Option<ContractFn>,
    /// Open-ended extension point for runner-specific annotations.
    pub extra: BTreeMap<String, Arc<dyn Any + Send + Sync>>,
}

impl Annotations {
    pub fn new() -> Annotations {
        Annotations::default()
    }

    pub fn generator(mut self, f: impl Fn(&Env) -> GenAction + Send + Sync + 'static) -> Self {
        self.generator = Some(Generator::FromEnv(Arc::new(f)));
        self
    }

    /// Env-independent generator given directly as an action.
    pub fn generator_action(mut self, action: GenAction) -> Self {
        self.generator = Some(Generator::Action(action));
        self
    }

    pub fn mutator(
        mut self,
        f: impl Fn(&Env, &Value) -> GenAction + Send + Sync + 'static,
    ) -> Self {
        self.mutator = Some(Arc::new(f));
        self
    }

    pub fn mutator_fn(mut self, f: MutateFn) -> Self {
        self.mutator = Some(f);
        self
    }

    pub fn shrinker(
        mut self,
        f: impl Fn(&Env, &Value) -> Vec<Value> + Send + Sync + 'static,
    ) -> Self {
        self.shrinker = Some(Arc::new(f));
        self
    }

    pub fn shrinker_fn(mut self, f: ShrinkFn) -> Self {
        self.shrinker = Some(f);
        self
    }

    pub fn printer(mut self, f: impl Fn(&Env, &Value) -> String + Send + Sync + 'static) -> Self {
        self.printer = Some(Arc::new(f));
        self
    }

    pub fn printer_fn(mut self, f: PrintFn) -> Self {
        self.printer = Some(f);
        self
    }

    pub fn contract(
        mut self,
        f: impl Fn(&Env, &Value) -> bool + Send + Sync + 'static,
    ) -> Self {
        self.contract = Some(Arc::new(f));
        self
    }

    pub fn extra(mut self, key: impl Into<String>, value: Arc<dyn Any + Send + Sync>) -> Self {
        self.extra.insert(key.into(), value);
        self
    }
}

/// The reified property tree. Structurally inspectable: traversing node
/// kinds executes none of the attached functions.
#[derive(Clone)]
pub enum PropTree {
    Forall {
        name: Arc<str>,
        annotations: Annotations,
        body: Box<PropTree>,
    },
    Implies {
        precondition: PredicateFn,
        body: Box<PropTree>,
    },
    Check {
        predicate: PredicateFn,
    },
}

/// Universally quantifies `body` over a fresh variable.
///
/// Fails when `name` is already quantified anywhere in `body`, which keeps
/// names unique along the spine.
pub fn forall(
    name: impl Into<Arc<str>>,
    annotations: Annotations,
    body: PropTree,
) -> Result<PropTree> {
    let name = name.into();
    if body.names().iter().any(|n| *n == &*name) {
        return Err(Error::DuplicateName(name.to_string()));
    }
    Ok(PropTree::Forall {
        name,
        annotations,
        body: Box::new(body),
    })
}

/// Guards `body` behind a precondition; runners must treat a failing
/// precondition as a discard, not a failure.
pub fn implies(pre: impl Fn(&Env) -> bool + Send + Sync + 'static, body: PropTree) -> PropTree {
    PropTree::Implies {
        precondition: Arc::new(pre),
        body: Box::new(body),
    }
}

/// The leaf predicate of a property.
pub fn check(pred: impl Fn(&Env) -> bool + Send + Sync + 'static) -> PropTree {
    PropTree::Check {
        predicate: Arc::new(pred),
    }
}

impl PropTree {
    /// Quantifier names, outermost first.
    pub fn names(&self) -> Vec<&str> {
        let mut out = Vec::new();
        let mut node = self;
        loop {
            match node {
                PropTree::Forall { name, body, .. } => {
                    out.push(&**name);
                    node = body;
                }
                PropTree::Implies { body, .. } => node = body,
                PropTree::Check { .. } => return out,
            }
        }
    }

    pub fn quantifier_count(&self) -> usize {
        self.names().len()
    }

    /// Total number of spine nodes, including the final `Check`.
    pub fn depth(&self) -> usize {
        let mut n = 1;
        let mut node = self;
        loop {
            match node {
                PropTree::Forall { body, .. } | PropTree::Implies { body, .. } => {
                    n += 1;
                    node = body;
                }
                PropTree::Check { .. } => return n,
            }
        }
    }

    /// The annotation bundle of the `index`-th quantifier (outermost first).
    pub fn annotations_at(&self, index: usize) -> Option<(&str, &Annotations)> {
        let mut seen = 0;
        let mut node = self;
        loop {
            match node {
                PropTree::Forall {
                    name,
                    annotations,
                    body,
                } => {
                    if seen == index {
                        return Some((name, annotations));
                    }
                    seen += 1;
                    node = body;
                }
                PropTree::Implies { body, .. } => node = body,
                PropTree::Check { .. } => return None,
            }
        }
    }
}

impl fmt::Debug for PropTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PropTree::Forall { name, body, .. } => write!(f, "Forall({name:?}, {body:?})"),
            PropTree::Implies { body, .. } => write!(f, "Implies(_, {body:?})"),
            PropTree::Check { .. } => write!(f, "Check(_)"),
        }
    }
}
