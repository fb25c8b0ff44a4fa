//! Property-based testing where properties are plain data.
//!
//! A property is reified as a [`PropTree`]: a spine of universal
//! quantifiers and preconditions ending in a single boolean check.
//! Quantifier nodes carry no host-language binder; predicates, generators,
//! mutators, shrinkers, printers, and contracts all take the environment of
//! previously generated values instead. Because the tree is ordinary data,
//! every runner in this crate — the classic generate-then-shrink loop,
//! coverage- and feedback-guided fuzzing, targeted search, combinatorial
//! thinning, and a lock-free parallel loop — is user-space code that
//! pattern-matches on the same representation, and new runners can be
//! written without touching the library internals.
//!
//! The crate also ships three benchmark workloads (binary search trees,
//! red-black trees, and a simply typed lambda calculus) with injected
//! mutants, plus the `pbt` command-line harness for running campaigns and
//! aggregating results.
//!
//! ```
//! use proptree::{check, forall, run_loop, Annotations, Env, SplitMix64};
//! use proptree::gen::{default_size, int_shrinker, sized_int_action};
//!
//! let ann = Annotations::new()
//!     .generator_action(sized_int_action())   // i64 in [-size, size]
//!     .shrinker_fn(int_shrinker())
//!     .printer(|_env, v| v.as_int().unwrap().to_string());
//! let prop = forall("x", ann, check(|e: &Env| *e.expect::<i64>("x") < 10)).unwrap();
//!
//! let mut rng = SplitMix64::new(42);
//! let report = run_loop(100_000, &prop, &mut rng, default_size).unwrap();
//! assert!(report.foundbug);
//! assert_eq!(report.counterexample.as_deref(), Some("x = 10"));
//! ```

pub mod bench;
pub mod combinatorial;
pub mod env;
pub mod error;
pub mod fuzz;
pub mod gen;
pub mod parallel;
pub mod pool;
pub mod prop;
pub mod report;
pub mod rng;
pub mod runner;
pub mod value;
pub mod workloads;

pub use env::Env;
pub use error::{Error, Result};
pub use gen::{default_size, mutate_value, sample_gen, GenAction};
pub use prop::{check, forall, implies, Annotations, PropTree};
pub use report::{RunResult, RunnerReport};
pub use rng::SplitMix64;
pub use runner::{
    gen_and_run, print_env, run_loop, run_loop_opts, run_on, shrink_loop, shrink_loop_with,
    RunOpts, ShrinkOutcome,
};
pub use value::Value;
