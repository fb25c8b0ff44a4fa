//! Synthetic monotone-feedback task: the property fails only on lists far
//! longer than the generator can produce, so only feedback-guided mutation
//! reaches the failure. Used to exercise the targeted runner.

use std::sync::Arc;

use crate::env::Env;
use crate::gen::GenAction;
use crate::pool::Feedback;
use crate::prop::{check, forall, Annotations, PropTree, ShrinkFn};
use crate::value::Value;

pub const TAG: &str = "list-i64";

fn expect_list(v: &Value) -> &Vec<i64> {
    v.downcast_ref::<Vec<i64>>()
        .expect("synthetic list value should hold a Vec<i64>")
}

fn list_shrinker() -> ShrinkFn {
    Arc::new(|_env: &Env, v: &Value| {
        let xs = expect_list(v);
        if xs.is_empty() {
            return Vec::new();
        }
        let mut out = vec![Vec::new(), xs[..xs.len() / 2].to_vec()];
        out.push(xs[..xs.len() - 1].to_vec());
        out.into_iter().map(|l| Value::new(TAG, l)).collect()
    })
}

/// `forall xs. len(xs) < fail_at`, where generation draws at most
/// `min(size, gen_cap)` elements and the mutator appends one element.
pub fn monotone_list_prop(fail_at: usize, gen_cap: u64) -> PropTree {
    let annotations = Annotations::new()
        .generator_action(GenAction::new(move |rng, size| {
            let len = rng.next_below(size.min(gen_cap) + 1);
            let xs: Vec<i64> = (0..len).map(|_| rng.next_below(16) as i64).collect();
            Value::new(TAG, xs)
        }))
        .mutator(|_env, v: &Value| {
            let xs = expect_list(v).clone();
            GenAction::new(move |rng, _size| {
                let mut grown = xs.clone();
                grown.push(rng.next_below(16) as i64);
                Value::new(TAG, grown)
            })
        })
        .shrinker_fn(list_shrinker())
        .printer(|_env, v: &Value| {
            let items: Vec<String> = expect_list(v).iter().map(i64::to_string).collect();
            format!("[{}]", items.join(" "))
        });
    forall(
        "xs",
        annotations,
        check(move |e: &Env| expect_list(e.get("xs").unwrap()).len() < fail_at),
    )
    .expect("single quantifier")
}

/// Feedback: the list length.
pub fn length_feedback(env: &Env) -> Feedback {
    env.iter()
        .filter_map(|(_, v)| v.downcast_ref::<Vec<i64>>())
        .map(|xs| xs.len() as i64)
        .sum()
}
