//! Outcomes of single trials and whole campaigns.

use std::time::Duration;

use crate::env::Env;

/// The outcome of running a property once. Discarded runs keep whatever
/// partial environment existed when the precondition failed.
#[derive(Clone, Debug)]
pub enum RunResult {
    Normal { env: Env, truth: bool },
    Discard { env: Env },
}

impl RunResult {
    pub fn env(&self) -> &Env {
        match self {
            RunResult::Normal { env, .. } | RunResult::Discard { env } => env,
        }
    }

    pub fn is_falsifying(&self) -> bool {
        matches!(self, RunResult::Normal { truth: false, .. })
    }

    pub fn is_discard(&self) -> bool {
        matches!(self, RunResult::Discard { .. })
    }
}

/// The outcome of a whole campaign.
#[derive(Clone, Debug, Default)]
pub struct RunnerReport {
    pub foundbug: bool,
    pub passed: u64,
    pub discards: u64,
    /// Printed counterexample; present exactly when `foundbug` is set.
    pub counterexample: Option<String>,
    /// The shrunk falsifying environment itself, for programmatic re-runs.
    pub counterexample_env: Option<Env>,
    pub wallclock: Duration,
    /// Wallclock from campaign start to falsification, before shrinking.
    pub time_to_fail: Option<Duration>,
    /// Time spent shrinking the counterexample.
    pub shrink_time: Option<Duration>,
}

impl RunnerReport {
    /// Everything except the wallclock fields, for determinism comparisons.
    pub fn outcome(&self) -> (bool, u64, u64, Option<&str>) {
        (
            self.foundbug,
            self.passed,
            self.discards,
            self.counterexample.as_deref(),
        )
    }

    pub fn trials(&self) -> u64 {
        self.passed + self.discards
    }
}
