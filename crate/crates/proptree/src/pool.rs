//! Seed pools, energy schedules, and the utility judgment used by the
//! feedback-guided runners.

use std::collections::VecDeque;

use crate::env::Env;
use crate::error::{Error, Result};

/// Integer-valued guidance signal. Probes and feedback functions map richer
/// observations (branch counts, tree heights, sizes) down to this.
pub type Feedback = i64;

/// A stored corpus entry: the inputs of a passing trial, the feedback it
/// produced, and the mutation energy it has left.
#[derive(Clone, Debug)]
pub struct Seed {
    pub env: Env,
    pub feedback: Feedback,
    pub energy: u64,
}

/// A pool's per-iteration decision: generate a fresh input or mutate a
/// stored seed.
#[derive(Clone, Debug)]
pub enum Directive {
    Generate,
    Mutate(Seed),
}

impl Directive {
    pub fn is_mutate(&self) -> bool {
        matches!(self, Directive::Mutate(_))
    }
}

/// How a useful seed's initial energy is derived from its feedback.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EnergyAssignment {
    /// Full energy for any invested seed.
    SignOnly,
    /// Energy proportional to the feedback value, clamped to
    /// `[1, max_energy]`.
    Linear,
}

/// Power schedule: how many mutation attempts a stored seed receives.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnergySchedule {
    pub max_energy: u64,
    pub assignment: EnergyAssignment,
}

/// The energy levels exercised by the benchmark harness.
pub const ENERGY_LEVELS: [u64; 4] = [1, 10, 100, 1000];

impl EnergySchedule {
    pub fn new(max_energy: u64) -> EnergySchedule {
        EnergySchedule {
            max_energy: max_energy.max(1),
            assignment: EnergyAssignment::SignOnly,
        }
    }

    pub fn linear(max_energy: u64) -> EnergySchedule {
        EnergySchedule {
            max_energy: max_energy.max(1),
            assignment: EnergyAssignment::Linear,
        }
    }

    pub fn initial_energy(&self, feedback: Feedback) -> u64 {
        match self.assignment {
            EnergyAssignment::SignOnly => self.max_energy,
            EnergyAssignment::Linear => (feedback.max(1) as u64).min(self.max_energy),
        }
    }
}

/// The corpus abstraction shared by the fuzzing and targeted runners.
///
/// `invest` stores a seed that produced useful feedback, `revise` reacts to
/// a useless trial by decreasing the current seed's energy, and `sample`
/// decides whether the next input is generated from scratch or mutated from
/// a stored seed. An empty pool always samples `Generate`, and `sample`
/// never hands out a seed with zero energy.
pub trait SeedPool: Send {
    fn invest(&mut self, env: Env, feedback: Feedback);
    fn revise(&mut self);
    fn sample(&self) -> Directive;
    /// The highest-feedback seed currently stored, for reporting.
    fn best(&self) -> Option<&Seed>;
}

/// Queue pool serving from the front (the classic fuzzing default).
pub struct FifoPool {
    schedule: EnergySchedule,
    seeds: VecDeque<Seed>,
}

/// Queue pool serving from the back.
pub struct FiloPool {
    schedule: EnergySchedule,
    seeds: VecDeque<Seed>,
}

/// Priority pool: always serves the highest-feedback seed, ties broken
/// towards the most recently invested.
pub struct HeapPool {
    schedule: EnergySchedule,
    // Kept sorted on (feedback, sequence) ascending, so the maximum sits at
    // the end; desk-scale pools are small enough that a sorted vec beats
    // juggling heap rebuilds.
    seeds: Vec<(i64, u64, Seed)>,
    next_sequence: u64,
}

/// Hill climbing: one seed, kept forever until strictly better feedback
/// arrives; usage never drains it.
pub struct StaticSingletonPool {
    seed: Option<Seed>,
}

/// One seed with energy; at zero energy the pool generates from scratch but
/// still only replaces the seed on strictly better feedback.
pub struct DynMonotonicPool {
    schedule: EnergySchedule,
    seed: Option<Seed>,
}

/// One seed with energy; at zero energy the seed is dropped entirely and
/// the next useful seed is accepted unconditionally.
pub struct DynResettingPool {
    schedule: EnergySchedule,
    seed: Option<Seed>,
}

impl FifoPool {
    pub fn new(schedule: EnergySchedule) -> Self {
        FifoPool {
            schedule,
            seeds: VecDeque::new(),
        }
    }
}

impl SeedPool for FifoPool {
    fn invest(&mut self, env: Env, feedback: Feedback) {
        let energy = self.schedule.initial_energy(feedback);
        self.seeds.push_back(Seed {
            env,
            feedback,
            energy,
        });
    }

    fn revise(&mut self) {
        if let Some(front) = self.seeds.front_mut() {
            front.energy -= 1;
            if front.energy == 0 {
                self.seeds.pop_front();
            }
        }
    }

    fn sample(&self) -> Directive {
        match self.seeds.front() {
            Some(seed) => Directive::Mutate(seed.clone()),
            None => Directive::Generate,
        }
    }

    fn best(&self) -> Option<&Seed> {
        self.seeds.iter().max_by_key(|s| s.feedback)
    }
}

impl FiloPool {
    pub fn new(schedule: EnergySchedule) -> Self {
        FiloPool {
            schedule,
            seeds: VecDeque::new(),
        }
    }
}

impl SeedPool for FiloPool {
    fn invest(&mut self, env: Env, feedback: Feedback) {
        let energy = self.schedule.initial_energy(feedback);
        self.seeds.push_back(Seed {
            env,
            feedback,
            energy,
        });
    }

    fn revise(&mut self) {
        if let Some(back) = self.seeds.back_mut() {
            back.energy -= 1;
            if back.energy == 0 {
                self.seeds.pop_back();
            }
        }
    }

    fn sample(&self) -> Directive {
        match self.seeds.back() {
            Some(seed) => Directive::Mutate(seed.clone()),
            None => Directive::Generate,
        }
    }

    fn best(&self) -> Option<&Seed> {
        self.seeds.iter().max_by_key(|s| s.feedback)
    }
}

impl HeapPool {
    pub fn new(schedule: EnergySchedule) -> Self {
        HeapPool {
            schedule,
            seeds: Vec::new(),
            next_sequence: 0,
        }
    }

    fn top(&self) -> Option<&(i64, u64, Seed)> {
        self.seeds.last()
    }
}

impl SeedPool for HeapPool {
    fn invest(&mut self, env: Env, feedback: Feedback) {
        let energy = self.schedule.initial_energy(feedback);
        let sequence = self.next_sequence;
        self.next_sequence += 1;
        let entry = (
            feedback,
            sequence,
            Seed {
                env,
                feedback,
                energy,
            },
        );
        let at = self
            .seeds
            .partition_point(|(f, s, _)| (*f, *s) < (feedback, sequence));
        self.seeds.insert(at, entry);
    }

    fn revise(&mut self) {
        if let Some((_, _, seed)) = self.seeds.last_mut() {
            seed.energy -= 1;
            if seed.energy == 0 {
                self.seeds.pop();
            }
        }
    }

    fn sample(&self) -> Directive {
        match self.top() {
            Some((_, _, seed)) => Directive::Mutate(seed.clone()),
            None => Directive::Generate,
        }
    }

    fn best(&self) -> Option<&Seed> {
        self.top().map(|(_, _, seed)| seed)
    }
}

impl StaticSingletonPool {
    pub fn new() -> Self {
        StaticSingletonPool { seed: None }
    }
}

impl Default for StaticSingletonPool {
    fn default() -> Self {
        Self::new()
    }
}

impl SeedPool for StaticSingletonPool {
    fn invest(&mut self, env: Env, feedback: Feedback) {
        let better = match &self.seed {
            None => true,
            Some(current) => feedback > current.feedback,
        };
        if better {
            self.seed = Some(Seed {
                env,
                feedback,
                energy: 1,
            });
        }
    }

    fn revise(&mut self) {}

    fn sample(&self) -> Directive {
        match &self.seed {
            Some(seed) => Directive::Mutate(seed.clone()),
            None => Directive::Generate,
        }
    }

    fn best(&self) -> Option<&Seed> {
        self.seed.as_ref()
    }
}

impl DynMonotonicPool {
    pub fn new(schedule: EnergySchedule) -> Self {
        DynMonotonicPool {
            schedule,
            seed: None,
        }
    }
}

impl SeedPool for DynMonotonicPool {
    fn invest(&mut self, env: Env, feedback: Feedback) {
        let better = match &self.seed {
            None => true,
            Some(current) => feedback > current.feedback,
        };
        if better {
            let energy = self.schedule.initial_energy(feedback);
            self.seed = Some(Seed {
                env,
                feedback,
                energy,
            });
        }
    }

    fn revise(&mut self) {
        if let Some(seed) = &mut self.seed {
            seed.energy = seed.energy.saturating_sub(1);
        }
    }

    fn sample(&self) -> Directive {
        match &self.seed {
            Some(seed) if seed.energy > 0 => Directive::Mutate(seed.clone()),
            _ => Directive::Generate,
        }
    }

    fn best(&self) -> Option<&Seed> {
        self.seed.as_ref()
    }
}

impl DynResettingPool {
    pub fn new(schedule: EnergySchedule) -> Self {
        DynResettingPool {
            schedule,
            seed: None,
        }
    }
}

impl SeedPool for DynResettingPool {
    fn invest(&mut self, env: Env, feedback: Feedback) {
        let better = match &self.seed {
            None => true,
            Some(current) => feedback > current.feedback,
        };
        if better {
            let energy = self.schedule.initial_energy(feedback);
            self.seed = Some(Seed {
                env,
                feedback,
                energy,
            });
        }
    }

    fn revise(&mut self) {
        if let Some(seed) = &mut self.seed {
            seed.energy -= 1;
            if seed.energy == 0 {
                self.seed = None;
            }
        }
    }

    fn sample(&self) -> Directive {
        match &self.seed {
            Some(seed) => Directive::Mutate(seed.clone()),
            None => Directive::Generate,
        }
    }

    fn best(&self) -> Option<&Seed> {
        self.seed.as_ref()
    }
}

/// Pool variants selectable from configuration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PoolKind {
    Fifo,
    Filo,
    Heap,
    StaticSingleton,
    DynMonotonic,
    DynResetting,
}

impl PoolKind {
    pub const ALL: [PoolKind; 6] = [
        PoolKind::Fifo,
        PoolKind::Filo,
        PoolKind::Heap,
        PoolKind::StaticSingleton,
        PoolKind::DynMonotonic,
        PoolKind::DynResetting,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            PoolKind::Fifo => "fifo",
            PoolKind::Filo => "filo",
            PoolKind::Heap => "heap",
            PoolKind::StaticSingleton => "static-singleton",
            PoolKind::DynMonotonic => "dyn-monotonic",
            PoolKind::DynResetting => "dyn-resetting",
        }
    }

    pub fn parse(s: &str) -> Result<PoolKind> {
        PoolKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown pool variant `{s}`")))
    }

    /// The static singleton keeps one seed forever and never drains it, so
    /// the energy schedule has no effect on it.
    pub fn ignores_energy(&self) -> bool {
        matches!(self, PoolKind::StaticSingleton)
    }
}

impl std::fmt::Display for PoolKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Instantiates a pool variant with the given power schedule.
pub fn make_pool(kind: PoolKind, schedule: EnergySchedule) -> Box<dyn SeedPool> {
    match kind {
        PoolKind::Fifo => Box::new(FifoPool::new(schedule)),
        PoolKind::Filo => Box::new(FiloPool::new(schedule)),
        PoolKind::Heap => Box::new(HeapPool::new(schedule)),
        PoolKind::StaticSingleton => Box::new(StaticSingletonPool::new()),
        PoolKind::DynMonotonic => Box::new(DynMonotonicPool::new(schedule)),
        PoolKind::DynResetting => Box::new(DynResettingPool::new(schedule)),
    }
}

/// Decides whether feedback is interesting enough to invest, and how
/// interesting it is.
pub trait Utility: Send + Sync {
    fn useful(&self, pool: &dyn SeedPool, feedback: Feedback) -> bool;
    fn utility(&self, pool: &dyn SeedPool, feedback: Feedback) -> i64;
}

/// Feedback is useful only when it strictly beats the best seed in the
/// pool; an empty pool accepts anything.
pub struct StrictImprovement;

impl Utility for StrictImprovement {
    fn useful(&self, pool: &dyn SeedPool, feedback: Feedback) -> bool {
        match pool.best() {
            None => true,
            Some(best) => feedback > best.feedback,
        }
    }

    fn utility(&self, _pool: &dyn SeedPool, feedback: Feedback) -> i64 {
        feedback
    }
}

/// No feedback is ever useful; turns the feedback-guided loops into pure
/// generation.
pub struct NeverUseful;

impl Utility for NeverUseful {
    fn useful(&self, _pool: &dyn SeedPool, _feedback: Feedback) -> bool {
        false
    }

    fn utility(&self, _pool: &dyn SeedPool, _feedback: Feedback) -> i64 {
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::value::Value;

    fn seed_env(id: i64) -> Env {
        let mut env = Env::new();
        env.bind("id", Value::int(id)).unwrap();
        env
    }

    fn seed_id(directive: &Directive) -> Option<i64> {
        match directive {
            Directive::Generate => None,
            Directive::Mutate(seed) => seed.env.get("id").unwrap().as_int(),
        }
    }

    #[test]
    fn empty_pools_generate() {
        let schedule = EnergySchedule::new(10);
        for kind in PoolKind::ALL {
            let pool = make_pool(kind, schedule);
            assert!(
                matches!(pool.sample(), Directive::Generate),
                "{kind} should generate when empty"
            );
            assert!(pool.best().is_none());
        }
    }

    #[test]
    fn fifo_serves_front_until_drained() {
        let mut pool = FifoPool::new(EnergySchedule::new(1));
        pool.invest(seed_env(1), 5);
        pool.invest(seed_env(2), 5);
        assert_eq!(seed_id(&pool.sample()), Some(1));
        pool.revise();
        assert_eq!(seed_id(&pool.sample()), Some(2));
        pool.revise();
        assert!(matches!(pool.sample(), Directive::Generate));
    }

    #[test]
    fn filo_serves_back_first() {
        let mut pool = FiloPool::new(EnergySchedule::new(1));
        pool.invest(seed_env(1), 5);
        pool.invest(seed_env(2), 5);
        assert_eq!(seed_id(&pool.sample()), Some(2));
        pool.revise();
        assert_eq!(seed_id(&pool.sample()), Some(1));
    }

    #[test]
    fn heap_prefers_high_feedback_then_recency() {
        let mut pool = HeapPool::new(EnergySchedule::new(2));
        pool.invest(seed_env(1), 5);
        pool.invest(seed_env(2), 9);
        pool.invest(seed_env(3), 1);
        assert_eq!(pool.best().unwrap().feedback, 9);
        assert_eq!(seed_id(&pool.sample()), Some(2));
        // Tie on feedback goes to the newer seed.
        pool.invest(seed_env(4), 9);
        assert_eq!(seed_id(&pool.sample()), Some(4));
    }

    #[test]
    fn static_singleton_hill_climbs() {
        let mut pool = StaticSingletonPool::new();
        pool.invest(seed_env(1), 5);
        pool.invest(seed_env(2), 3);
        assert_eq!(pool.best().unwrap().feedback, 5);
        // Usage never drains it.
        for _ in 0..100 {
            pool.revise();
            assert!(pool.sample().is_mutate());
        }
        pool.invest(seed_env(3), 6);
        assert_eq!(pool.best().unwrap().feedback, 6);
    }

    #[test]
    fn dyn_monotonic_generates_at_zero_energy_but_keeps_ranking() {
        let mut pool = DynMonotonicPool::new(EnergySchedule::new(2));
        pool.invest(seed_env(1), 5);
        pool.revise();
        pool.revise();
        assert!(matches!(pool.sample(), Directive::Generate));
        // Worse feedback still rejected after the energy ran out.
        pool.invest(seed_env(2), 3);
        assert!(matches!(pool.sample(), Directive::Generate));
        pool.invest(seed_env(3), 7);
        assert_eq!(seed_id(&pool.sample()), Some(3));
    }

    #[test]
    fn dyn_resetting_drops_seed_at_zero_energy() {
        let mut pool = DynResettingPool::new(EnergySchedule::new(1));
        pool.invest(seed_env(1), 5);
        pool.revise();
        assert!(pool.best().is_none());
        // Any useful seed is accepted after the reset, even a worse one.
        pool.invest(seed_env(2), 3);
        assert_eq!(seed_id(&pool.sample()), Some(2));
    }

    #[test]
    fn energy_schedules() {
        assert_eq!(EnergySchedule::new(100).initial_energy(1), 100);
        assert_eq!(EnergySchedule::linear(100).initial_energy(7), 7);
        assert_eq!(EnergySchedule::linear(100).initial_energy(-3), 1);
        assert_eq!(EnergySchedule::linear(10).initial_energy(500), 10);
    }

    #[test]
    fn pool_kind_round_trips() {
        for kind in PoolKind::ALL {
            assert_eq!(PoolKind::parse(kind.name()).unwrap(), kind);
        }
        assert!(PoolKind::parse("bogus").is_err());
    }
}
