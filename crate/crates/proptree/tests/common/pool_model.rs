//! Executable reference models of the six seed-pool variants, written
//! directly from their behavioral contracts. Each model is a few lines of
//! obvious code over `(id, feedback, energy)` triples; the conformance
//! tests drive a real pool and its model with the same operation sequence
//! and require identical observations.

use std::collections::VecDeque;

/// What an observer can see of a pool: the sampled directive and the best
/// seed, both projected to (id, feedback, energy).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Observation {
    pub sampled: Option<(i64, i64, u64)>,
    pub best: Option<(i64, i64)>,
}

pub trait PoolModel {
    fn invest(&mut self, id: i64, feedback: i64);
    fn revise(&mut self);
    fn observe(&self) -> Observation;
}

type Entry = (i64, i64, u64);

fn best_of<'a>(entries: impl Iterator<Item = &'a Entry>) -> Option<(i64, i64)> {
    // Ties go to the most recently invested seed.
    entries
        .enumerate()
        .max_by_key(|(i, (_, fb, _))| (*fb, *i))
        .map(|(_, (id, fb, _))| (*id, *fb))
}

pub struct FifoModel {
    pub max_energy: u64,
    seeds: VecDeque<Entry>,
}

impl FifoModel {
    pub fn new(max_energy: u64) -> Self {
        FifoModel {
            max_energy,
            seeds: VecDeque::new(),
        }
    }
}

impl PoolModel for FifoModel {
    fn invest(&mut self, id: i64, feedback: i64) {
        self.seeds.push_back((id, feedback, self.max_energy));
    }
    fn revise(&mut self) {
        if let Some(front) = self.seeds.front_mut() {
            front.2 -= 1;
            if front.2 == 0 {
                self.seeds.pop_front();
            }
        }
    }
    fn observe(&self) -> Observation {
        Observation {
            sampled: self.seeds.front().copied(),
            best: best_of(self.seeds.iter()),
        }
    }
}

pub struct FiloModel {
    pub max_energy: u64,
    seeds: VecDeque<Entry>,
}

impl FiloModel {
    pub fn new(max_energy: u64) -> Self {
        FiloModel {
            max_energy,
            seeds: VecDeque::new(),
        }
    }
}

impl PoolModel for FiloModel {
    fn invest(&mut self, id: i64, feedback: i64) {
        self.seeds.push_back((id, feedback, self.max_energy));
    }
    fn revise(&mut self) {
        if let Some(back) = self.seeds.back_mut() {
            back.2 -= 1;
            if back.2 == 0 {
                self.seeds.pop_back();
            }
        }
    }
    fn observe(&self) -> Observation {
        Observation {
            sampled: self.seeds.back().copied(),
            best: best_of(self.seeds.iter()),
        }
    }
}

pub struct HeapModel {
    pub max_energy: u64,
    seeds: Vec<Entry>,
}

impl HeapModel {
    pub fn new(max_energy: u64) -> Self {
        HeapModel {
            max_energy,
            seeds: Vec::new(),
        }
    }
    fn top_index(&self) -> Option<usize> {
        // Highest feedback; ties to the newest (largest index).
        (0..self.seeds.len()).max_by_key(|&i| (self.seeds[i].1, i))
    }
}

impl PoolModel for HeapModel {
    fn invest(&mut self, id: i64, feedback: i64) {
        self.seeds.push((id, feedback, self.max_energy));
    }
    fn revise(&mut self) {
        if let Some(i) = self.top_index() {
            self.seeds[i].2 -= 1;
            if self.seeds[i].2 == 0 {
                self.seeds.remove(i);
            }
        }
    }
    fn observe(&self) -> Observation {
        let top = self.top_index().map(|i| self.seeds[i]);
        Observation {
            sampled: top,
            best: top.map(|(id, fb, _)| (id, fb)),
        }
    }
}

pub struct StaticSingletonModel {
    seed: Option<Entry>,
}

impl StaticSingletonModel {
    pub fn new() -> Self {
        StaticSingletonModel { seed: None }
    }
}

impl PoolModel for StaticSingletonModel {
    fn invest(&mut self, id: i64, feedback: i64) {
        if self.seed.is_none_or(|(_, fb, _)| feedback > fb) {
            self.seed = Some((id, feedback, 1));
        }
    }
    fn revise(&mut self) {}
    fn observe(&self) -> Observation {
        Observation {
            sampled: self.seed,
            best: self.seed.map(|(id, fb, _)| (id, fb)),
        }
    }
}

pub struct DynMonotonicModel {
    pub max_energy: u64,
    seed: Option<Entry>,
}

impl DynMonotonicModel {
    pub fn new(max_energy: u64) -> Self {
        DynMonotonicModel {
            max_energy,
            seed: None,
        }
    }
}

impl PoolModel for DynMonotonicModel {
    fn invest(&mut self, id: i64, feedback: i64) {
        if self.seed.is_none_or(|(_, fb, _)| feedback > fb) {
            self.seed = Some((id, feedback, self.max_energy));
        }
    }
    fn revise(&mut self) {
        if let Some(seed) = &mut self.seed {
            seed.2 = seed.2.saturating_sub(1);
        }
    }
    fn observe(&self) -> Observation {
        Observation {
            sampled: self.seed.filter(|(_, _, e)| *e > 0),
            best: self.seed.map(|(id, fb, _)| (id, fb)),
        }
    }
}

pub struct DynResettingModel {
    pub max_energy: u64,
    seed: Option<Entry>,
}

impl DynResettingModel {
    pub fn new(max_energy: u64) -> Self {
        DynResettingModel {
            max_energy,
            seed: None,
        }
    }
}

impl PoolModel for DynResettingModel {
    fn invest(&mut self, id: i64, feedback: i64) {
        if self.seed.is_none_or(|(_, fb, _)| feedback > fb) {
            self.seed = Some((id, feedback, self.max_energy));
        }
    }
    fn revise(&mut self) {
        if let Some((_, _, energy)) = &mut self.seed {
            *energy -= 1;
            if *energy == 0 {
                self.seed = None;
            }
        }
    }
    fn observe(&self) -> Observation {
        Observation {
            sampled: self.seed,
            best: self.seed.map(|(id, fb, _)| (id, fb)),
        }
    }
}
