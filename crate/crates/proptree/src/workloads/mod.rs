//! Benchmark workloads: systems under test with selectable injected
//! mutants, their properties as property trees, and annotation bundles in
//! bespoke (validity-preserving) and type-based (arbitrary-shape) variants.

use crate::combinatorial::FeatureExtractors;
use crate::env::Env;
use crate::error::{Error, Result};
use crate::pool::Feedback;
use crate::prop::PropTree;

pub mod bst;
pub mod rbt;
pub mod stlc;
pub mod synth;

/// Which annotation bundle a property is built with.
///
/// Bespoke generators produce only valid inputs and carry a validity
/// contract; type-based generators produce arbitrary shapes and guard the
/// property with a validity precondition instead, so invalid draws discard.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GenStrategy {
    Bespoke,
    TypeBased,
}

impl GenStrategy {
    pub fn name(&self) -> &'static str {
        match self {
            GenStrategy::Bespoke => "bespoke",
            GenStrategy::TypeBased => "type-based",
        }
    }

    pub fn parse(s: &str) -> Result<GenStrategy> {
        match s {
            "bespoke" => Ok(GenStrategy::Bespoke),
            "type-based" => Ok(GenStrategy::TypeBased),
            other => Err(Error::Config(format!("unknown strategy `{other}`"))),
        }
    }
}

impl std::fmt::Display for GenStrategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// A named system under test bundled with its mutants and properties.
pub struct Workload {
    pub name: &'static str,
    mutants: &'static [&'static str],
    properties: &'static [&'static str],
    builder: fn(&str, Option<usize>, GenStrategy) -> Result<PropTree>,
    feedback: fn(&Env) -> Feedback,
    extractors: fn() -> FeatureExtractors,
}

impl Workload {
    pub fn mutant_ids(&self) -> &'static [&'static str] {
        self.mutants
    }

    pub fn property_ids(&self) -> &'static [&'static str] {
        self.properties
    }

    /// Accepts `none`, a descriptive mutant id, or a positional alias
    /// `M<k>` (1-based).
    pub fn resolve_mutant(&self, id: &str) -> Result<Option<usize>> {
        if id.eq_ignore_ascii_case("none") {
            return Ok(None);
        }
        if let Some(rest) = id.strip_prefix('M').or_else(|| id.strip_prefix('m')) {
            if let Ok(k) = rest.parse::<usize>() {
                if (1..=self.mutants.len()).contains(&k) {
                    return Ok(Some(k - 1));
                }
                return Err(Error::UnknownMutant(id.to_string()));
            }
        }
        match self.mutants.iter().position(|m| *m == id) {
            Some(index) => Ok(Some(index)),
            None => Err(Error::UnknownMutant(id.to_string())),
        }
    }

    /// The descriptive id a mutant argument refers to.
    pub fn canonical_mutant(&self, id: &str) -> Result<String> {
        Ok(match self.resolve_mutant(id)? {
            None => "none".to_string(),
            Some(index) => self.mutants[index].to_string(),
        })
    }

    /// Builds the property tree for one task under the given strategy.
    pub fn property(&self, property: &str, mutant: &str, strategy: GenStrategy) -> Result<PropTree> {
        if !self.properties.contains(&property) {
            return Err(Error::UnknownProperty(property.to_string()));
        }
        let mutant = self.resolve_mutant(mutant)?;
        (self.builder)(property, mutant, strategy)
    }

    /// Default feedback for the targeted and fuzzing runners: the size of
    /// the generated input.
    pub fn feedback(&self, env: &Env) -> Feedback {
        (self.feedback)(env)
    }

    pub fn feedback_fn(&self) -> fn(&Env) -> Feedback {
        self.feedback
    }

    /// Constructor-interaction extractors for the combinatorial runner.
    pub fn extractors(&self) -> FeatureExtractors {
        (self.extractors)()
    }
}

pub static BST: Workload = Workload {
    name: "bst",
    mutants: &bst::MUTANTS,
    properties: &bst::PROPERTIES,
    builder: bst::build,
    feedback: bst::feedback,
    extractors: bst::extractors,
};

pub static RBT: Workload = Workload {
    name: "rbt",
    mutants: &rbt::MUTANTS,
    properties: &rbt::PROPERTIES,
    builder: rbt::build,
    feedback: rbt::feedback,
    extractors: rbt::extractors,
};

pub static STLC: Workload = Workload {
    name: "stlc",
    mutants: &stlc::MUTANTS,
    properties: &stlc::PROPERTIES,
    builder: stlc::build,
    feedback: stlc::feedback,
    extractors: stlc::extractors,
};

pub fn all() -> [&'static Workload; 3] {
    [&BST, &RBT, &STLC]
}

pub fn by_name(name: &str) -> Result<&'static Workload> {
    all()
        .into_iter()
        .find(|w| w.name == name)
        .ok_or_else(|| Error::UnknownWorkload(name.to_string()))
}
