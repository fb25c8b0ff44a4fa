//! The runtime environment: an ordered map from quantifier names to
//! generated values, outermost quantifier first.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::value::Value;

#[derive(Clone, Debug, Default)]
pub struct Env {
    bindings: Vec<(Arc<str>, Value)>,
}

impl Env {
    pub fn new() -> Env {
        Env::default()
    }

    pub fn with_capacity(n: usize) -> Env {
        Env {
            bindings: Vec::with_capacity(n),
        }
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    /// Appends a binding. Names must be unique within one environment.
    pub fn bind(&mut self, name: impl Into<Arc<str>>, value: Value) -> Result<()> {
        let name = name.into();
        if self.lookup(&name).is_some() {
            return Err(Error::DuplicateName(name.to_string()));
        }
        self.bindings.push((name, value));
        Ok(())
    }

    /// Appends without the duplicate check, for interpreters walking a
    /// property tree whose construction already guarantees unique names.
    #[inline]
    pub(crate) fn bind_unchecked(&mut self, name: Arc<str>, value: Value) {
        self.bindings.push((name, value));
    }

    /// Replaces the value of an existing binding, keeping its position.
    pub fn set(&mut self, name: &str, value: Value) -> Result<()> {
        match self.bindings.iter_mut().find(|(n, _)| &**n == name) {
            Some(slot) => {
                slot.1 = value;
                Ok(())
            }
            None => Err(Error::MissingBinding(name.to_string())),
        }
    }

    pub fn lookup(&self, name: &str) -> Option<&Value> {
        self.bindings
            .iter()
            .find(|(n, _)| &**n == name)
            .map(|(_, v)| v)
    }

    /// Like [`Env::lookup`] but fails loudly on absent names.
    pub fn get(&self, name: &str) -> Result<&Value> {
        self.lookup(name)
            .ok_or_else(|| Error::MissingBinding(name.to_string()))
    }

    /// Typed lookup; reports both missing bindings and payload mismatches.
    pub fn try_get<T: 'static>(&self, name: &str) -> Result<&T> {
        let value = self.get(name)?;
        value.downcast_ref::<T>().ok_or_else(|| Error::TagMismatch {
            name: name.to_string(),
            expected: std::any::type_name::<T>().to_string(),
            found: value.tag().to_string(),
        })
    }

    /// Typed lookup for predicate bodies. Panics with a descriptive message
    /// on a missing binding or payload mismatch, which runners surface as a
    /// harness error rather than a discard.
    pub fn expect<T: 'static>(&self, name: &str) -> &T {
        match self.try_get::<T>(name) {
            Ok(v) => v,
            Err(e) => panic!("{e}"),
        }
    }

    pub fn nth(&self, index: usize) -> Option<(&str, &Value)> {
        self.bindings.get(index).map(|(n, v)| (&**n, v))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Value)> {
        self.bindings.iter().map(|(n, v)| (&**n, v))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.bindings.iter().map(|(n, _)| &**n)
    }

    /// The first `n` bindings, outermost first.
    pub fn prefix(&self, n: usize) -> Env {
        Env {
            bindings: self.bindings[..n.min(self.bindings.len())].to_vec(),
        }
    }

    pub(crate) fn clear(&mut self) {
        self.bindings.clear();
    }
}
