//! Dynamically typed values with runtime type tags.

use std::any::Any;
use std::fmt;
use std::sync::Arc;

/// Object-safe bound for payloads stored in a [`Value`].
///
/// Blanket-implemented for every `Any + Debug + Send + Sync` type, so any
/// ordinary data type qualifies.
pub trait AnyValue: Any + fmt::Debug + Send + Sync {
    fn as_any(&self) -> &dyn Any;
}

impl<T: Any + fmt::Debug + Send + Sync> AnyValue for T {
    fn as_any(&self) -> &dyn Any {
        self
    }
}

#[derive(Clone)]
enum Tag {
    Static(&'static str),
    Shared(Arc<str>),
}

impl Tag {
    fn as_str(&self) -> &str {
        match self {
            Tag::Static(s) => s,
            Tag::Shared(s) => s,
        }
    }
}

#[derive(Clone)]
enum Repr {
    // Common scalar payloads are stored inline to keep the per-trial
    // allocation count down in tight runner loops.
    Int(i64),
    Bool(bool),
    Shared { tag: Tag, payload: Arc<dyn AnyValue> },
}

/// A generated value: an opaque payload plus a type tag such as `"i64"`,
/// `"bst"`, or `"expr"`. Extraction with the wrong payload type fails
/// loudly instead of corrupting.
#[derive(Clone)]
pub struct Value(Repr);

impl Value {
    pub const INT_TAG: &'static str = "i64";
    pub const BOOL_TAG: &'static str = "bool";

    pub fn int(v: i64) -> Value {
        Value(Repr::Int(v))
    }

    pub fn bool(v: bool) -> Value {
        Value(Repr::Bool(v))
    }

    /// Wraps an arbitrary payload under the given tag.
    ///
    /// Panics if `tag` is empty: every value must carry a non-empty tag.
    pub fn new<T: AnyValue>(tag: &'static str, payload: T) -> Value {
        assert!(!tag.is_empty(), "value tags must be non-empty");
        Value(Repr::Shared {
            tag: Tag::Static(tag),
            payload: Arc::new(payload),
        })
    }

    /// Like [`Value::new`] for tags built at runtime.
    pub fn with_tag<T: AnyValue>(tag: impl Into<Arc<str>>, payload: T) -> Value {
        let tag = tag.into();
        assert!(!tag.is_empty(), "value tags must be non-empty");
        Value(Repr::Shared {
            tag: Tag::Shared(tag),
            payload: Arc::new(payload),
        })
    }

    pub fn tag(&self) -> &str {
        match &self.0 {
            Repr::Int(_) => Self::INT_TAG,
            Repr::Bool(_) => Self::BOOL_TAG,
            Repr::Shared { tag, .. } => tag.as_str(),
        }
    }

    /// Borrows the payload as `T`, or `None` on a type mismatch.
    pub fn downcast_ref<T: 'static>(&self) -> Option<&T> {
        match &self.0 {
            Repr::Int(v) => (v as &dyn Any).downcast_ref::<T>(),
            Repr::Bool(v) => (v as &dyn Any).downcast_ref::<T>(),
            // Deref through the Arc so the blanket impl sees the payload
            // itself, not the Arc.
            Repr::Shared { payload, .. } => (**payload).as_any().downcast_ref::<T>(),
        }
    }

    pub fn as_int(&self) -> Option<i64> {
        self.downcast_ref::<i64>().copied()
    }

    pub fn as_bool(&self) -> Option<bool> {
        self.downcast_ref::<bool>().copied()
    }
}

impl fmt::Debug for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Int(v) => write!(f, "<i64> {v}"),
            Repr::Bool(v) => write!(f, "<bool> {v}"),
            Repr::Shared { tag, payload } => write!(f, "<{}> {payload:?}", tag.as_str()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tags_and_downcasts() {
        let v = Value::int(7);
        assert_eq!(v.tag(), "i64");
        assert_eq!(v.as_int(), Some(7));
        assert_eq!(v.as_bool(), None);

        let t = Value::new("pair", (1u32, 2u32));
        assert_eq!(t.tag(), "pair");
        assert_eq!(t.downcast_ref::<(u32, u32)>(), Some(&(1, 2)));
        // Mismatched extraction is detectable, never silent.
        assert!(t.downcast_ref::<i64>().is_none());
    }

    #[test]
    #[should_panic(expected = "non-empty")]
    fn empty_tag_rejected() {
        let _ = Value::new("", 3i64);
    }

    #[test]
    fn debug_form_is_tagged() {
        assert_eq!(format!("{:?}", Value::int(5)), "<i64> 5");
        assert_eq!(format!("{:?}", Value::new("word", "hi")), "<word> \"hi\"");
    }
}
