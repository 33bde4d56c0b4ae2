//! String-backed identifier types.
//!
//! Vertices, edges, controls and alphabet symbols are all named by opaque
//! strings chosen by the caller; keeping them as distinct types prevents the
//! very easy mistake of passing a stack edge where a control is expected.

use std::borrow::Borrow;
use std::fmt;

macro_rules! string_id {
    ($(#[$doc:meta])* $name:ident) => {
        $(#[$doc])*
        #[derive(
            Clone,
            PartialEq,
            Eq,
            PartialOrd,
            Ord,
            Hash,
            serde::Serialize,
            serde::Deserialize,
        )]
        #[serde(transparent)]
        pub struct $name(pub String);

        impl $name {
            pub fn new(s: impl Into<String>) -> Self {
                Self(s.into())
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}({:?})", stringify!($name), self.0)
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                Self(s.to_owned())
            }
        }

        impl From<String> for $name {
            fn from(s: String) -> Self {
                Self(s)
            }
        }

        impl Borrow<str> for $name {
            fn borrow(&self) -> &str {
                &self.0
            }
        }
    };
}

string_id!(
    /// A vertex of a stack (base) graph.
    VertexId
);
string_id!(
    /// An edge of a stack (base) graph.
    EdgeId
);
string_id!(
    /// A boundary control state.
    ControlId
);
string_id!(
    /// An input symbol.
    Symbol
);

/// A finite input word.
pub type Word = Vec<Symbol>;

/// Builds a [`Word`] from string literals; mostly useful in tests.
pub fn word<I, S>(symbols: I) -> Word
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    symbols.into_iter().map(|s| Symbol::new(s)).collect()
}
