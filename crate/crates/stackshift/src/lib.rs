//! Pushdown (Shannon graph) presentations of Dyck-like subshifts.
//!
//! A finite [`spec::AutomatonSpec`] (a stack graph, boundary control sets,
//! and push/pop label maps) presents an infinite deterministic real-time
//! pushdown automaton whose states are pairs of a stack path and a control.
//! This crate builds those presentations for the classical families (Dyck,
//! Markov-Dyck, Béal–Heller and friends), validates the defining
//! conditions, enumerates and decides the presented languages (with the
//! graph inverse semigroup as an independent oracle), decides forward
//! separation, and recodes suitable automata to finite-type-Dyck data.
//!
//! ```
//! use stackshift::examples::build_dyck;
//! use stackshift::engine::{member, PdaState};
//! use stackshift::ids::word;
//!
//! let spec = build_dyck(2).unwrap();
//! assert!(member(&spec, &word(["p1", "q1"])).unwrap());
//! assert!(!member(&spec, &word(["p1", "q2"])).unwrap());
//! ```

pub mod engine;
pub mod error;
pub mod examples;
pub mod graph;
pub mod ids;
mod machine;
pub mod recode;
pub mod semigroup;
pub mod separation;
pub mod sofic;
pub mod spec;
#[cfg(test)]
pub(crate) mod testgen;

pub use error::{Error, Result};
pub use ids::{ControlId, EdgeId, Symbol, VertexId, Word};
