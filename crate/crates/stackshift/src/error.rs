use crate::ids::{ControlId, EdgeId, Symbol, VertexId};

/// Errors shared across the crate.
///
/// Rejection of an input word by the automaton is *not* an error; the engine
/// returns `None` for that. Errors signal misuse (unknown identifiers,
/// malformed data) or a typed negative outcome of a procedure
/// (e.g. [`Error::NotFiniteTypeDyck`]).
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("no such vertex: {0}")]
    NoSuchVertex(VertexId),

    #[error("no such edge: {0}")]
    NoSuchEdge(EdgeId),

    #[error("duplicate edge id: {0}")]
    DuplicateEdge(EdgeId),

    #[error("edges do not compose into a path at {0}")]
    NotAPath(EdgeId),

    #[error("no such control: {0}")]
    NoSuchControl(ControlId),

    #[error("spec error in {field}: {message}")]
    Spec { field: String, message: String },

    #[error("push/pop label overlap: {symbol} at control {control}")]
    PushPopOverlap { control: ControlId, symbol: Symbol },

    #[error("pop target not in boundary set: {target} for edge {edge}")]
    PopTargetNotInBoundary { edge: EdgeId, target: ControlId },

    #[error("unknown symbol: {0}")]
    UnknownSymbol(Symbol),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("json: {0}")]
    Json(String),

    #[error("empty word has no semigroup product")]
    EmptyWord,

    #[error("malformed signed edge symbol: {0} (expected <edge>- or <edge>+)")]
    BadSignedSymbol(String),

    #[error(
        "not finite-type-Dyck exportable: push path for ({control}, {symbol}) has length {len}"
    )]
    NotFiniteTypeDyck {
        control: ControlId,
        symbol: Symbol,
        len: usize,
    },

    #[error("window of length {want} is not admissible: {got}")]
    WindowNotAdmissible { want: usize, got: String },

    #[error("visibility constants not found below cap {cap}")]
    ConstantsNotFound { cap: usize },

    #[error("{0}")]
    Builder(String),
}

impl Error {
    pub(crate) fn spec(field: &str, message: impl Into<String>) -> Self {
        Error::Spec {
            field: field.to_owned(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
