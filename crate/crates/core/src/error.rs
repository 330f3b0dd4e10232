//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("vertex {0} exceeds the degree bound")]
    DegreeBoundViolated(u32),
    #[error("self-loop at vertex {0}")]
    SelfLoop(u32),
    #[error("duplicate edge {0} {1}")]
    DuplicateEdge(u32, u32),
    #[error("vertex {0} out of range for n = {1}")]
    VertexOutOfRange(u32, usize),
    #[error("invalid generator parameters: {0}")]
    InvalidModelParams(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("rooted disc violates its invariants: {0}")]
    DiscInvariantViolated(String),
    #[error("disc radii differ: {0} vs {1}")]
    MismatchedRadius(u32, u32),
    #[error("catalog exceeds the cap of {cap} types")]
    CatalogTooLarge { cap: usize },
    #[error("{edges} edges exceed the exact-enumeration cap of {cap}")]
    TooManyEdges { edges: usize, cap: usize },
    #[error("graph has no edges")]
    EmptyGraph,
    #[error("duplicate root {0}")]
    DuplicateRoot(u32),
    #[error("sample size {s} exceeds vertex count {n}")]
    SampleTooLarge { s: usize, n: usize },
    #[error("observed type not present in catalog: {0}")]
    UnknownType(String),
    #[error("zero diagonal observation probability for {0}")]
    SingularLambda(String),
    #[error("observation matrix failed validation: {0}")]
    RealizabilityViolation(String),
    #[error("disc radius {k} too small, need at least {need}")]
    RadiusTooSmall { k: u32, need: u32 },
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
