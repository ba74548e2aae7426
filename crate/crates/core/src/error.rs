use thiserror::Error;

/// Everything that can go wrong in the library.
///
/// Variants are grouped by how a caller should react: precondition
/// violations (bad input), numerical breaches (the solver result failed its
/// own residual check) and cap breaches (a simulation hit a hard limit).
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("vertex index {0} out of range")]
    VertexIndex(usize),
    #[error("edge ({0}, {1}) has non-positive weight {2}")]
    NonPositiveWeight(String, String, f64),
    #[error("self-loop at `{0}`")]
    SelfLoop(String),
    #[error("edge ({0}, {1}) listed twice with conflicting weights {2} and {3}")]
    ConflictingEdge(String, String, f64, f64),
    #[error("graph is disconnected ({0} components)")]
    Disconnected(usize),
    #[error("graph has no vertices")]
    EmptyGraph,
    #[error("no value for vertex `{0}` in field")]
    MissingValue(String),
    #[error("domain reaches the truncation edge: {0}")]
    Clipped(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("numerical residual breach: {0}")]
    Residual(String),
    #[error("internal solver failure: {0}")]
    Solver(String),
    #[error("cap exceeded: {0}")]
    CapExceeded(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn pre(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
