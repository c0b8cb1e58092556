use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("pair ({0}, {1}) carries the arc color in both directions")]
    SymmetricArc(usize, usize),

    #[error("vertex {0} out of range for a graph on {1} vertices")]
    VertexOutOfRange(usize, usize),

    #[error("vertex set must be nonempty")]
    EmptyVertexSet,

    #[error("vertex sets overlap at vertex {0}")]
    Overlap(usize),

    #[error("invalid permutation: {0}")]
    InvalidPerm(String),

    #[error("group too large: more than {cap} elements")]
    GroupTooLarge { cap: usize },

    #[error("budget exceeded: {what} is {value}, cap is {cap}")]
    Budget {
        what: &'static str,
        value: usize,
        cap: usize,
    },

    #[error("group is not transitive")]
    NotTransitive,

    #[error("partition is not invariant under the group: {0}")]
    NotInvariant(String),

    #[error("not a partition of the ground set: {0}")]
    BadPartition(String),

    #[error("partial map is not a partial isomorphism: vertex color differs at {0} -> {1}")]
    VertexColorViolation(usize, usize),

    #[error("partial map is not a partial isomorphism: edge color differs on pair ({0}, {1})")]
    EdgeColorViolation(usize, usize),

    #[error("partial map is not injective or malformed: {0}")]
    BadPartialMap(String),

    #[error("invalid color move: {0}")]
    InvalidMove(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("illegal family spec: {0}")]
    IllegalSpec(String),

    #[error("spec syntax error at position {pos}: {msg}")]
    SpecSyntax { pos: usize, msg: String },

    #[error("classification violation: {0}")]
    ClassificationViolation(String),

    #[error("io error: {0}")]
    Io(String),

    #[error("malformed JSON at line {line}, column {column}: {msg}")]
    Json {
        line: usize,
        column: usize,
        msg: String,
    },
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json {
            line: e.line(),
            column: e.column(),
            msg: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
