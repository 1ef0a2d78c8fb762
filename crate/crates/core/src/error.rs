use thiserror::Error;

/// Errors raised across the library.
///
/// Each variant has a stable machine-readable name (see [`Error::kind`]) used by the CLI
/// and mirrored by the status codes of the C interface.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("edge {edge} has non-positive or non-finite length {length}")]
    NonPositiveLength { edge: usize, length: f64 },

    #[error("edge {edge} references vertex {vertex}, but the graph has {vertex_count} vertices")]
    DanglingEndpoint {
        edge: usize,
        vertex: usize,
        vertex_count: usize,
    },

    #[error("edge {edge} is a loop, which a simple graph does not allow")]
    LoopEdge { edge: usize },

    #[error("edges {first} and {second} join the same pair of vertices")]
    ParallelEdge { first: usize, second: usize },

    #[error("vertex degree must be at least 1")]
    ZeroDegree,

    #[error("label {label} is out of range for a cyclic group of order {order}")]
    LabelOutOfRange { label: usize, order: usize },

    #[error("orders {n1} and {n2} are not coprime")]
    NotCoprime { n1: usize, n2: usize },

    #[error("group order must be positive")]
    ZeroOrder,

    #[error("invalid order: {0}")]
    InvalidOrder(String),

    #[error("jump {jump} is outside 1..={max}")]
    JumpOutOfRange { jump: usize, max: usize },

    #[error("jump {jump} appears more than once")]
    DuplicateJump { jump: usize },

    #[error("expected {expected} values, got {got}: {what}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("phase {re}{im:+}i is not of unit modulus")]
    NonUnitPhase { re: f64, im: f64 },

    #[error("vertex {vertex} has no vertex condition")]
    MissingCondition { vertex: usize },

    #[error("vertex {vertex}: {reason}")]
    UnsupportedCondition { vertex: usize, reason: String },

    #[error("invalid group action: {0}")]
    InvalidAction(String),

    #[error("action is not transitive on original vertices: {0}")]
    NotTransitive(String),

    #[error("shifted fundamental domains do not tile the graph: {0}")]
    CoverageGap(String),

    #[error("isomorphism check failed: {0}")]
    IsomorphismCheckFailed(String),

    #[error("sample layout mismatch: {0}")]
    OrientationMismatch(String),

    #[error("grid too coarse near k = {k}: {reason}")]
    GridTooCoarse { k: f64, reason: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("document error: {0}")]
    Document(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Stable variant name, e.g. `"NonPositiveLength"`.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NonPositiveLength { .. } => "NonPositiveLength",
            Error::DanglingEndpoint { .. } => "DanglingEndpoint",
            Error::LoopEdge { .. } => "LoopEdge",
            Error::ParallelEdge { .. } => "ParallelEdge",
            Error::ZeroDegree => "ZeroDegree",
            Error::LabelOutOfRange { .. } => "LabelOutOfRange",
            Error::NotCoprime { .. } => "NotCoprime",
            Error::ZeroOrder => "ZeroOrder",
            Error::InvalidOrder(_) => "InvalidOrder",
            Error::JumpOutOfRange { .. } => "JumpOutOfRange",
            Error::DuplicateJump { .. } => "DuplicateJump",
            Error::LengthMismatch { .. } => "LengthMismatch",
            Error::NonUnitPhase { .. } => "NonUnitPhase",
            Error::MissingCondition { .. } => "MissingCondition",
            Error::UnsupportedCondition { .. } => "UnsupportedCondition",
            Error::InvalidAction(_) => "InvalidAction",
            Error::NotTransitive(_) => "NotTransitive",
            Error::CoverageGap(_) => "CoverageGap",
            Error::IsomorphismCheckFailed(_) => "IsomorphismCheckFailed",
            Error::OrientationMismatch(_) => "OrientationMismatch",
            Error::GridTooCoarse { .. } => "GridTooCoarse",
            Error::InvalidArgument(_) => "InvalidArgument",
            Error::Document(_) => "Document",
            Error::Io(_) => "Io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
