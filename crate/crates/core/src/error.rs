use thiserror::Error;

/// Errors produced by every module of the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("triangle inequality violated: d({x},{y}) > d({x},{z}) + d({z},{y})")]
    TriangleViolation { x: usize, y: usize, z: usize },
    #[error("point {0} has nonpositive mass")]
    NonpositiveMass(usize),
    #[error("distance matrix is not symmetric at ({0},{1})")]
    AsymmetricDistance(usize, usize),
    #[error("distinct points {0} and {1} are at zero distance")]
    ZeroDistanceDistinct(usize, usize),
    #[error("nonzero self distance at point {0}")]
    NonzeroSelfDistance(usize),
    #[error("non-finite value: {0}")]
    NonFinite(String),
    #[error("edge ({u},{v}) has length {len} shorter than the metric distance {dist}")]
    EdgeTooShort { u: usize, v: usize, len: f64, dist: f64 },
    #[error("edge graph is disconnected (point {0} unreachable from 0)")]
    DisconnectedGraph(usize),
    #[error("space has {requested} points, exceeding the cap of {cap}")]
    SizeOverflow { requested: usize, cap: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("point {0} is out of range")]
    PointOutOfRange(usize),

    #[error("subset is empty")]
    EmptySubset,
    #[error("weight is not strictly positive at point {0}")]
    NonpositiveWeight(usize),
    #[error("g is not strictly positive at point {0}")]
    NonpositiveG(usize),
    #[error("maximal function vanishes identically")]
    ZeroFunction,
    #[error("exponent {0} is outside the admissible range")]
    ExponentRange(f64),
    #[error("budget {budget} is exceeded already at eps = 0 (characteristic {value})")]
    BudgetExceededAtZero { budget: f64, value: f64 },

    #[error("fixed-point verification failed after {doublings} doublings of c")]
    NoConvergence { doublings: usize },

    #[error("domain must be a nonempty proper subset")]
    NotProper,
    #[error("no chain joins Whitney balls {0} and {1}")]
    Unreachable(usize, usize),
    #[error("points {0} and {1} are not connected inside the domain")]
    Disconnected(usize, usize),
    #[error("space has no edge graph")]
    NoEdgeGraph,
    #[error("precondition failed: {0}")]
    PreconditionFail(String),
    #[error("discrete path too coarse to certify inclusion: {0}")]
    InclusionFail(String),
    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },
    #[error("unsupported file version {found} (expected {expected})")]
    VersionMismatch { found: u64, expected: u64 },
    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NoConvergence { .. } => 3,
            Error::Parse { .. } | Error::VersionMismatch { .. } | Error::Io(_) => 4,
            _ => 2,
        }
    }

    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::TriangleViolation { .. } => "TriangleViolation",
            Error::NonpositiveMass(_) => "NonpositiveMass",
            Error::AsymmetricDistance(..) => "AsymmetricDistance",
            Error::ZeroDistanceDistinct(..) => "ZeroDistanceDistinct",
            Error::NonzeroSelfDistance(_) => "NonzeroSelfDistance",
            Error::NonFinite(_) => "NonFinite",
            Error::EdgeTooShort { .. } => "EdgeTooShort",
            Error::DisconnectedGraph(_) => "DisconnectedGraph",
            Error::SizeOverflow { .. } => "SizeOverflow",
            Error::InvalidArgument(_) => "InvalidArgument",
            Error::PointOutOfRange(_) => "PointOutOfRange",
            Error::EmptySubset => "EmptySubset",
            Error::NonpositiveWeight(_) => "NonpositiveWeight",
            Error::NonpositiveG(_) => "NonpositiveG",
            Error::ZeroFunction => "ZeroFunction",
            Error::ExponentRange(_) => "ExponentRange",
            Error::BudgetExceededAtZero { .. } => "BudgetExceededAtZero",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::NotProper => "NotProper",
            Error::Unreachable(..) => "Unreachable",
            Error::Disconnected(..) => "Disconnected",
            Error::NoEdgeGraph => "NoEdgeGraph",
            Error::PreconditionFail(_) => "PreconditionFail",
            Error::InclusionFail(_) => "InclusionFail",
            Error::InvariantViolation(_) => "InvariantViolation",
            Error::Parse { .. } => "ParseError",
            Error::VersionMismatch { .. } => "VersionMismatch",
            Error::Io(_) => "IoError",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
