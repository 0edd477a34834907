use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("logarithm too close to the branch cut (eigenvalue within {distance:.3e} of -1)")]
    BranchCutProximity { distance: f64 },
    #[error("operands belong to different groups: {0}")]
    TagMismatch(String),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("endpoints do not agree (gap {0:.3e})")]
    EndpointMismatch(f64),
    #[error("support violation: {0}")]
    SupportViolation(String),
    #[error("function is not flat to order {order} at zero")]
    NotFlat { order: u32 },
    #[error("degenerate cell at ({row}, {col})")]
    DegenerateCell { row: usize, col: usize },
    #[error("finite-difference step underflow")]
    StepUnderflow,
    #[error("elements come from different extension models")]
    ModelMismatch,
    #[error("elements lie over different loops")]
    NotComparable,
    #[error("element is not central (base deviation {0:.3e})")]
    NotCentral(f64),
    #[error("loop passes within {0:.3e} of the antipode; no geodesic contraction")]
    AntipodeDegenerate(f64),
    #[error("supports overlap: {0}")]
    SupportsOverlap(String),
    #[error("cocycle is not normalized")]
    NotNormalized,
    #[error("extension carries no component labels")]
    NoLabels,
    #[error("bad interval: {0}")]
    BadInterval(String),
    #[error("table fails the cocycle identity at {0}")]
    NotACocycle(String),
    #[error("bihomomorphism is not alternating at {0}")]
    NotAlternating(String),
    #[error("group mismatch: {0}")]
    GroupMismatch(String),
    #[error("group of order {0} exceeds the enumeration guard")]
    GroupTooLarge(u64),
    #[error("base loop is not flat at pi")]
    NotFlatAtPi,
    #[error("extension is not disjoint commutative: {0}")]
    NotDisjointCommutative(String),
    #[error("checks failed: {0}")]
    ChecksFailed(String),
    #[error("morphisms are not composable (gap {0:.3e})")]
    NotComposable(f64),
    #[error("sign branch ambiguous (correction phase {0:.6})")]
    SignBranchAmbiguous(f64),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
