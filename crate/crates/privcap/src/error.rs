use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("kraus operators have inconsistent shapes")]
    ShapeMismatch,
    #[error("kraus completeness residual {0:.3e} exceeds 1e-8")]
    NotTracePreserving(f64),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("kraus product count {0} exceeds cap {1}")]
    KrausBlowup(usize, usize),
    #[error("invalid probability data: {0}")]
    BadDistribution(String),
    #[error("matrix is not unitary (residual {0:.3e})")]
    NotUnitary(f64),
    #[error("parameter {name} = {value} outside valid range")]
    ParamOutOfRange { name: &'static str, value: f64 },
    #[error("dimension {dim} exceeds cap {cap}")]
    DimensionTooLarge { dim: usize, cap: usize },
    #[error("matrix is not a density matrix: {0}")]
    NotAState(String),
    #[error("curve has no sign change on the bracket")]
    NoSignChange,
    #[error("curve is not monotone non-increasing on the bracket")]
    NonMonotone,
    #[error("need at least two points")]
    TooFewPoints,
    #[error("x values must be strictly increasing")]
    UnsortedInput,
    #[error("query {0} outside the represented range")]
    OutOfRange(f64),
    #[error("decomposition part {0} has no degradability certificate")]
    UncertifiedPiece(usize),
    #[error(
        "decomposition part {0} needs a heuristic capacity value; pass allow_heuristic to accept"
    )]
    HeuristicRefused(usize),
    #[error("mixture differs from target (choi distance {0:.3e})")]
    DecompositionMismatch(f64),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
