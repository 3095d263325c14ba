use thiserror::Error;

/// Errors produced by context construction, the reach engine and the drivers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("need at least two energy levels, got {0}")]
    TooFewLevels(usize),
    #[error("energies must be non-decreasing")]
    EnergiesNotAscending,
    #[error("inverse temperature must be non-negative and finite, got {0}")]
    BadBeta(f64),
    #[error("cannot rationalize {0}: expected a positive finite value")]
    Rationalize(f64),
    #[error("relative tolerance must be positive, got {0}")]
    BadTolerance(f64),
    #[error("population has length {got}, context has {want} levels")]
    LengthMismatch { got: usize, want: usize },
    #[error("population entry {index} = {value} is negative beyond tolerance")]
    NegativeEntry { index: usize, value: f64 },
    #[error("population sums to {0}, expected 1 within tolerance")]
    BadNormalization(f64),
    #[error("gamma entries must be positive and sum to 1")]
    BadGamma,
    #[error("arithmetic modes differ: {0}")]
    ModeMismatch(&'static str),
    #[error("level index {0} out of range for dimension {1}")]
    IndexOutOfRange(usize, usize),
    #[error("the two levels of an elementary control must differ")]
    EqualLevels,
    #[error("lambda = {0} outside [0, 1]")]
    LambdaOutOfRange(f64),
    #[error("evolution time must be non-negative and finite, got {0}")]
    BadTime(f64),
    #[error("curve evaluated outside [0, 1]")]
    CurveArgOutOfRange,
    #[error("sigma_a parameter outside [0, 1]")]
    SigmaParamOutOfRange,
    #[error("divergence parameter {0} is singular for this family")]
    SingularDivergenceParam(f64),
    #[error("operation needs at least {0} trajectory samples")]
    TooFewSamples(usize),
    #[error("context carries no energy ladder; rebuild it from energies and beta")]
    MissingEnergies,
    #[error("operation requires {0} arithmetic")]
    WrongMode(&'static str),
    #[error("generator: {0}")]
    Generator(String),
    #[error("descent preconditions not met: {0}")]
    DescentPrecondition(&'static str),
    #[error("descent stalled with residual {residual:e}")]
    NoProgress { residual: f64 },
    #[error("bisection endpoints do not bracket the feasibility boundary: {0}")]
    BisectionBracket(String),
    #[error("reach set hit its depth bound; infeasibility cannot be certified")]
    DepthBoundHit,
    #[error("populations belong to different contexts: {0}")]
    ContextMismatch(&'static str),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("schema: {0}")]
    Schema(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
