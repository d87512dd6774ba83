use thiserror::Error;

/// Failure modes shared by all laboratory operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LabError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("orbit point {step} hit the break point and no side can be inferred")]
    BreakCollision { step: usize },

    #[error("precision exhausted at level {level}: gap {gap:e} is below the resolution floor")]
    PrecisionExhausted { level: usize, gap: f64 },

    #[error("exact periodic return: rotation number is {p}/{q}")]
    PeriodicOrbit { p: u64, q: u64 },

    #[error("rotation number comparison with {p}/{q} cannot be certified")]
    Undecidable { p: u64, q: u64 },

    #[error("initial bracket does not straddle the target rotation number")]
    NonMonotoneBracket,

    #[error("requested depth {requested} exceeds available depth {available}")]
    InvalidDepth { requested: usize, available: usize },

    #[error("insufficient data: need at least {needed} samples, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("degenerate least-squares fit")]
    DegenerateFit,

    #[error("return pair leaves the fractional-linear family (residual {residual:e})")]
    OutOfFamily { residual: f64 },

    #[error("break point lies inside iterate {k} of the interval")]
    BreakInInterior { k: usize },

    #[error("continued fractions differ at quotient {index}")]
    CfMismatch { index: usize },

    #[error("insufficient levels: need {needed}, got {got}")]
    InsufficientLevels { needed: usize, got: usize },

    #[error("regression is degenerate")]
    DegenerateRegression,
}

pub type Result<T> = std::result::Result<T, LabError>;
