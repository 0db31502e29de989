use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("roots are not closed under complex conjugation (unpaired value {re}{im:+}i)")]
    ConjugateClosureViolation { re: f64, im: f64 },

    #[error("non-finite value encountered at index {0}")]
    OverflowAtIndex(usize),

    #[error("root finder did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("no real nonnegative entry attains the maximum modulus")]
    NoPerronElement,

    #[error("the Perron root must strictly dominate every other modulus")]
    StrictDominanceRequired,

    #[error("spectrum does not satisfy the power-sum hypotheses")]
    HypothesesNotSatisfied,

    #[error("bound constants need at least two entries, got {0}")]
    NeedsTwoEntries(usize),

    #[error("dimension {dim} is too small (need {needed})")]
    DimensionTooSmall { dim: usize, needed: usize },

    #[error("negative entry x_{index} = {value:e}")]
    NegativeEntry { index: usize, value: f64 },

    #[error("verification failed: {what} residual {residual:e} exceeds {tolerance:e}")]
    VerificationFailed {
        what: String,
        residual: f64,
        tolerance: f64,
    },

    #[error("polynomial degrees differ ({0} vs {1})")]
    DegreeMismatch(usize, usize),

    #[error("sequence lengths differ ({0} vs {1})")]
    LengthMismatch(usize, usize),

    #[error("exhaustive matching is limited to 10 roots, got {0}")]
    TooLargeForExhaustive(usize),

    #[error("parse error at position {pos}: {msg}")]
    ParseError { pos: usize, msg: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
