//! Error type shared across the crate.

use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// A modulus that was required to be prime is composite.
    CompositeModulus(u64),
    /// A number-field modulus is not monic.
    NonMonicModulus,
    /// A number-field modulus is reducible; carries a found factor.
    ReducibleModulus { factor: String },
    /// Element or matrix does not belong to the expected field context.
    CtxMismatch,
    /// Vector/matrix dimensions do not agree.
    DimensionMismatch { expected: usize, got: usize },
    /// Division by zero in a field context.
    DivisionByZero,
    /// The zero vector where a nonzero one is required.
    ZeroVector,
    /// Input string could not be parsed.
    Parse(String),
    /// Exact elimination refused: matrix too large, use modular bounds.
    TooLargeForExactRank { entries: usize },
    /// Enumeration budget exceeded.
    BudgetExceeded { needed: u128, budget: u128 },
    /// The prime q is too small for the requested construction.
    QTooSmall { q: u64, needed: u64 },
    /// Relation sign pattern cannot be reordered to fit the construction.
    SignPattern(String),
    /// The requested L set degenerates (collisions or zero members).
    DegenerateL(String),
    /// Seeded sampling failed to satisfy the independence conditions.
    SamplingExhausted { q: u64, seed: u64, attempts: u64 },
    /// A per-hyperplane case check failed; names the offending object.
    CaseCheckFailed(String),
    /// Rank precondition of an operation does not hold.
    RankPrecondition(String),
    /// A declared invariant failed verification.
    Invariant(String),
    /// Catch-all for invalid operation arguments.
    Invalid(String),
    /// Filesystem or serialization problem.
    Io(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::CompositeModulus(p) => write!(f, "composite modulus {p}"),
            Error::NonMonicModulus => write!(f, "modulus is not monic"),
            Error::ReducibleModulus { factor } => {
                write!(f, "modulus is reducible: factor {factor}")
            }
            Error::CtxMismatch => write!(f, "field context mismatch"),
            Error::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            Error::DivisionByZero => write!(f, "division by zero"),
            Error::ZeroVector => write!(f, "zero vector not allowed here"),
            Error::Parse(msg) => write!(f, "parse error: {msg}"),
            Error::TooLargeForExactRank { entries } => write!(
                f,
                "matrix with {entries} entries refuses exact elimination; use modular rank bounds"
            ),
            Error::BudgetExceeded { needed, budget } => {
                write!(f, "enumeration budget exceeded: need {needed}, budget {budget}")
            }
            Error::QTooSmall { q, needed } => {
                write!(f, "q = {q} too small, need at least {needed}")
            }
            Error::SignPattern(msg) => write!(f, "sign pattern not satisfiable: {msg}"),
            Error::DegenerateL(msg) => write!(f, "L degenerate: {msg}"),
            Error::SamplingExhausted { q, seed, attempts } => write!(
                f,
                "sampling budget exhausted after {attempts} attempts (q = {q}, seed = {seed})"
            ),
            Error::CaseCheckFailed(msg) => write!(f, "hyperplane case check failed: {msg}"),
            Error::RankPrecondition(msg) => write!(f, "rank precondition fails: {msg}"),
            Error::Invariant(msg) => write!(f, "invariant violated: {msg}"),
            Error::Invalid(msg) => write!(f, "invalid argument: {msg}"),
            Error::Io(msg) => write!(f, "io error: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}
