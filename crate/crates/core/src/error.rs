use thiserror::Error;

/// Errors raised by the library.
///
/// Everything except [`Error::Invariant`] is a caller-side precondition
/// failure. `Invariant` means a computed object failed one of its own
/// structural checks, which indicates a bug rather than bad input.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("modulus {0} exceeds the supported bound {bound}", bound = crate::numtheory::MAX_MODULUS)]
    ModulusTooLarge(u64),

    #[error("order must be at least {min}, got {got}")]
    OrderTooSmall { got: u64, min: u64 },

    #[error("moduli {0} and {1} are not coprime")]
    NonCoprimeModuli(u64, u64),

    #[error("{a} does not solve x^2 - x + 1 = 0 (mod {n})")]
    NotASolution { n: u64, a: u64 },

    #[error("Hensel lift precondition failed: {0}")]
    LiftPrecondition(String),

    #[error("vertex {v} out of range for order {n}")]
    VertexOutOfRange { v: u64, n: u64 },

    #[error("{m} is not a unit modulo {n}")]
    NotAUnit { m: u64, n: u64 },

    #[error("invalid circulant: {0}")]
    InvalidCirculant(String),

    #[error("division by zero in Z[rho]")]
    DivisionByZero,

    #[error("invalid Eisenstein-Jacobi integer: {0}")]
    InvalidEj(String),

    #[error("no Diophantine witness found within |r|, |s| <= {bound}")]
    NoWitness { bound: i64 },

    #[error("incompatible circulant/EJ pair: {0}")]
    Incompatible(String),

    #[error("order {n} exceeds the verification bound {bound}")]
    BoundExceeded { n: u64, bound: u64 },

    #[error("{m} is not a proper nontrivial divisor of {n}")]
    BadDivisor { n: u64, m: u64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    /// True for errors that signal a bug in the library rather than bad input.
    pub fn is_internal(&self) -> bool {
        matches!(self, Error::Invariant(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
