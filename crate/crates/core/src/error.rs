use thiserror::Error;

/// Errors raised by the computations in this crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime >= 5")]
    InvalidPrime(u64),
    #[error("{value} is divisible by p = {p}")]
    NotAUnit { value: String, p: u64 },
    #[error("argument must be congruent to {expected} modulo p = {p}")]
    WrongResidue { expected: u64, p: u64 },
    #[error("precision underflow: {requested} digits requested, at most {available} attainable")]
    PrecisionUnderflow { requested: u32, available: u32 },
    #[error("insufficient q-precision: need {needed} coefficients, have {have}")]
    InsufficientPrecision { needed: usize, have: usize },
    #[error("denominator of {what} is not invertible modulo {modulus}")]
    NonInvertible { what: String, modulus: u64 },
    #[error("invalid weight {k}: {reason}")]
    InvalidWeight { k: i64, reason: &'static str },
    #[error("index {k} outside the admissible range {lo}..={hi}")]
    OutOfRange { k: i64, lo: i64, hi: i64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("incompatible moduli {0} and {1}")]
    ModulusMismatch(u64, u64),
    #[error("operators do not commute")]
    NonCommuting,
    #[error("q-series does not lie in the space: {0}")]
    NotMember(String),
    #[error("algebra is not local: {0}")]
    NonLocal(String),
    #[error("zero input: {0}")]
    ZeroInput(&'static str),
    #[error("checkpoint corrupt at line {line}: {reason}")]
    CorruptCheckpoint { line: usize, reason: String },
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
