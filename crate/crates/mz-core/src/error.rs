//! Library-wide error type.

use std::fmt;

/// Result alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong while building fields or computing series.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// The requested characteristic is not a prime (or is out of range).
    NonPrime(u64),
    /// A custom reduction polynomial factors over the prime field.
    ReduciblePolynomial(String),
    /// No builtin reduction polynomial is known for this (p, m) and none was
    /// supplied.
    MissingReduction { p: u64, m: u32 },
    /// Elements or structures over two different fields were mixed.
    FieldMismatch,
    /// Division by zero (field element or exactly-zero series).
    DivisionByZero,
    /// A rational function with zero denominator.
    ZeroDenominator,
    /// An enumeration or work budget was exceeded.
    BudgetExceeded {
        what: &'static str,
        needed: u64,
        budget: u64,
    },
    /// Two compositions that must have equal weight do not.
    WeightMismatch { left: u64, right: u64 },
    /// A composition needs at least one part and all parts must be >= 1.
    EmptyComposition,
    /// Parameters outside a function's documented domain.
    InvalidParams(String),
    /// Unparseable textual input.
    Parse(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NonPrime(p) => write!(f, "{p} is not a usable prime characteristic"),
            Error::ReduciblePolynomial(s) => write!(f, "reduction polynomial {s} is reducible"),
            Error::MissingReduction { p, m } => {
                write!(f, "no builtin reduction polynomial for p={p}, m={m}; supply one")
            }
            Error::FieldMismatch => write!(f, "elements of different fields were mixed"),
            Error::DivisionByZero => write!(f, "division by zero"),
            Error::ZeroDenominator => write!(f, "rational function with zero denominator"),
            Error::BudgetExceeded { what, needed, budget } => {
                write!(f, "budget exceeded for {what}: needed {needed}, budget {budget}")
            }
            Error::WeightMismatch { left, right } => {
                write!(f, "weight mismatch: left {left} vs right {right}")
            }
            Error::EmptyComposition => write!(f, "compositions need at least one part, each >= 1"),
            Error::InvalidParams(s) => write!(f, "invalid parameters: {s}"),
            Error::Parse(s) => write!(f, "parse error: {s}"),
        }
    }
}

impl std::error::Error for Error {}
