//! Crate-wide error type.
//!
//! Everything here is a *resource* or *domain* failure. Mathematical
//! "absence" results (a rational with no m-th root, a map with no
//! iterate relation) are `Option`s at the call site, not errors.

use num_bigint::BigInt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Integer factorization gave up within the configured budget.
    /// The unfactored cofactor is reported; no guess is ever returned.
    #[error("factorization budget exceeded, unfactored cofactor {remaining}")]
    Unfactored { remaining: BigInt },

    /// An iterate would exceed the configured degree budget.
    #[error("iterate degree {required} exceeds budget {budget}")]
    DegreeBudget { required: u64, budget: u64 },

    /// Orbit coordinates exceeded the configured bit-size budget.
    #[error("orbit coordinate size {bits} bits exceeds budget {budget}")]
    BitBudget { bits: u64, budget: u64 },

    /// A rational map constructor was handed the zero (or 0/0) function.
    #[error("zero or undefined rational map")]
    ZeroMap,

    /// A rational map constructor was handed a constant function.
    #[error("constant function is not a valid self-map of P^1")]
    ConstantMap,

    /// Conjugation requires a Moebius (degree-1, invertible) map.
    #[error("conjugating map must have degree 1")]
    NotMoebius,

    /// multiplicative_order requires coprime arguments.
    #[error("{j} is not invertible modulo {n}")]
    NotCoprime { j: BigInt, n: BigInt },

    /// Mismatched moduli in a power-class operation.
    #[error("power classes have different moduli ({0} vs {1})")]
    ModulusMismatch(u32, u32),

    /// Division by the zero polynomial or zero rational function.
    #[error("division by zero")]
    DivisionByZero,

    /// A family constructor was handed parameters outside its domain.
    #[error("invalid family parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
