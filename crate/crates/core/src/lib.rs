//! Exact arithmetic for orbits of rational self-maps of P^1 over Q.
//!
//! The crate answers questions about the interaction of a degree-d map
//! phi with the m-th power map: genera of the superelliptic curves
//! y^m = phi^n(x), the class of phi^n in Q(x)*/Q(x)*^m, post-critical
//! portraits and orbifold signatures, and certified descriptions of
//! { n : phi^n(a) is an m-th power } as finite unions of arithmetic
//! progressions.
//!
//! All arithmetic is exact; resource limits (factorization effort,
//! iterate degree, orbit bit-size) surface as typed errors or explicit
//! truncation flags, never as approximations.

pub mod arith;
pub mod error;
pub mod families;
pub mod genus;
pub mod orbits;
pub mod portrait;
pub mod powerclass;
pub mod qpoly;
pub mod ratmap;

pub use error::Error;

/// Arbitrary-precision rational scalar used throughout the crate.
pub type Rational = num_rational::BigRational;
/// Arbitrary-precision integer.
pub type Int = num_bigint::BigInt;
