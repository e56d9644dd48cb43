//! Exact arithmetic kernel.
//!
//! Everything symbolic in the crate is built on [`Poly`], a sparse multivariate
//! polynomial with arbitrary-precision rational coefficients. No floating point
//! is used on these paths; every check downstream is an exact-zero test.

mod integrate;
mod linalg;
mod matrix;
mod poly;
mod tensor;

pub use integrate::{integrate_exact_one_form, integrate_exact_two_form};
pub use linalg::{express_in_span, inertia, invert, solve};
pub use matrix::{ConstSymMatrix, PolyMatrix, Signature};
pub use poly::{FloatPoly, Monomial, Poly};
pub use tensor::PolyTensor;

use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;

/// Coefficient field for every symbolic object.
pub type Rational = BigRational;

/// Builds the rational `num/den`. Panics if `den == 0`.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Builds the integer `v` as a rational.
pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// Parses `p` or `p/q` (optional leading minus) into a reduced rational.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().ok()?;
    let den: BigInt = den.parse().ok()?;
    if den == BigInt::from(0) {
        return None;
    }
    Some(Rational::new(num, den))
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AlgebraError {
    #[error("variable count mismatch: {left} vs {right}")]
    VarMismatch { left: usize, right: usize },
    #[error("variable index {index} out of range for {n_vars} variables")]
    IndexOutOfRange { index: usize, n_vars: usize },
    #[error("expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("matrix is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },
    #[error("matrix is singular")]
    Singular,
    #[error("form is not closed at indices {indices:?}: residual {residual}")]
    NotClosed { indices: Vec<usize>, residual: Box<Poly> },
}
