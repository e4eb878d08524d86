//! Exact coefficient arithmetic.
//!
//! Provides:
//! - [`Symbols`]: a frozen symbol table with per-symbol Laurent flags
//! - [`Monomial`], [`Poly`]: sparse multivariate (Laurent) polynomials over big rationals
//! - [`RatFunc`]: rational functions without general gcd reduction
//! - [`CoeffExpr`]: the tagged union `Rat | Poly | RatFunc` used everywhere else
//! - [`solve_linear`]: fraction-free (Bareiss-style) exact linear solver
//! - canonical text form via [`CoeffExpr::to_canonical`] and [`parse_coeff`]

mod coeff;
mod parse;
mod poly;
mod solve;
mod symbols;

pub use coeff::{CoeffExpr, Domain, RatFunc};
pub use parse::{parse_coeff, parse_rat};
pub use poly::{Monomial, Poly};
pub use solve::{solve_exact, solve_linear, SolveError};
pub use symbols::{SymId, Symbols, SymbolsBuilder};

use num_bigint::BigInt;
use num_rational::BigRational;

/// Exact rational scalar.
pub type Rat = BigRational;

/// Rational from an integer.
pub fn rat_i(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Rational `p/q`.
pub fn rat(p: i64, q: i64) -> Rat {
    Rat::new(BigInt::from(p), BigInt::from(q))
}

/// Errors raised by coefficient arithmetic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    DivisionByZero,
    /// Division in the polynomial domain by a non-unit (the caller may
    /// promote both operands to the rational-function domain instead).
    NonUnitDivisorInPolyDomain,
    /// A symbol exponent went negative without the Laurent flag.
    NegativeExponent(String),
    DomainMismatch,
    Parse(String),
}

impl std::fmt::Display for AlgebraError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AlgebraError::DivisionByZero => write!(f, "division by zero"),
            AlgebraError::NonUnitDivisorInPolyDomain => {
                write!(f, "division by a non-unit in the polynomial domain")
            }
            AlgebraError::NegativeExponent(s) => {
                write!(f, "negative exponent on non-Laurent symbol {s}")
            }
            AlgebraError::DomainMismatch => write!(f, "operands live in different domains"),
            AlgebraError::Parse(s) => write!(f, "parse error: {s}"),
        }
    }
}

impl std::error::Error for AlgebraError {}
