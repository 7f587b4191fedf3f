//! Exact rational linear algebra, a certificate-producing simplex solver and
//! double-description ray enumeration.
//!
//! Everything here is tolerance-free. Scalars are arbitrary-precision
//! rationals kept in lowest terms, so equality tests on cones and polyhedra
//! are decided exactly.

mod dd;
mod linalg;
mod lp;
pub mod serde_rational;

pub use dd::{double_description, ConeGenerators, DEFAULT_DIMENSION_CAP};
pub use linalg::{RationalMatrix, RationalVector};
pub use lp::{solve_lp, LinearProgram, LpResult, LpStatus, Multipliers};

use num_bigint::BigInt;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always normalized (denominator positive,
/// numerator and denominator coprime).
pub type Rational = num_rational::BigRational;

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

pub fn ratio(numer: i64, denom: i64) -> Rational {
    assert_ne!(denom, 0, "zero denominator");
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

/// Parses `"p/q"` or an integer literal. A zero denominator is rejected.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let trimmed = text.trim();
    let invalid = || Error::InvalidRational(text.to_string());
    let (numer, denom) = match trimmed.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (trimmed, "1"),
    };
    let numer: BigInt = numer.parse().map_err(|_| invalid())?;
    let denom: BigInt = denom.parse().map_err(|_| invalid())?;
    if denom.is_zero() {
        return Err(invalid());
    }
    Ok(Rational::new(numer, denom))
}

/// Exact conversion of a finite binary64 value (every such value is a dyadic
/// rational).
pub fn from_f64(value: f64) -> Result<Rational> {
    if !value.is_finite() {
        return Err(Error::NonFinite(value));
    }
    if value == 0.0 {
        return Ok(Rational::zero());
    }
    Rational::from_f64(value).ok_or(Error::NonFinite(value))
}

pub fn to_f64(value: &Rational) -> f64 {
    value.to_f64().unwrap_or_else(|| {
        if value.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// Formats as `p` or `p/q`.
pub fn format_rational(value: &Rational) -> String {
    if value.denom().is_one() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}
