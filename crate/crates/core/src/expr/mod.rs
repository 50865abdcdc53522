//! Exact multivariate polynomials and rational functions over Q.

mod compiled;
mod factor;
mod gcd;
mod parse;
mod poly;
mod ratexpr;
mod vars;

use thiserror::Error;

pub use compiled::CompiledExpr;
pub use factor::squarefree;
pub use gcd::gcd;
pub use parse::parse;
pub use poly::{Monomial, Poly};
pub use ratexpr::RatExpr;
pub use vars::Vars;

/// Arbitrary-precision rational scalar.
pub type Rational = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("undeclared identifier `{name}` at position {pos}")]
    UndeclaredVariable { name: String, pos: usize },
    #[error("invalid variable name `{0}`")]
    InvalidVariable(String),
    #[error("duplicate variable `{0}`")]
    DuplicateVariable(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("pole: denominator {den} vanishes at the evaluation point")]
    Pole { den: String },
    #[error("point has {got} coordinates, expected {expected}")]
    PointArity { expected: usize, got: usize },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
}

/// Parses a rational literal such as `3`, `-2/5` or `0.25`.
pub fn parse_rational(text: &str) -> Result<Rational, ExprError> {
    let t = text.trim();
    let bad = || ExprError::Syntax { pos: 0, msg: format!("invalid rational literal `{t}`") };
    if let Some((p, q)) = t.split_once('/') {
        let p: num_bigint::BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: num_bigint::BigInt = q.trim().parse().map_err(|_| bad())?;
        if num_traits::Zero::is_zero(&q) {
            return Err(ExprError::DivisionByZero);
        }
        return Ok(Rational::new(p, q));
    }
    if let Some((int, frac)) = t.split_once('.') {
        let neg = int.trim_start().starts_with('-');
        let int_digits = int.trim_start_matches(['-', '+']);
        if !frac.chars().all(|c| c.is_ascii_digit())
            || !int_digits.chars().all(|c| c.is_ascii_digit())
        {
            return Err(bad());
        }
        let digits = format!("{int_digits}{frac}");
        let mut n: num_bigint::BigInt = if digits.is_empty() { return Err(bad()) } else { digits.parse().map_err(|_| bad())? };
        if neg {
            n = -n;
        }
        let d = num_traits::pow(num_bigint::BigInt::from(10), frac.len());
        return Ok(Rational::new(n, d));
    }
    let n: num_bigint::BigInt = t.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(n))
}

/// Formats a rational as `p` or `p/q`.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub(crate) fn rational_to_f64(r: &Rational) -> f64 {
    num_traits::ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
}
