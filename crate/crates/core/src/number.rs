//! Scalars that may carry an exact rational value alongside their binary64
//! approximation, and the small field abstraction the boundary-system code is
//! written against.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always kept in lowest terms with a positive
/// denominator.
pub type Rational = BigRational;

/// Arithmetic carrier for the boundary system and the diagnostics.
///
/// Implemented for [`Rational`] (exact mode) and `f64` (numerical fallback).
/// The only place the two differ is the zero test.
pub trait Field: Clone + fmt::Debug + fmt::Display + Num + Signed + PartialOrd {
    const EXACT: bool;

    fn from_i64(v: i64) -> Self;

    fn to_f64(&self) -> f64;

    /// Exact mode ignores `tol`; float mode compares `|self| <= tol`.
    fn is_zero_within(&self, tol: f64) -> bool;

    fn half() -> Self {
        Self::one() / Self::from_i64(2)
    }

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }
}

impl Field for Rational {
    const EXACT: bool = true;

    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn is_zero_within(&self, _tol: f64) -> bool {
        self.is_zero()
    }
}

impl Field for f64 {
    const EXACT: bool = false;

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn is_zero_within(&self, tol: f64) -> bool {
        self.abs() <= tol
    }
}

/// Parses `"p/q"`, an integer, or a decimal literal (optionally with an
/// exponent) into an exact rational. Decimal text is read digit by digit, so
/// `"0.1"` becomes exactly `1/10`.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    let bad = || Error::Parse(format!("not a rational literal: {text:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((num, den)) = s.split_once('/') {
        if den.contains('/') {
            return Err(bad());
        }
        let num = parse_rational(num)?;
        let den = parse_rational(den)?;
        if den.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {text:?}")));
        }
        return Ok(num / den);
    }

    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let exp: i32 = s[pos + 1..].parse().map_err(|_| bad())?;
            (&s[..pos], exp)
        }
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.as_bytes().first() {
        Some(b'-') => (true, &mantissa[1..]),
        Some(b'+') => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut value = Rational::from_integer(BigInt::from_str(&all_digits).map_err(|_| bad())?);
    let scale = exponent - frac_part.len() as i32;
    let ten = Rational::from_i64(10);
    let power = num_traits::pow(ten, scale.unsigned_abs() as usize);
    if scale >= 0 {
        value *= power;
    } else {
        value /= power;
    }
    Ok(if negative { -value } else { value })
}

/// Renders a rational as `"p/q"`, or `"p"` when the denominator is 1.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// A scalar read from user input: its binary64 value, plus the exact rational
/// when the literal was rational.
#[derive(Debug, Clone, PartialEq)]
pub struct Number {
    approx: f64,
    exact: Option<Rational>,
}

impl Number {
    pub fn float(v: f64) -> Self {
        Number {
            approx: v,
            exact: None,
        }
    }

    pub fn exact(r: Rational) -> Self {
        Number {
            approx: Field::to_f64(&r),
            exact: Some(r),
        }
    }

    pub fn from_i64(v: i64) -> Self {
        Number::exact(Rational::from_i64(v))
    }

    pub fn value(&self) -> f64 {
        self.approx
    }

    pub fn exact_value(&self) -> Option<&Rational> {
        self.exact.as_ref()
    }
}

impl FromStr for Number {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if let Ok(r) = parse_rational(s) {
            return Ok(Number::exact(r));
        }
        let v: f64 = s
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("not a number: {s:?}")))?;
        if !v.is_finite() {
            return Err(Error::Parse(format!("non-finite number: {s:?}")));
        }
        Ok(Number::float(v))
    }
}

impl fmt::Display for Number {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.exact {
            Some(r) => f.write_str(&format_rational(r)),
            None => write!(f, "{}", self.approx),
        }
    }
}
