//! Scalar types usable as probabilities.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational.
pub type Rational = BigRational;

/// A field-like scalar: exact rationals or IEEE floats.
pub trait Scalar: Num + Clone + PartialOrd + Debug + Send + Sync {
    /// The value `num / den`.
    fn from_ratio(num: i64, den: u64) -> Self;

    /// Equality used when validating normalization; exact unless the type
    /// rounds.
    fn approx_eq(&self, other: &Self) -> bool {
        self == other
    }

    /// `self^e` by repeated squaring.
    #[must_use]
    fn pown(&self, e: usize) -> Self {
        num_traits::pow(self.clone(), e)
    }
}

impl Scalar for f64 {
    fn from_ratio(num: i64, den: u64) -> Self {
        num as f64 / den as f64
    }

    fn approx_eq(&self, other: &Self) -> bool {
        (self - other).abs() <= 1e-12 * self.abs().max(other.abs()).max(1.0)
    }
}

impl Scalar for f32 {
    fn from_ratio(num: i64, den: u64) -> Self {
        num as f32 / den as f32
    }

    fn approx_eq(&self, other: &Self) -> bool {
        (self - other).abs() <= 1e-5 * self.abs().max(other.abs()).max(1.0)
    }
}

impl Scalar for BigRational {
    fn from_ratio(num: i64, den: u64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }
}

/// `num / den` as an exact rational.
///
/// # Panics
/// Panics if `den == 0`.
#[must_use]
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// `2^e` for possibly negative `e`.
#[must_use]
pub fn pow2(e: i64) -> Rational {
    let big = BigInt::one() << e.unsigned_abs();
    if e >= 0 {
        Rational::from_integer(big)
    } else {
        Rational::new(BigInt::one(), big)
    }
}

/// Always `num/den`, even for integers.
#[must_use]
pub fn fmt_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `a/b` or a plain integer.
///
/// # Errors
/// `Parse` on malformed input or a zero denominator.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("invalid rational {s:?}"));
    let (num, den) = match s.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (s, "1"),
    };
    let num = BigInt::from_str_radix(num, 10).map_err(|_| bad())?;
    let den = BigInt::from_str_radix(den, 10).map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(num, den))
}

/// Nearest integer (ties away from zero) and the distance to it.
#[must_use]
pub fn round_with_error(r: &Rational) -> (BigInt, Rational) {
    let rounded = r.round();
    let err = (r - &rounded).abs();
    (rounded.to_integer(), err)
}

/// Approximate `f64` value, for display-free diagnostics and log-scale math.
#[must_use]
pub fn to_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or_else(|| {
        // Scale huge or tiny values through their bit lengths.
        let nb = r.numer().bits() as i64;
        let db = r.denom().bits() as i64;
        let shift = nb - db;
        let scaled = if shift > 0 {
            r / pow2(shift)
        } else {
            r * pow2(-shift)
        };
        scaled.to_f64().unwrap_or(f64::NAN) * 2f64.powi(shift as i32)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rational("3/12").unwrap(), rat(1, 4));
        assert_eq!(parse_rational("-2").unwrap(), rat(-2, 1));
        assert_eq!(fmt_rational(&rat(6, 3)), "2/1");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("0.5").is_err());
    }

    #[test]
    fn powers_of_two() {
        assert_eq!(pow2(3), rat(8, 1));
        assert_eq!(pow2(-2), rat(1, 4));
        assert_eq!(rat(3, 2).pown(3), rat(27, 8));
    }

    #[test]
    fn rounding() {
        let (n, e) = round_with_error(&rat(7, 4));
        assert_eq!(n, BigInt::from(2));
        assert_eq!(e, rat(1, 4));
    }

    #[test]
    fn float_view_of_extreme_values() {
        let tiny = pow2(-2000) * rat(3, 1);
        let f = to_f64(&tiny);
        assert_eq!(f, 0.0);
        let mid = pow2(-1000) * rat(3, 1);
        assert!((to_f64(&mid) / (3.0 * 2f64.powi(-1000)) - 1.0).abs() < 1e-12);
    }
}
