//! Scalar abstraction shared by the replica weight tables and partition sums.
//!
//! `f64` and `f32` give fast approximate evaluation; [`BigRational`] gives
//! exact results whenever the inputs are exact decimals.

use std::fmt::Debug;
use std::iter::Sum;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive};

use crate::error::{Error, Result};

pub trait Scalar: Num + Clone + Debug + PartialOrd + Signed + Sum + Send + Sync + 'static {
    /// True when arithmetic is exact (no rounding).
    const EXACT: bool;

    fn from_ratio(num: i64, den: i64) -> Self;

    /// Converts a probability or coupling given as `f64`.
    ///
    /// Exact scalars read the shortest decimal form of the value, so `0.3`
    /// becomes `3/10` rather than the nearest binary fraction.
    fn from_param(x: f64) -> Result<Self>;

    fn from_rational(v: &BigRational) -> Self;

    fn to_f64(&self) -> f64;

    fn from_usize(n: usize) -> Self {
        Self::from_ratio(n as i64, 1)
    }

    fn powi(&self, exp: u32) -> Self {
        num_traits::pow(self.clone(), exp as usize)
    }

    /// Equality for exact types, relative closeness for floats.
    fn close_to(&self, other: &Self, rel_tol: f64) -> bool {
        if Self::EXACT {
            return self == other;
        }
        let (a, b) = (self.to_f64(), other.to_f64());
        (a - b).abs() <= rel_tol * a.abs().max(b.abs()).max(1.0)
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn from_param(x: f64) -> Result<Self> {
        finite(x)
    }

    fn from_rational(v: &BigRational) -> Self {
        ToPrimitive::to_f64(v).unwrap_or(f64::NAN)
    }

    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Scalar for f32 {
    const EXACT: bool = false;

    fn from_ratio(num: i64, den: i64) -> Self {
        (num as f64 / den as f64) as f32
    }

    fn from_param(x: f64) -> Result<Self> {
        finite(x).map(|v| v as f32)
    }

    fn from_rational(v: &BigRational) -> Self {
        ToPrimitive::to_f32(v).unwrap_or(f32::NAN)
    }

    fn to_f64(&self) -> f64 {
        f64::from(*self)
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn from_param(x: f64) -> Result<Self> {
        parse_decimal(&format!("{}", finite(x)?))
    }

    fn from_rational(v: &BigRational) -> Self {
        v.clone()
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

fn finite(x: f64) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::InvalidParams(format!("non-finite parameter {x}")))
    }
}

/// Parses a plain or scientific decimal literal into an exact rational.
pub fn parse_decimal(s: &str) -> Result<BigRational> {
    let bad = || Error::InvalidParams(format!("not a decimal number: {s:?}"));
    let s = s.trim();
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    if !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let mut num = BigInt::from_str_radix(&digits, 10).map_err(|_| bad())?;
    if neg {
        num = -num;
    }
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from_u8(10).expect("small constant");
    let value = if scale >= 0 {
        BigRational::from_integer(num * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(num, num_traits::pow(ten, (-scale) as usize))
    };
    Ok(value)
}

/// `d^k` for a small non-negative integer base.
pub(crate) fn int_pow<T: Scalar>(d: usize, k: usize) -> T {
    let mut acc = T::one();
    let base = T::from_usize(d);
    for _ in 0..k {
        acc = acc * base.clone();
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::from_ratio(n, d)
    }

    #[test]
    fn decimals_parse_exactly() {
        assert_eq!(parse_decimal("0.3").unwrap(), r(3, 10));
        assert_eq!(parse_decimal("-1.25").unwrap(), r(-5, 4));
        assert_eq!(parse_decimal("1e-2").unwrap(), r(1, 100));
        assert_eq!(parse_decimal("2.5E3").unwrap(), r(2500, 1));
        assert_eq!(parse_decimal("7").unwrap(), r(7, 1));
        assert_eq!(parse_decimal(".5").unwrap(), r(1, 2));
        for bad in ["", ".", "abc", "1.2.3", "1e", "--1"] {
            assert!(parse_decimal(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn params_round_trip_through_display() {
        for x in [0.0, 0.3, 0.01, 1.0, 1e-5, 0.123456789] {
            let q = BigRational::from_param(x).unwrap();
            assert_eq!(Scalar::to_f64(&q), x);
        }
        assert!(BigRational::from_param(f64::NAN).is_err());
        assert!(f64::from_param(f64::INFINITY).is_err());
    }

    #[test]
    fn closeness() {
        assert!(1.0f64.close_to(&(1.0 + 1e-14), 1e-12));
        assert!(!1.0f64.close_to(&1.001, 1e-12));
        assert!(!r(1, 3).close_to(&r(1, 3 + 1), 1.0));
        assert_eq!(int_pow::<BigRational>(3, 4), r(81, 1));
        assert_eq!(int_pow::<f32>(2, 10), 1024.0);
    }
}
