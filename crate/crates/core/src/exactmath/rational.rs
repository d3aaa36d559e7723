//! Exact big-rational scalars.
//!
//! [`Rational`] is `num_rational::BigRational`, which keeps the denominator
//! positive and the fraction reduced after every operation. This module adds
//! the textual forms used throughout the crate: `"p/q"` strings for
//! serialization, exact parsing of decimal literals, and fixed-digit decimal
//! rendering.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Commutative ring operations shared by scalars and polynomials, so that
/// determinants and recurrences can run over any of them.
pub trait Ring:
    Clone
    + PartialEq
    + fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn ring_zero() -> Self;
    fn ring_one() -> Self;
    fn from_rational(q: &Rational) -> Self;
    fn is_ring_zero(&self) -> bool;

    fn from_int(n: i64) -> Self {
        Self::from_rational(&int(n))
    }
}

impl Ring for Rational {
    fn ring_zero() -> Self {
        Zero::zero()
    }
    fn ring_one() -> Self {
        One::one()
    }
    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }
    fn is_ring_zero(&self) -> bool {
        Zero::is_zero(self)
    }
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `n/d`; panics when `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"p/q"`, an integer, or a decimal literal with optional exponent
/// (`"0.25"`, `"-1.5e-3"`). Decimals convert exactly.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    let bad = || Error::ParseRational(text.to_string());
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((num, den)) = s.split_once('/') {
        let n = parse_rational(num)?;
        let d = parse_rational(den)?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(n / d);
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => {
            let e: i64 = s[i + 1..].parse().map_err(|_| bad())?;
            (&s[..i], e)
        }
        None => (s, 0),
    };
    let (negative, body) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (whole, frac) = match body.split_once('.') {
        Some((w, f)) => (w, f),
        None => (body, ""),
    };
    if whole.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !whole.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{whole}{frac}");
    let mut value = Rational::from_integer(digits.parse::<BigInt>().map_err(|_| bad())?);
    let scale = exponent - frac.len() as i64;
    let ten = BigInt::from(10u32);
    let power = Rational::from_integer(num_traits::pow(ten, scale.unsigned_abs() as usize));
    if scale >= 0 {
        value *= power;
    } else {
        value /= power;
    }
    Ok(if negative { -value } else { value })
}

/// `"p/q"`, or `"p"` when the denominator is one.
pub fn format_rational(q: &Rational) -> String {
    q.to_string()
}

/// Truncates long renderings for human-facing tables.
pub fn format_rational_capped(q: &Rational, max_chars: usize) -> String {
    let s = q.to_string();
    if s.chars().count() <= max_chars {
        s
    } else {
        let approx = to_f64(q);
        let head: String = s.chars().take(max_chars.saturating_sub(1)).collect();
        if approx.is_finite() {
            format!("≈{approx:.12e}")
        } else {
            format!("{head}…")
        }
    }
}

pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        // Ratios of huge integers: scale down by the bit-length difference.
        let nb = q.numer().bits() as i64;
        let db = q.denom().bits() as i64;
        let shift = nb - db;
        let scaled = if shift > 0 {
            q / Rational::from_integer(BigInt::one() << (shift as usize))
        } else {
            q * Rational::from_integer(BigInt::one() << ((-shift) as usize))
        };
        scaled.to_f64().unwrap_or(f64::NAN) * 2f64.powi(shift as i32)
    })
}

pub fn from_f64(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

/// Decimal rendering truncated toward zero to `digits` places after the point.
pub fn to_decimal_string(q: &Rational, digits: usize) -> String {
    let negative = q.is_negative();
    let a = q.abs();
    let scale = num_traits::pow(BigInt::from(10u32), digits);
    let scaled = (a.numer() * &scale).div_floor(a.denom());
    let (int_part, frac_part) = scaled.div_rem(&scale);
    let mut s = String::new();
    if negative && !(int_part.is_zero() && frac_part.is_zero()) {
        s.push('-');
    }
    s.push_str(&int_part.to_string());
    if digits > 0 {
        let f = frac_part.to_string();
        s.push('.');
        s.push_str(&"0".repeat(digits - f.len()));
        s.push_str(&f);
    }
    s
}

/// `10^(-digits)` as an exact rational.
pub fn decimal_width(digits: usize) -> Rational {
    Rational::new(BigInt::one(), num_traits::pow(BigInt::from(10u32), digits))
}

pub fn sign(q: &Rational) -> Ordering {
    match q.numer().sign() {
        Sign::Minus => Ordering::Less,
        Sign::NoSign => Ordering::Equal,
        Sign::Plus => Ordering::Greater,
    }
}

/// Rising factorial `x (x+1) ... (x+k-1)`; empty product is one.
pub fn pochhammer(x: &Rational, k: usize) -> Rational {
    (0..k).fold(int(1), |acc, j| acc * (x + int(j as i64)))
}

pub fn factorial(k: usize) -> Rational {
    (1..=k).fold(int(1), |acc, j| acc * int(j as i64))
}

/// A closed rational interval guaranteed to contain some real number.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalInterval {
    pub lo: Rational,
    pub hi: Rational,
}

impl RationalInterval {
    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) / int(2)
    }

    pub fn to_f64(&self) -> f64 {
        to_f64(&self.midpoint())
    }
}

/// Encloses `sqrt(q)` in an interval of width at most `width`.
pub fn sqrt_enclosure(q: &Rational, width: &Rational) -> Result<RationalInterval> {
    if q.is_negative() {
        return Err(Error::InvalidParams(format!("square root of negative {q}")));
    }
    let mut lo = Rational::zero();
    let mut hi = if q > &int(1) { q.clone() } else { int(1) };
    // Seed from the float estimate when it is consistent.
    if let Some(est) = from_f64(to_f64(q).sqrt()) {
        let pad = &est * rat(1, 1_000_000) + rat(1, 1_000_000_000);
        let a = &est - &pad;
        let b = &est + &pad;
        if !a.is_negative() && &a * &a <= *q && &b * &b >= *q {
            lo = a;
            hi = b;
        }
    }
    while &hi - &lo > *width {
        let mid = (&lo + &hi) / int(2);
        if &mid * &mid <= *q {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(RationalInterval { lo, hi })
}

/// Serde adapter storing a [`Rational`] as a `"p/q"` string.
pub mod serde_rational {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for `Vec<Rational>`.
pub mod serde_rational_vec {
    use super::*;
    use serde::ser::SerializeSeq;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for q in v {
            seq.serialize_element(&format_rational(q))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Vec<Rational>, D::Error> {
        let items = Vec::<String>::deserialize(d)?;
        items
            .iter()
            .map(|t| parse_rational(t).map_err(serde::de::Error::custom))
            .collect()
    }
}

/// Serde adapter for `Option<Rational>`.
pub mod serde_rational_opt {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(
        q: &Option<Rational>,
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        match q {
            Some(q) => s.serialize_some(&format_rational(q)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Option<Rational>, D::Error> {
        let text = Option::<String>::deserialize(d)?;
        text.map(|t| parse_rational(&t).map_err(serde::de::Error::custom))
            .transpose()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals_exactly() {
        assert_eq!(parse_rational("3/6").unwrap(), rat(1, 2));
        assert_eq!(parse_rational("0.25").unwrap(), rat(1, 4));
        assert_eq!(parse_rational("-1.5e-3").unwrap(), rat(-3, 2000));
        assert_eq!(parse_rational("12").unwrap(), int(12));
        assert_eq!(parse_rational("2.5/0.5").unwrap(), int(5));
        assert_eq!(parse_rational(".5").unwrap(), rat(1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn denominator_stays_positive_and_reduced() {
        let q = Rational::new(BigInt::from(6), BigInt::from(-4));
        assert_eq!(q.numer(), &BigInt::from(-3));
        assert_eq!(q.denom(), &BigInt::from(2));
        assert_eq!(format_rational(&q), "-3/2");
    }

    #[test]
    fn decimal_rendering_truncates() {
        assert_eq!(to_decimal_string(&rat(1, 3), 5), "0.33333");
        assert_eq!(to_decimal_string(&rat(-7, 2), 2), "-3.50");
        assert_eq!(to_decimal_string(&int(4), 0), "4");
        assert_eq!(to_decimal_string(&rat(1, 200), 2), "0.00");
    }

    #[test]
    fn sqrt_enclosure_brackets_root() {
        let w = decimal_width(30);
        let iv = sqrt_enclosure(&int(2), &w).unwrap();
        assert!(&iv.lo * &iv.lo <= int(2));
        assert!(&iv.hi * &iv.hi >= int(2));
        assert!(iv.width() <= w);
        let exact = sqrt_enclosure(&rat(9, 4), &decimal_width(10)).unwrap();
        assert!(exact.lo <= rat(3, 2) && exact.hi >= rat(3, 2));
    }

    #[test]
    fn pochhammer_is_rising() {
        assert_eq!(pochhammer(&int(3), 3), int(60));
        assert_eq!(pochhammer(&int(-2), 3), int(0));
        assert_eq!(pochhammer(&int(-2), 2), int(2));
        assert_eq!(pochhammer(&rat(1, 2), 0), int(1));
    }

    #[test]
    fn huge_ratio_converts_to_float() {
        let big = Rational::from_integer(BigInt::one() << 2000usize);
        let q = &big / (&big * int(3));
        assert!((to_f64(&q) - 1.0 / 3.0).abs() < 1e-15);
    }
}
