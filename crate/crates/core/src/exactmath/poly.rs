use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::rational::{format_rational, int, parse_rational, to_f64, Rational, Ring};
use crate::error::{Error, Result};

/// Dense univariate polynomial over the rationals, lowest degree first.
///
/// Trailing zero coefficients are always stripped, so the zero polynomial is
/// the empty coefficient list and has degree −1.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct RationalPoly {
    coeffs: Vec<Rational>,
}

impl RationalPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        RationalPoly { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| int(c)).collect())
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    /// The indeterminate itself.
    pub fn x() -> Self {
        Self::from_ints(&[0, 1])
    }

    /// `x - root`.
    pub fn linear_root(root: &Rational) -> Self {
        Self::new(vec![-root.clone(), int(1)])
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Coefficient of `x^k`, zero beyond the degree.
    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn degree(&self) -> isize {
        self.coeffs.len() as isize - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(|c| c.is_one())
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + to_f64(c))
    }

    /// Evaluates at an element of any ring, e.g. substitutes a polynomial.
    pub fn eval_ring<T: Ring>(&self, x: &T) -> T {
        self.coeffs.iter().rev().fold(T::ring_zero(), |acc, c| {
            acc * x.clone() + T::from_rational(c)
        })
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * int(k as i64))
                .collect(),
        )
    }

    pub fn nth_derivative(&self, m: usize) -> Self {
        (0..m).fold(self.clone(), |p, _| p.derivative())
    }

    /// Multiplies by `x^k`.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![Rational::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Self::new(coeffs)
    }

    /// Euclidean division: `(quotient, remainder)` with
    /// `deg(remainder) < deg(divisor)`.
    pub fn div_rem(&self, divisor: &Self) -> Result<(Self, Self)> {
        if divisor.is_zero() {
            return Err(Error::DivisionByZeroPolynomial);
        }
        let dd = divisor.degree();
        let lead = divisor.leading();
        let mut rem = self.coeffs.clone();
        if self.degree() < dd {
            return Ok((Self::default(), self.clone()));
        }
        let mut quot = vec![Rational::zero(); (self.degree() - dd + 1) as usize];
        for i in (0..quot.len()).rev() {
            let c = &rem[i + dd as usize] / &lead;
            if !c.is_zero() {
                for (j, dc) in divisor.coeffs.iter().enumerate() {
                    rem[i + j] -= &c * dc;
                }
            }
            quot[i] = c;
        }
        rem.truncate(dd as usize);
        Ok((Self::new(quot), Self::new(rem)))
    }

    pub fn rem(&self, divisor: &Self) -> Result<Self> {
        Ok(self.div_rem(divisor)?.1)
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let lead = self.leading();
        self.scale(&(int(1) / lead))
    }

    /// Monic greatest common divisor (zero when both inputs are zero).
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Yun's square-free decomposition: returns `(f_i, i)` with
    /// `self = c * prod f_i^i`, each `f_i` square-free, monic, pairwise coprime.
    pub fn square_free_decomposition(&self) -> Vec<(RationalPoly, usize)> {
        let mut out = Vec::new();
        if self.degree() < 1 {
            return out;
        }
        let f = self.monic();
        let df = f.derivative();
        let mut a = f.gcd(&df);
        let mut b = f.div_rem(&a).expect("gcd nonzero").0;
        let mut c = df.div_rem(&a).expect("gcd nonzero").0;
        let mut d = &c - &b.derivative();
        let mut i = 1;
        loop {
            a = b.gcd(&d);
            if a.degree() > 0 {
                out.push((a.clone(), i));
            }
            b = b.div_rem(&a).expect("gcd nonzero").0;
            if b.degree() < 1 {
                break;
            }
            c = d.div_rem(&a).expect("gcd nonzero").0;
            d = &c - &b.derivative();
            i += 1;
        }
        out
    }

    pub fn square_free_part(&self) -> Self {
        self.square_free_decomposition()
            .into_iter()
            .fold(RationalPoly::from_ints(&[1]), |acc, (f, _)| &acc * &f)
    }

    /// Scales to an integer polynomial with coprime coefficients and positive
    /// leading coefficient.
    pub fn primitive_integer(&self) -> Vec<BigInt> {
        if self.is_zero() {
            return Vec::new();
        }
        let lcm = self
            .coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| c.numer() * (&lcm / c.denom()))
            .collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        let sign = if ints.last().is_some_and(|c| c.is_negative()) {
            -BigInt::one()
        } else {
            BigInt::one()
        };
        ints.into_iter().map(|c| c / &g * &sign).collect()
    }

    /// `p(q(x))`.
    pub fn compose(&self, inner: &Self) -> Self {
        self.eval_ring(inner)
    }

    pub fn to_f64_coeffs(&self) -> Vec<f64> {
        self.coeffs.iter().map(to_f64).collect()
    }

    pub fn display_with(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let negative = c.is_negative();
            let mag = c.abs();
            if out.is_empty() {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            let show_coeff = k == 0 || !mag.is_one();
            if show_coeff {
                let s = format_rational(&mag);
                if s.contains('/') && k > 0 {
                    out.push_str(&format!("({s})"));
                } else {
                    out.push_str(&s);
                }
                if k > 0 {
                    out.push('*');
                }
            }
            match k {
                0 => {}
                1 => out.push_str(var),
                _ => out.push_str(&format!("{var}^{k}")),
            }
        }
        out
    }
}

impl Ring for RationalPoly {
    fn ring_zero() -> Self {
        Self::default()
    }
    fn ring_one() -> Self {
        Self::from_ints(&[1])
    }
    fn from_rational(q: &Rational) -> Self {
        Self::constant(q.clone())
    }
    fn is_ring_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl fmt::Display for RationalPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_with("x"))
    }
}

impl fmt::Debug for RationalPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RationalPoly({})", self)
    }
}

impl<'a> Add<&'a RationalPoly> for &'a RationalPoly {
    type Output = RationalPoly;
    fn add(self, rhs: &RationalPoly) -> RationalPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        RationalPoly::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl<'a> Sub<&'a RationalPoly> for &'a RationalPoly {
    type Output = RationalPoly;
    fn sub(self, rhs: &RationalPoly) -> RationalPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        RationalPoly::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl<'a> Mul<&'a RationalPoly> for &'a RationalPoly {
    type Output = RationalPoly;
    fn mul(self, rhs: &RationalPoly) -> RationalPoly {
        if self.is_zero() || rhs.is_zero() {
            return RationalPoly::default();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RationalPoly::new(out)
    }
}

impl Neg for &RationalPoly {
    type Output = RationalPoly;
    fn neg(self) -> RationalPoly {
        RationalPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

macro_rules! owned_binop {
    ($tr:ident, $method:ident) => {
        impl $tr for RationalPoly {
            type Output = RationalPoly;
            fn $method(self, rhs: RationalPoly) -> RationalPoly {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $tr<&'a RationalPoly> for RationalPoly {
            type Output = RationalPoly;
            fn $method(self, rhs: &RationalPoly) -> RationalPoly {
                (&self).$method(rhs)
            }
        }
    };
}

owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);

impl Neg for RationalPoly {
    type Output = RationalPoly;
    fn neg(self) -> RationalPoly {
        -&self
    }
}

impl Serialize for RationalPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let strings: Vec<String> = self.coeffs.iter().map(format_rational).collect();
        strings.serialize(s)
    }
}

impl<'de> Deserialize<'de> for RationalPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let strings = Vec::<String>::deserialize(d)?;
        let coeffs = strings
            .iter()
            .map(|s| parse_rational(s).map_err(serde::de::Error::custom))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(RationalPoly::new(coeffs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::rational::rat;

    #[test]
    fn product_expands() {
        let z = RationalPoly::x();
        let zm1 = RationalPoly::from_ints(&[-1, 1]);
        assert_eq!(&z * &zm1, RationalPoly::from_ints(&[0, -1, 1]));
    }

    #[test]
    fn derivative_power_rule() {
        // z^2 - a21 z with a21 = 7/3
        let a21 = rat(7, 3);
        let p = RationalPoly::new(vec![int(0), -a21.clone(), int(1)]);
        assert_eq!(p.derivative(), RationalPoly::new(vec![-a21, int(2)]));
    }

    #[test]
    fn exact_division() {
        let p = RationalPoly::from_ints(&[0, -1, 0, 1]);
        let d = RationalPoly::from_ints(&[-1, 1]);
        let (q, r) = p.div_rem(&d).unwrap();
        assert_eq!(q, RationalPoly::from_ints(&[0, 1, 1]));
        assert!(r.is_zero());
        assert_eq!(
            p.div_rem(&RationalPoly::default()),
            Err(Error::DivisionByZeroPolynomial)
        );
    }

    #[test]
    fn division_remainder_degree_drops() {
        let p = RationalPoly::from_ints(&[5, 0, 3, 2]);
        let d = RationalPoly::from_ints(&[1, 0, 2]);
        let (q, r) = p.div_rem(&d).unwrap();
        assert!(r.degree() < d.degree());
        assert_eq!(&(&q * &d) + &r, p);
    }

    #[test]
    fn zero_polynomial_has_degree_minus_one() {
        assert_eq!(RationalPoly::from_ints(&[0, 0]).degree(), -1);
        assert_eq!(RationalPoly::from_ints(&[3]).degree(), 0);
    }

    #[test]
    fn square_free_decomposition_recovers_multiplicities() {
        // (x-1)^3 (x+2)^2 (x-5)
        let a = RationalPoly::from_ints(&[-1, 1]);
        let b = RationalPoly::from_ints(&[2, 1]);
        let c = RationalPoly::from_ints(&[-5, 1]);
        let p = &(&(&(&a * &a) * &a) * &(&b * &b)) * &c;
        let dec = p.square_free_decomposition();
        assert_eq!(dec.len(), 3);
        assert_eq!(dec[0], (c.clone(), 1));
        assert_eq!(dec[1], (b.clone(), 2));
        assert_eq!(dec[2], (a.clone(), 3));
        assert_eq!(p.square_free_part(), &(&a * &b) * &c);
    }

    #[test]
    fn primitive_integer_form() {
        let p = RationalPoly::new(vec![rat(1, 2), rat(-3, 4)]);
        let v = p.primitive_integer();
        assert_eq!(v, vec![BigInt::from(-2), BigInt::from(3)]);
    }

    #[test]
    fn serde_roundtrip() {
        let p = RationalPoly::new(vec![rat(1, 3), int(0), rat(-5, 2)]);
        let json = serde_json::to_string(&p).unwrap();
        assert_eq!(json, r#"["1/3","0","-5/2"]"#);
        let back: RationalPoly = serde_json::from_str(&json).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn display_is_readable() {
        let p = RationalPoly::new(vec![int(2), int(-3), int(1)]);
        assert_eq!(p.display_with("t"), "t^2 - 3*t + 2");
        assert_eq!(RationalPoly::default().to_string(), "0");
    }
}
