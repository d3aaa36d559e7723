//! Sparse multivariate polynomials over the rationals.
//!
//! Just enough algebra to expand and compare closed-form expressions
//! term by term. Exponent vectors are stored with trailing zeros trimmed, so
//! polynomials in different numbers of variables compare and combine freely.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use super::poly::RationalPoly;
use super::rational::{format_rational, int, Rational, Ring};

type Exponents = Vec<u32>;

#[derive(Clone, PartialEq, Eq, Default)]
pub struct MultiPoly {
    terms: BTreeMap<Exponents, Rational>,
}

fn trim(mut e: Exponents) -> Exponents {
    while e.last() == Some(&0) {
        e.pop();
    }
    e
}

impl MultiPoly {
    /// The `index`-th variable.
    pub fn var(index: usize) -> Self {
        let mut e = vec![0; index + 1];
        e[index] = 1;
        Self::monomial(e, int(1))
    }

    pub fn constant(c: Rational) -> Self {
        Self::monomial(Vec::new(), c)
    }

    pub fn int(c: i64) -> Self {
        Self::constant(int(c))
    }

    pub fn monomial(exponents: Vec<u32>, c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(trim(exponents), c);
        }
        MultiPoly { terms }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &Rational)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = MultiPoly::default();
        if c.is_zero() {
            return out;
        }
        for (e, a) in &self.terms {
            out.terms.insert(e.clone(), a * c);
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(MultiPoly::int(1), |acc, _| &acc * self)
    }

    fn add_term(&mut self, e: Exponents, c: Rational) {
        if c.is_zero() {
            return;
        }
        let e = trim(e);
        let entry = self.terms.entry(e.clone()).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&e);
        }
    }

    /// Evaluates at rational values of the variables (missing ones are zero).
    pub fn eval(&self, values: &[Rational]) -> Rational {
        self.substitute(
            &values
                .iter()
                .map(|v| RationalPoly::constant(v.clone()))
                .collect::<Vec<_>>(),
        )
        .coeff(0)
    }

    /// Replaces each variable by a univariate polynomial.
    pub fn substitute(&self, images: &[RationalPoly]) -> RationalPoly {
        let mut out = RationalPoly::default();
        for (e, c) in &self.terms {
            let mut term = RationalPoly::constant(c.clone());
            for (i, &k) in e.iter().enumerate() {
                let image = images.get(i).cloned().unwrap_or_default();
                for _ in 0..k {
                    term = &term * &image;
                }
            }
            out = &out + &term;
        }
        out
    }

    /// Replaces each variable by a multivariate polynomial.
    pub fn compose(&self, images: &[MultiPoly]) -> MultiPoly {
        let mut out = MultiPoly::default();
        for (e, c) in &self.terms {
            let mut term = MultiPoly::constant(c.clone());
            for (i, &k) in e.iter().enumerate() {
                let image = images.get(i).cloned().unwrap_or_default();
                term = &term * &image.pow(k);
            }
            out = &out + &term;
        }
        out
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn display_with(&self, vars: &[&str]) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (e, c) in self.terms.iter().rev() {
            let negative = c.is_negative();
            let mag = c.abs();
            if out.is_empty() {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            let mut factors = Vec::new();
            if !mag.is_one() || e.is_empty() {
                factors.push(format_rational(&mag));
            }
            for (i, &k) in e.iter().enumerate() {
                let name = vars.get(i).copied().unwrap_or("?");
                match k {
                    0 => {}
                    1 => factors.push(name.to_string()),
                    _ => factors.push(format!("{name}^{k}")),
                }
            }
            out.push_str(&factors.join("*"));
        }
        out
    }
}

impl Ring for MultiPoly {
    fn ring_zero() -> Self {
        MultiPoly::default()
    }
    fn ring_one() -> Self {
        MultiPoly::int(1)
    }
    fn from_rational(q: &Rational) -> Self {
        MultiPoly::constant(q.clone())
    }
    fn is_ring_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultiPoly({})", self.display_with(&["x0", "x1", "x2", "x3"]))
    }
}

impl<'a> Add<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), -c);
        }
        out
    }
}

impl<'a> Mul<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    // exponents add when monomials multiply
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = MultiPoly::default();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let n = ea.len().max(eb.len());
                let e = (0..n)
                    .map(|i| ea.get(i).unwrap_or(&0) + eb.get(i).unwrap_or(&0))
                    .collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        self.scale(&int(-1))
    }
}

macro_rules! owned_binop {
    ($tr:ident, $method:ident) => {
        impl $tr for MultiPoly {
            type Output = MultiPoly;
            fn $method(self, rhs: MultiPoly) -> MultiPoly {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $tr<&'a MultiPoly> for MultiPoly {
            type Output = MultiPoly;
            fn $method(self, rhs: &MultiPoly) -> MultiPoly {
                (&self).$method(rhs)
            }
        }
    };
}

owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);

impl Neg for MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        -&self
    }
}
