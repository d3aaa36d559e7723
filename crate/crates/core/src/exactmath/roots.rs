//! Exact real-root isolation with Sturm sequences.
//!
//! Every sign is decided in exact rational arithmetic, so clustered or
//! multiple roots are never lost. Isolating intervals are half-open `(lo, hi]`
//! with `lo`, `hi` not roots of the square-free factor, or degenerate
//! (`lo == hi`) for roots that were hit exactly.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::poly::RationalPoly;
use super::rational::{int, serde_rational, sign, to_f64, Rational};
use crate::error::{Error, Result};

/// Bounds of a search range; roots are sought in `(lower, upper]`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RootRange {
    pub lower: Option<Rational>,
    pub upper: Option<Rational>,
}

impl RootRange {
    pub fn all() -> Self {
        Self::default()
    }

    pub fn between(lower: Rational, upper: Rational) -> Self {
        RootRange {
            lower: Some(lower),
            upper: Some(upper),
        }
    }

    pub fn above(lower: Rational) -> Self {
        RootRange {
            lower: Some(lower),
            upper: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SturmChain {
    seq: Vec<RationalPoly>,
}

impl SturmChain {
    pub fn new(p: &RationalPoly) -> Self {
        let mut seq = vec![p.clone(), p.derivative()];
        while !seq.last().is_some_and(|q| q.is_zero()) {
            let n = seq.len();
            let r = seq[n - 2].rem(&seq[n - 1]).expect("nonzero divisor");
            if r.is_zero() {
                break;
            }
            seq.push(-r);
        }
        seq.retain(|q| !q.is_zero());
        SturmChain { seq }
    }

    fn variations(signs: impl Iterator<Item = Ordering>) -> usize {
        let mut count = 0;
        let mut last = Ordering::Equal;
        for s in signs.filter(|s| *s != Ordering::Equal) {
            if last != Ordering::Equal && s != last {
                count += 1;
            }
            last = s;
        }
        count
    }

    pub fn variations_at(&self, x: &Rational) -> usize {
        Self::variations(self.seq.iter().map(|q| sign(&q.eval(x))))
    }

    pub fn variations_at_infinity(&self, positive: bool) -> usize {
        Self::variations(self.seq.iter().map(|q| {
            let s = sign(&q.leading());
            if !positive && q.degree() % 2 == 1 {
                s.reverse()
            } else {
                s
            }
        }))
    }

    /// Distinct real roots in `(lo, hi]`.
    pub fn count_between(&self, lo: &Rational, hi: &Rational) -> usize {
        self.variations_at(lo)
            .saturating_sub(self.variations_at(hi))
    }

    pub fn count_all(&self) -> usize {
        self.variations_at_infinity(false)
            .saturating_sub(self.variations_at_infinity(true))
    }
}

/// `1 + max |a_i / a_n|`: every root lies strictly inside `(-B, B)`.
pub fn cauchy_bound(p: &RationalPoly) -> Rational {
    let lead = p.leading().abs();
    let coeffs = p.coeffs();
    let m = coeffs[..coeffs.len().saturating_sub(1)]
        .iter()
        .map(|c| c.abs() / &lead)
        .fold(Rational::zero(), |a, b| if b > a { b } else { a });
    m + int(1)
}

/// An isolated real root: the interval, its multiplicity in the original
/// polynomial, and the square-free factor it is a simple root of.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealRoot {
    #[serde(with = "serde_rational")]
    pub lo: Rational,
    #[serde(with = "serde_rational")]
    pub hi: Rational,
    pub multiplicity: usize,
    pub factor: RationalPoly,
}

impl RealRoot {
    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn exact_value(&self) -> Option<&Rational> {
        self.is_exact().then_some(&self.lo)
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) / int(2)
    }

    pub fn to_f64(&self) -> f64 {
        to_f64(&self.midpoint())
    }

    /// Whether `x` lies in the closed interval.
    pub fn contains_f64(&self, x: f64) -> bool {
        to_f64(&self.lo) <= x && x <= to_f64(&self.hi)
    }

    fn bisect_once(&mut self) {
        if self.is_exact() {
            return;
        }
        let mid = self.midpoint();
        let fm = self.factor.eval(&mid);
        if fm.is_zero() {
            self.lo = mid.clone();
            self.hi = mid;
            return;
        }
        let flo = self.factor.eval(&self.lo);
        if sign(&fm) == sign(&flo) {
            self.lo = mid;
        } else {
            self.hi = mid;
        }
    }

    /// Bisects until the width is at most `width`.
    pub fn refine(&self, width: &Rational) -> RealRoot {
        let mut r = self.clone();
        while r.width() > *width {
            r.bisect_once();
        }
        r
    }

    /// Collapses the interval onto the root when the root is rational.
    ///
    /// A rational root `p/q` of a primitive integer polynomial has `q`
    /// dividing the leading coefficient `L`, so it is a multiple of `1/L`;
    /// once the interval is narrower than `1/L` at most one candidate remains.
    pub fn resolve_rational(&self) -> RealRoot {
        if self.is_exact() {
            return self.clone();
        }
        let ints = self.factor.primitive_integer();
        let lead = ints.last().cloned().unwrap_or_default().abs();
        let lead_q = Rational::from_integer(lead.clone());
        let target = Rational::new(BigInt::from(1), lead.clone()) / int(2);
        let r = self.refine(&target);
        if r.is_exact() {
            return r;
        }
        let lo_scaled = (&r.lo * &lead_q).ceil();
        let hi_scaled = (&r.hi * &lead_q).floor();
        let mut m = lo_scaled.to_integer();
        while Rational::from_integer(m.clone()) <= hi_scaled {
            let cand = Rational::new(m.clone(), lead.clone());
            if self.factor.eval(&cand).is_zero() {
                return RealRoot {
                    lo: cand.clone(),
                    hi: cand,
                    ..r
                };
            }
            m += 1;
        }
        self.clone()
    }

    fn overlaps(&self, other: &RealRoot) -> bool {
        if self.hi > other.lo && other.hi > self.lo {
            return true;
        }
        let touch = self.hi == other.lo || other.hi == self.lo;
        touch && (self.is_exact() || other.is_exact())
    }
}

fn settle(f: &RationalPoly, chain: &SturmChain, mut lo: Rational, mut hi: Rational) -> RealRoot {
    loop {
        if f.eval(&hi).is_zero() {
            return RealRoot {
                lo: hi.clone(),
                hi,
                multiplicity: 1,
                factor: f.clone(),
            };
        }
        if !f.eval(&lo).is_zero() {
            return RealRoot {
                lo,
                hi,
                multiplicity: 1,
                factor: f.clone(),
            };
        }
        let mid = (&lo + &hi) / int(2);
        if chain.count_between(&mid, &hi) == 1 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

fn isolate_factor(
    f: &RationalPoly,
    chain: &SturmChain,
    lo: Rational,
    hi: Rational,
    count: usize,
    out: &mut Vec<RealRoot>,
) {
    match count {
        0 => {}
        1 => out.push(settle(f, chain, lo, hi)),
        _ => {
            let mid = (&lo + &hi) / int(2);
            let left = chain.count_between(&lo, &mid);
            isolate_factor(f, chain, lo, mid.clone(), left, out);
            isolate_factor(f, chain, mid, hi, count - left, out);
        }
    }
}

/// Isolates every distinct real root of `p` in `(range.lower, range.upper]`.
///
/// Intervals come back sorted and pairwise disjoint; each carries the
/// multiplicity of its root in `p`.
pub fn isolate_real_roots(p: &RationalPoly, range: &RootRange) -> Result<Vec<RealRoot>> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let mut roots = Vec::new();
    for (factor, multiplicity) in p.square_free_decomposition() {
        let bound = cauchy_bound(&factor);
        let lo = range.lower.clone().unwrap_or_else(|| -bound.clone());
        let hi = range.upper.clone().unwrap_or(bound);
        if lo >= hi {
            continue;
        }
        let chain = SturmChain::new(&factor);
        let count = chain.count_between(&lo, &hi);
        let start = roots.len();
        isolate_factor(&factor, &chain, lo, hi, count, &mut roots);
        for r in &mut roots[start..] {
            r.multiplicity = multiplicity;
        }
    }
    roots.sort_by(|a, b| a.lo.cmp(&b.lo).then(a.hi.cmp(&b.hi)));
    // Roots of different square-free factors may share an interval.
    loop {
        let mut changed = false;
        for i in 0..roots.len().saturating_sub(1) {
            if roots[i].overlaps(&roots[i + 1]) {
                for j in [i, i + 1] {
                    let w = roots[j].width() / int(2);
                    roots[j] = roots[j].refine(&w);
                }
                changed = true;
            }
        }
        if !changed {
            break;
        }
        roots.sort_by(|a, b| a.lo.cmp(&b.lo).then(a.hi.cmp(&b.hi)));
    }
    Ok(roots)
}

/// Number of distinct real roots.
pub fn count_real_roots(p: &RationalPoly) -> Result<usize> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    Ok(p.square_free_decomposition()
        .iter()
        .map(|(f, _)| SturmChain::new(f).count_all())
        .sum())
}

/// All rational roots, each once, ascending.
pub fn rational_roots(p: &RationalPoly) -> Result<Vec<Rational>> {
    Ok(isolate_real_roots(p, &RootRange::all())?
        .iter()
        .map(RealRoot::resolve_rational)
        .filter_map(|r| r.exact_value().cloned())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::rational::{decimal_width, rat};

    #[test]
    fn sqrt_two_in_unit_range() {
        let p = RationalPoly::from_ints(&[-2, 0, 1]);
        let roots = isolate_real_roots(&p, &RootRange::between(int(0), int(2))).unwrap();
        assert_eq!(roots.len(), 1);
        let w = decimal_width(30);
        let r = roots[0].refine(&w);
        assert!(r.width() <= w);
        assert!(&r.lo * &r.lo < int(2) && &r.hi * &r.hi > int(2));
    }

    #[test]
    fn no_real_roots() {
        let p = RationalPoly::from_ints(&[1, 0, 1]);
        assert!(isolate_real_roots(&p, &RootRange::all()).unwrap().is_empty());
        assert_eq!(count_real_roots(&p).unwrap(), 0);
    }

    #[test]
    fn factored_quadratic_isolates_one_and_two() {
        let p = RationalPoly::from_ints(&[2, -3, 1]);
        let roots: Vec<_> = isolate_real_roots(&p, &RootRange::all())
            .unwrap()
            .iter()
            .map(RealRoot::resolve_rational)
            .collect();
        assert_eq!(roots.len(), 2);
        assert_eq!(roots[0].exact_value(), Some(&int(1)));
        assert_eq!(roots[1].exact_value(), Some(&int(2)));
    }

    #[test]
    fn zero_polynomial_is_an_error() {
        assert_eq!(
            isolate_real_roots(&RationalPoly::default(), &RootRange::all()),
            Err(Error::ZeroPolynomial)
        );
    }

    #[test]
    fn multiplicities_and_disjointness() {
        // (x - 1/3)^2 (x - 1/2) (x^2 - 2)
        let a = RationalPoly::linear_root(&rat(1, 3));
        let b = RationalPoly::linear_root(&rat(1, 2));
        let c = RationalPoly::from_ints(&[-2, 0, 1]);
        let p = &(&(&a * &a) * &b) * &c;
        let roots = isolate_real_roots(&p, &RootRange::all()).unwrap();
        assert_eq!(roots.len(), 4);
        let mults: Vec<_> = roots.iter().map(|r| r.multiplicity).collect();
        assert_eq!(mults, vec![1, 2, 1, 1]);
        for w in roots.windows(2) {
            assert!(!w[0].overlaps(&w[1]));
        }
        assert_eq!(rational_roots(&p).unwrap(), vec![rat(1, 3), rat(1, 2)]);
    }

    #[test]
    fn half_open_range_excludes_lower_endpoint() {
        // roots 3 and 5; (3, 10] keeps only 5
        let p = RationalPoly::from_ints(&[15, -8, 1]);
        let roots = isolate_real_roots(&p, &RootRange::between(int(3), int(10))).unwrap();
        assert_eq!(roots.len(), 1);
        assert_eq!(roots[0].resolve_rational().exact_value(), Some(&int(5)));
    }
}
