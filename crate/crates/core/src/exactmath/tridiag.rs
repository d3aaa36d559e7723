use serde::{Deserialize, Serialize};

use super::poly::RationalPoly;
use super::rational::{Rational, Ring};
use crate::error::{Error, Result};

/// A square tridiagonal matrix. `sub[i]` sits at row `i+1`, column `i`;
/// `sup[i]` at row `i`, column `i+1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tridiagonal<T> {
    diag: Vec<T>,
    sub: Vec<T>,
    sup: Vec<T>,
}

impl<T> Tridiagonal<T> {
    pub fn new(diag: Vec<T>, sub: Vec<T>, sup: Vec<T>) -> Result<Self> {
        if diag.is_empty() || sub.len() + 1 != diag.len() || sup.len() + 1 != diag.len() {
            return Err(Error::MalformedTridiagonal {
                diag: diag.len(),
                sub: sub.len(),
                sup: sup.len(),
            });
        }
        Ok(Tridiagonal { diag, sub, sup })
    }

    pub fn size(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[T] {
        &self.diag
    }

    pub fn sub(&self) -> &[T] {
        &self.sub
    }

    pub fn sup(&self) -> &[T] {
        &self.sup
    }

    pub fn map<U>(&self, f: impl Fn(&T) -> U) -> Tridiagonal<U> {
        Tridiagonal {
            diag: self.diag.iter().map(&f).collect(),
            sub: self.sub.iter().map(&f).collect(),
            sup: self.sup.iter().map(&f).collect(),
        }
    }
}

impl<T: Ring> Tridiagonal<T> {
    /// Continuant recursion `D_k = d_k D_{k-1} - sub_{k-1} sup_{k-1} D_{k-2}`.
    pub fn determinant(&self) -> T {
        let mut prev = T::ring_one();
        let mut cur = self.diag[0].clone();
        for k in 1..self.size() {
            let next = self.diag[k].clone() * cur.clone()
                - self.sub[k - 1].clone() * self.sup[k - 1].clone() * prev;
            prev = cur;
            cur = next;
        }
        cur
    }

    /// Entry `(i, j)` of the dense matrix.
    pub fn entry(&self, i: usize, j: usize) -> T {
        if i == j {
            self.diag[i].clone()
        } else if i == j + 1 {
            self.sub[j].clone()
        } else if j == i + 1 {
            self.sup[i].clone()
        } else {
            T::ring_zero()
        }
    }
}

impl Tridiagonal<Rational> {
    /// `det(x I - M)` as a polynomial in `x`.
    pub fn characteristic_polynomial(&self) -> RationalPoly {
        let x = RationalPoly::x();
        let shifted = Tridiagonal {
            diag: self
                .diag
                .iter()
                .map(|d| &x - &RationalPoly::constant(d.clone()))
                .collect(),
            sub: self
                .sub
                .iter()
                .map(|s| -RationalPoly::constant(s.clone()))
                .collect(),
            sup: self
                .sup
                .iter()
                .map(|s| -RationalPoly::constant(s.clone()))
                .collect(),
        };
        shifted.determinant()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::rational::int;

    #[test]
    fn rejects_mismatched_lengths() {
        let r = Tridiagonal::new(vec![int(1), int(2)], vec![], vec![int(0)]);
        assert!(matches!(r, Err(Error::MalformedTridiagonal { .. })));
        assert!(Tridiagonal::<Rational>::new(vec![], vec![], vec![]).is_err());
    }

    #[test]
    fn identity_determinant() {
        let m = Tridiagonal::new(vec![int(1); 3], vec![int(0); 2], vec![int(0); 2]).unwrap();
        assert_eq!(m.determinant(), int(1));
    }

    #[test]
    fn one_by_one_is_its_entry() {
        let tau = RationalPoly::x();
        let m = Tridiagonal::new(vec![-tau.clone()], vec![], vec![]).unwrap();
        assert_eq!(m.determinant(), -tau);
    }

    #[test]
    fn characteristic_polynomial_of_two_by_two() {
        // [[0,1],[2,3]] -> x^2 - 3x - 2
        let m = Tridiagonal::new(vec![int(0), int(3)], vec![int(2)], vec![int(1)]).unwrap();
        assert_eq!(
            m.characteristic_polynomial(),
            RationalPoly::from_ints(&[-2, -3, 1])
        );
    }
}
