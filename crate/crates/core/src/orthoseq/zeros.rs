use serde::{Deserialize, Serialize};

use super::sequence::RecurrenceCoeffs;
use crate::error::Result;
use crate::exactmath::rational::{decimal_width, serde_rational, to_decimal_string, to_f64, Rational};
use crate::exactmath::{eig_tridiagonal, isolate_real_roots, Eigenvalues, RootRange, Tridiagonal};
use crate::heun::HeunParams;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsolatedZero {
    #[serde(with = "serde_rational")]
    pub lo: Rational,
    #[serde(with = "serde_rational")]
    pub hi: Rational,
    pub decimal: String,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZerosReport {
    pub n: usize,
    pub k: usize,
    pub matrix: Tridiagonal<f64>,
    pub eigenvalues: Eigenvalues,
    /// Real zeros of `P_{k+1}` by Sturm isolation.
    pub exact: Vec<IsolatedZero>,
    /// Number of nonreal zeros (counted with multiplicity) of `P_{k+1}`.
    pub exact_nonreal: usize,
    /// Largest gap between matched real eigenvalues and exact zeros;
    /// infinite when the real counts differ.
    pub max_deviation: f64,
}

impl ZerosReport {
    pub fn agrees_within(&self, tol: f64) -> bool {
        self.max_deviation <= tol && self.nonreal_consistent()
    }

    /// Both paths see the same number of nonreal zeros.
    pub fn nonreal_consistent(&self) -> bool {
        2 * self.eigenvalues.nonreal.len() == self.exact_nonreal
    }

    pub fn has_nonreal(&self) -> bool {
        self.exact_nonreal > 0
    }
}

/// Zeros of `P_{k+1}` as eigenvalues of the `(k+1) x (k+1)` matrix with
/// `alpha_j` on the diagonal, `beta_j` below and ones above, checked against
/// exact root isolation refined to `digits` decimals.
pub fn zeros_p(p: &HeunParams, n: usize, k: usize, digits: usize) -> Result<ZerosReport> {
    let rec = RecurrenceCoeffs::p(p, n);
    let matrix = rec.jacobi_matrix(k).map(to_f64);
    let eigenvalues = eig_tridiagonal(&matrix);
    let target = rec.polys(k + 1).pop().expect("non-empty");
    let width = decimal_width(digits);
    let roots = isolate_real_roots(&target, &RootRange::all())?;
    let mut exact = Vec::new();
    let mut flat = Vec::new();
    for r in roots {
        let r = r.resolve_rational().refine(&width);
        flat.extend(std::iter::repeat_n(r.to_f64(), r.multiplicity));
        exact.push(IsolatedZero {
            decimal: to_decimal_string(&r.midpoint(), digits),
            lo: r.lo,
            hi: r.hi,
            multiplicity: r.multiplicity,
        });
    }
    let exact_nonreal = k + 1 - flat.len();
    let max_deviation = if flat.len() == eigenvalues.real.len() {
        flat.iter()
            .zip(&eigenvalues.real)
            .map(|(a, b)| (a - b).abs() / b.abs().max(1.0))
            .fold(0.0, f64::max)
    } else {
        f64::INFINITY
    };
    Ok(ZerosReport {
        n,
        k,
        matrix,
        eigenvalues,
        exact,
        exact_nonreal,
        max_deviation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::rational::int;

    #[test]
    fn single_zero_at_origin() {
        let p = HeunParams::from_ints(1, 1, 1, 3, 2, 0, 0);
        let r = zeros_p(&p, 2, 0, 20).unwrap();
        assert_eq!(r.eigenvalues.real, vec![0.0]);
        assert_eq!(r.exact[0].lo, int(0));
    }

    #[test]
    fn negative_coupling_two_by_two() {
        // a31 = a32 = 0, n = 1: beta_1 = -2, matrix [[0,1],[-2,3]]
        let p = HeunParams::from_ints(0, 0, 1, 3, 2, 0, 0);
        let r = zeros_p(&p, 1, 1, 20).unwrap();
        assert_eq!(r.matrix.sub(), &[-2.0]);
        assert!(r.agrees_within(1e-12));
        assert!((r.eigenvalues.real[0] - 1.0).abs() < 1e-12);
        assert!((r.eigenvalues.real[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn complex_zeros_flagged_by_both() {
        // zeta^2 - zeta + n a20 a22 with n a20 a22 = 5 has no real zeros
        let p = HeunParams::from_ints(1, 1, 5, 1, 1, 0, 0);
        let r = zeros_p(&p, 1, 1, 20).unwrap();
        assert!(r.has_nonreal());
        assert!(r.nonreal_consistent());
        assert!(r.eigenvalues.has_nonreal());
    }
}
