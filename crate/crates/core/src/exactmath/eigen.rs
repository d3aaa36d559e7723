use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::rational::{from_f64, rat, Rational};
use super::roots::{isolate_real_roots, RootRange};
use super::tridiag::Tridiagonal;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EigenMethod {
    /// All `sub_j * sup_j > 0`: diagonal similarity to a symmetric matrix,
    /// then implicit QL.
    SymmetricQl,
    /// Exact characteristic polynomial and Sturm isolation.
    ExactCharacteristic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Eigenvalues {
    /// Real eigenvalues ascending, repeated by multiplicity.
    pub real: Vec<f64>,
    /// One `(re, im)` with `im > 0` per conjugate pair.
    pub nonreal: Vec<(f64, f64)>,
    pub method: EigenMethod,
}

impl Eigenvalues {
    pub fn has_nonreal(&self) -> bool {
        !self.nonreal.is_empty()
    }
}

/// Eigenvalues of a real symmetric tridiagonal matrix by implicit QL with
/// Wilkinson-type shifts. `off[i]` couples rows `i` and `i+1`.
pub fn symmetric_tridiagonal_eigenvalues(diag: &[f64], off: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut d = diag.to_vec();
    let mut e = vec![0.0; n];
    e[..off.len()].copy_from_slice(off);
    for l in 0..n {
        let mut iterations = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iterations += 1;
            if iterations > 200 {
                break;
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    d.sort_by(|a, b| a.total_cmp(b));
    d
}

/// Eigenvalues of a general real tridiagonal matrix.
///
/// When every `sub_j * sup_j` is positive the matrix is similar to a
/// symmetric one with off-diagonal `sqrt(sub_j * sup_j)`. Otherwise the
/// characteristic polynomial is formed exactly from the (exactly
/// representable) float entries and its real roots are isolated; the
/// remaining eigenvalues are reported as nonreal pairs, approximated by a
/// dense Schur decomposition.
pub fn eig_tridiagonal(m: &Tridiagonal<f64>) -> Eigenvalues {
    let products: Vec<f64> = m
        .sub()
        .iter()
        .zip(m.sup())
        .map(|(a, b)| a * b)
        .collect();
    if products.iter().all(|&p| p > 0.0) {
        let off: Vec<f64> = products.iter().map(|p| p.sqrt()).collect();
        return Eigenvalues {
            real: symmetric_tridiagonal_eigenvalues(m.diag(), &off),
            nonreal: Vec::new(),
            method: EigenMethod::SymmetricQl,
        };
    }

    let exact: Tridiagonal<Rational> = m.map(|&x| from_f64(x).expect("finite matrix entry"));
    let charpoly = exact.characteristic_polynomial();
    let width = rat(1, 1_000_000_000_000_000);
    let mut real = Vec::new();
    for root in isolate_real_roots(&charpoly, &RootRange::all()).expect("monic charpoly") {
        let x = root.refine(&width).to_f64();
        real.extend(std::iter::repeat_n(x, root.multiplicity));
    }
    let missing_pairs = (m.size() - real.len()) / 2;
    let mut nonreal = Vec::new();
    if missing_pairs > 0 {
        let n = m.size();
        let dense = DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                m.diag()[i]
            } else if i == j + 1 {
                m.sub()[j]
            } else if j == i + 1 {
                m.sup()[i]
            } else {
                0.0
            }
        });
        let mut candidates: Vec<(f64, f64)> = dense
            .complex_eigenvalues()
            .iter()
            .filter(|z| z.im > 0.0)
            .map(|z| (z.re, z.im))
            .collect();
        candidates.sort_by(|a, b| b.1.total_cmp(&a.1));
        candidates.truncate(missing_pairs);
        candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        nonreal = candidates;
    }
    Eigenvalues {
        real,
        nonreal,
        method: EigenMethod::ExactCharacteristic,
    }
}
