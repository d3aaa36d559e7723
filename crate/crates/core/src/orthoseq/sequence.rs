use std::fmt::Write as _;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactmath::rational::{format_rational, int, serde_rational_vec, Rational, Ring};
use crate::exactmath::{RationalPoly, Tridiagonal};
use crate::heun::HeunParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Kind {
    P,
    Q,
}

/// The five structural coefficients over any ring, so the same recurrence
/// can run on numbers, polynomials in zeta, or symbolic parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct HeunCoeffs<T> {
    pub a31: T,
    pub a32: T,
    pub a20: T,
    pub a21: T,
    pub a22: T,
}

impl From<&HeunParams> for HeunCoeffs<Rational> {
    fn from(p: &HeunParams) -> Self {
        HeunCoeffs {
            a31: p.a31.clone(),
            a32: p.a32.clone(),
            a20: p.a20.clone(),
            a21: p.a21.clone(),
            a22: p.a22.clone(),
        }
    }
}

fn n_of<T: Ring>(k: i64) -> T {
    T::from_int(k)
}

impl<T: Ring> HeunCoeffs<T> {
    /// `k(k-1) a31 + k a21`.
    pub fn alpha(&self, k: usize) -> T {
        let k = k as i64;
        n_of::<T>(k * (k - 1)) * self.a31.clone() + n_of::<T>(k) * self.a21.clone()
    }

    /// `k(k-n-1) a20 ((k-1) a32 + a22)`.
    pub fn beta(&self, n: usize, k: usize) -> T {
        let (k, n) = (k as i64, n as i64);
        n_of::<T>(k * (k - n - 1))
            * self.a20.clone()
            * (n_of::<T>(k - 1) * self.a32.clone() + self.a22.clone())
    }
}

/// Monic three-term recurrence `x p_j = p_{j+1} + a_j p_j + b_j p_{j-1}` of a
/// P- or Q-sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct RecurrenceCoeffs<T = Rational> {
    pub kind: Kind,
    pub n: usize,
    pub coeffs: HeunCoeffs<T>,
    /// Multiplies every `b_j`. One in normal use; the verification suite sets
    /// it to minus one to check that the identities notice.
    pub beta_scale: T,
}

impl<T: Ring> RecurrenceCoeffs<T> {
    pub fn new(kind: Kind, n: usize, coeffs: HeunCoeffs<T>) -> Self {
        RecurrenceCoeffs {
            kind,
            n,
            coeffs,
            beta_scale: T::ring_one(),
        }
    }

    pub fn with_flipped_beta(mut self) -> Self {
        self.beta_scale = -self.beta_scale;
        self
    }

    /// Diagonal term `a_j`.
    pub fn alpha(&self, j: usize) -> T {
        match self.kind {
            Kind::P => self.coeffs.alpha(j),
            Kind::Q => self.coeffs.alpha(j + self.n + 1),
        }
    }

    /// Coupling `b_j`, `j >= 1`; zero for `j = 0`.
    pub fn beta(&self, j: usize) -> T {
        if j == 0 {
            return T::ring_zero();
        }
        let raw = match self.kind {
            Kind::P => self.coeffs.beta(self.n, j),
            Kind::Q => {
                let (jj, n) = (j as i64, self.n as i64);
                n_of::<T>(jj * (jj + n + 1))
                    * self.coeffs.a20.clone()
                    * (n_of::<T>(jj + n) * self.coeffs.a32.clone() + self.coeffs.a22.clone())
            }
        };
        raw * self.beta_scale.clone()
    }

    /// `p_0(x), ..., p_kmax(x)` for an `x` in the same ring.
    pub fn evaluate(&self, x: &T, kmax: usize) -> Vec<T> {
        let mut out = vec![T::ring_one()];
        let mut prev = T::ring_zero();
        for j in 0..kmax {
            let next = (x.clone() - self.alpha(j)) * out[j].clone() - self.beta(j) * prev;
            prev = out[j].clone();
            out.push(next);
        }
        out
    }

    /// The Jacobi-type matrix with `a_0..a_k` on the diagonal, `b_1..b_k`
    /// below it and ones above.
    pub fn jacobi_matrix(&self, k: usize) -> Tridiagonal<T> {
        Tridiagonal::new(
            (0..=k).map(|j| self.alpha(j)).collect(),
            (1..=k).map(|j| self.beta(j)).collect(),
            vec![T::ring_one(); k],
        )
        .expect("consistent lengths")
    }
}

impl RecurrenceCoeffs<Rational> {
    pub fn p(params: &HeunParams, n: usize) -> Self {
        Self::new(Kind::P, n, params.into())
    }

    pub fn q(params: &HeunParams, n: usize) -> Self {
        Self::new(Kind::Q, n, params.into())
    }

    /// The sequence as polynomials in zeta.
    pub fn polys(&self, kmax: usize) -> Vec<RationalPoly> {
        let lifted = RecurrenceCoeffs {
            kind: self.kind,
            n: self.n,
            coeffs: HeunCoeffs {
                a31: RationalPoly::constant(self.coeffs.a31.clone()),
                a32: RationalPoly::constant(self.coeffs.a32.clone()),
                a20: RationalPoly::constant(self.coeffs.a20.clone()),
                a21: RationalPoly::constant(self.coeffs.a21.clone()),
                a22: RationalPoly::constant(self.coeffs.a22.clone()),
            },
            beta_scale: RationalPoly::constant(self.beta_scale.clone()),
        };
        lifted.evaluate(&RationalPoly::x(), kmax)
    }

    /// Squared norms as running products of the `b_j`.
    pub fn norms_by_recursion(&self, kmax: usize) -> Vec<Rational> {
        let mut out = vec![int(1)];
        for k in 1..=kmax {
            let next = &out[k - 1] * self.beta(k);
            out.push(next);
        }
        out
    }
}

/// A finite stretch of a P- or Q-sequence with its norms and moments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrthoSequence {
    pub kind: Kind,
    pub n: usize,
    pub polys: Vec<RationalPoly>,
    #[serde(with = "serde_rational_vec")]
    pub norms: Vec<Rational>,
    #[serde(with = "serde_rational_vec")]
    pub moments: Vec<Rational>,
}

impl OrthoSequence {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    /// One row per member: `k,c_0,c_1,...` (coefficients lowest first).
    pub fn to_csv(&self) -> String {
        let width = self.polys.len();
        let mut out = String::from("k");
        for j in 0..width {
            write!(out, ",c{j}").unwrap();
        }
        out.push('\n');
        for (k, p) in self.polys.iter().enumerate() {
            write!(out, "{k}").unwrap();
            for j in 0..width {
                write!(out, ",{}", format_rational(&p.coeff(j))).unwrap();
            }
            out.push('\n');
        }
        out
    }
}

pub fn p_polys(p: &HeunParams, n: usize, kmax: usize) -> Vec<RationalPoly> {
    RecurrenceCoeffs::p(p, n).polys(kmax)
}

pub fn q_polys(p: &HeunParams, n: usize, kmax: usize) -> Vec<RationalPoly> {
    RecurrenceCoeffs::q(p, n).polys(kmax)
}

pub fn generate_p(p: &HeunParams, n: usize, kmax: usize) -> OrthoSequence {
    let rec = RecurrenceCoeffs::p(p, n);
    OrthoSequence {
        kind: Kind::P,
        n,
        polys: rec.polys(kmax),
        norms: rec.norms_by_recursion(kmax),
        moments: super::moments::moments_of(&rec, kmax),
    }
}

pub fn generate_q(p: &HeunParams, n: usize, kmax: usize) -> OrthoSequence {
    let rec = RecurrenceCoeffs::q(p, n);
    OrthoSequence {
        kind: Kind::Q,
        n,
        polys: rec.polys(kmax),
        norms: rec.norms_by_recursion(kmax),
        moments: super::moments::moments_of(&rec, kmax),
    }
}

/// `P_{n+1}`, the member that divides every later one.
pub fn critical_polynomial(p: &HeunParams, n: usize) -> RationalPoly {
    p_polys(p, n, n + 1).pop().expect("non-empty")
}

/// Divides `P_{k+n+1}` by `P_{n+1}`; the remainder is always zero.
pub fn factorize(p: &HeunParams, n: usize, k: usize) -> Result<(RationalPoly, RationalPoly)> {
    let polys = p_polys(p, n, k + n + 1);
    let (q, r) = polys[k + n + 1].div_rem(&polys[n + 1])?;
    if !r.is_zero() {
        return Err(Error::Consistency(format!(
            "P_{} is not divisible by the critical polynomial P_{}",
            k + n + 1,
            n + 1
        )));
    }
    Ok((q, r))
}

/// Whether `b_j != 0` for `1 <= j <= k`.
pub fn quasi_definite_up_to<T: Ring>(rec: &RecurrenceCoeffs<T>, k: usize) -> bool {
    (1..=k).all(|j| !rec.beta(j).is_ring_zero())
}

pub(crate) fn nonzero(q: &Rational, what: &str) -> Result<()> {
    if q.is_zero() {
        Err(Error::DegenerateParameters(format!("{what} vanishes")))
    } else {
        Ok(())
    }
}
