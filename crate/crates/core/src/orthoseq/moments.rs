//! Norms, moments and the moment functional of a sequence.
//!
//! The functional `L` is fixed by `L(1) = 1` and `L(p_j) = 0` for `j >= 1`;
//! integrals against the (never constructed) weight are evaluated through it.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::sequence::{Kind, RecurrenceCoeffs};
use crate::error::{Error, Result};
use crate::exactmath::rational::{factorial, int, pochhammer, serde_rational, Rational};
use crate::exactmath::RationalPoly;
use crate::heun::HeunParams;

/// Moments `mu_0..mu_kmax` from the triangular system `L(p_j) = delta_{j0}`.
pub fn moments_of(rec: &RecurrenceCoeffs, kmax: usize) -> Vec<Rational> {
    let polys = rec.polys(kmax);
    let mut mu = vec![int(1)];
    for (j, pj) in polys.iter().enumerate().skip(1) {
        let s: Rational = (0..j).map(|i| pj.coeff(i) * &mu[i]).sum();
        mu.push(-s);
    }
    mu
}

pub fn moments(p: &HeunParams, n: usize, kmax: usize) -> Vec<Rational> {
    moments_of(&RecurrenceCoeffs::p(p, n), kmax)
}

#[derive(Debug, Clone)]
pub struct MomentFunctional {
    moments: Vec<Rational>,
}

impl MomentFunctional {
    pub fn new(rec: &RecurrenceCoeffs, max_degree: usize) -> Self {
        MomentFunctional {
            moments: moments_of(rec, max_degree),
        }
    }

    pub fn moments(&self) -> &[Rational] {
        &self.moments
    }

    pub fn apply(&self, f: &RationalPoly) -> Result<Rational> {
        if f.degree() >= self.moments.len() as isize {
            return Err(Error::InvalidParams(format!(
                "degree {} exceeds the {} available moments",
                f.degree(),
                self.moments.len()
            )));
        }
        Ok(f.coeffs().iter().zip(&self.moments).map(|(c, m)| c * m).sum())
    }
}

/// `k! (a20 a32)^k (-n)_k (a22/a32)_k`; `None` when `a32 = 0`.
pub fn norms_p_closed(p: &HeunParams, n: usize, kmax: usize) -> Option<Vec<Rational>> {
    if p.a32.is_zero() {
        return None;
    }
    let ratio = &p.a22 / &p.a32;
    let base = &p.a20 * &p.a32;
    let minus_n = -int(n as i64);
    Some(
        (0..=kmax)
            .map(|k| {
                factorial(k)
                    * num_traits::pow(base.clone(), k)
                    * pochhammer(&minus_n, k)
                    * pochhammer(&ratio, k)
            })
            .collect(),
    )
}

/// `k! (n+2)_k (a20 a32)^k (n+1+a22/a32)_k`; `None` when `a32 = 0`.
pub fn norms_q_closed(p: &HeunParams, n: usize, kmax: usize) -> Option<Vec<Rational>> {
    if p.a32.is_zero() {
        return None;
    }
    let shift = int(n as i64 + 1) + &p.a22 / &p.a32;
    let base = &p.a20 * &p.a32;
    let n2 = int(n as i64 + 2);
    Some(
        (0..=kmax)
            .map(|k| {
                factorial(k)
                    * pochhammer(&n2, k)
                    * num_traits::pow(base.clone(), k)
                    * pochhammer(&shift, k)
            })
            .collect(),
    )
}

fn checked_norms(rec: &RecurrenceCoeffs, closed: Option<Vec<Rational>>, kmax: usize) -> Result<Vec<Rational>> {
    let rec_norms = rec.norms_by_recursion(kmax);
    if let Some(c) = closed {
        if let Some(k) = (0..=kmax).find(|&k| c[k] != rec_norms[k]) {
            return Err(Error::Consistency(format!(
                "closed-form norm {k} disagrees with the recursion"
            )));
        }
    }
    Ok(rec_norms)
}

/// Squared norms of the P-sequence; the closed form is cross-checked against
/// the two-term recursion whenever `a32 != 0`.
pub fn norms_p(p: &HeunParams, n: usize, kmax: usize) -> Result<Vec<Rational>> {
    checked_norms(&RecurrenceCoeffs::p(p, n), norms_p_closed(p, n, kmax), kmax)
}

pub fn norms_q(p: &HeunParams, n: usize, kmax: usize) -> Result<Vec<Rational>> {
    checked_norms(&RecurrenceCoeffs::q(p, n), norms_q_closed(p, n, kmax), kmax)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub name: String,
    #[serde(with = "serde_rational")]
    pub lhs: Rational,
    #[serde(with = "serde_rational")]
    pub rhs: Rational,
    pub holds: bool,
}

impl IdentityCheck {
    pub fn new(name: impl Into<String>, lhs: Rational, rhs: Rational) -> Self {
        let holds = lhs == rhs;
        IdentityCheck {
            name: name.into(),
            lhs,
            rhs,
            holds,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub kind: Kind,
    pub n: usize,
    pub k: usize,
    pub checks: Vec<IdentityCheck>,
}

impl IdentityReport {
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }
}

/// Integrals against the weight, expressed through the moments:
/// `L(P_k^2) = G_k`, `L(z P_k P_{k-1}) = G_k`, `L(z P_k^2) = alpha_k G_k`,
/// `L(z P_k) = 0` for `k >= 2` and `L(P_j P_k) = 0` for `j < k`.
pub fn inner_product_identities(p: &HeunParams, n: usize, k: usize) -> IdentityReport {
    let rec = RecurrenceCoeffs::p(p, n);
    let polys = rec.polys(k);
    let functional = MomentFunctional::new(&rec, 2 * k + 1);
    let l = |f: &RationalPoly| functional.apply(f).expect("moments cover degree 2k+1");
    let g = norms_p_closed(p, n, k)
        .unwrap_or_else(|| rec.norms_by_recursion(k))
        .pop()
        .expect("non-empty");
    let z = RationalPoly::x();
    let pk = &polys[k];
    let mut checks = vec![IdentityCheck::new("L(P_k^2) = G_k", l(&(pk * pk)), g.clone())];
    if k >= 1 {
        let v = l(&(&(&z * pk) * &polys[k - 1]));
        checks.push(IdentityCheck::new("L(z P_k P_{k-1}) = G_k", v, g.clone()));
    }
    checks.push(IdentityCheck::new(
        "L(z P_k^2) = k((k-1)a31 + a21) G_k",
        l(&(&(&z * pk) * pk)),
        p.alpha(k) * &g,
    ));
    if k >= 2 {
        checks.push(IdentityCheck::new("L(z P_k) = 0", l(&(&z * pk)), Rational::zero()));
    }
    for (j, pj) in polys.iter().enumerate().take(k) {
        checks.push(IdentityCheck::new(
            format!("L(P_{j} P_k) = 0"),
            l(&(pj * pk)),
            Rational::zero(),
        ));
    }
    IdentityReport {
        kind: Kind::P,
        n,
        k,
        checks,
    }
}

/// The low moments against their closed forms: `mu_1 = 0`,
/// `mu_2 = -n a20 a22`, `mu_3 = a21 mu_2`, and `mu_4` both as
/// `G_2 + (a21 - n a20 a22) G_1` (printed form) and with `a21^2`.
pub fn low_moment_checks(p: &HeunParams, n: usize) -> Vec<IdentityCheck> {
    let mu = moments(p, n, 4);
    let g = RecurrenceCoeffs::p(p, n).norms_by_recursion(2);
    let nn = int(n as i64);
    let mu2 = -&nn * &p.a20 * &p.a22;
    vec![
        IdentityCheck::new("mu_1 = 0", mu[1].clone(), Rational::zero()),
        IdentityCheck::new("mu_2 = -n a20 a22", mu[2].clone(), mu2.clone()),
        IdentityCheck::new("mu_3 = a21 mu_2", mu[3].clone(), &p.a21 * &mu2),
        IdentityCheck::new(
            "mu_4 = G_2 + (a21 - n a20 a22) G_1 (as printed)",
            mu[4].clone(),
            &g[2] + (&p.a21 - &nn * &p.a20 * &p.a22) * &g[1],
        ),
        IdentityCheck::new(
            "mu_4 = G_2 + (a21^2 - n a20 a22) G_1",
            mu[4].clone(),
            &g[2] + (&p.a21 * &p.a21 - &nn * &p.a20 * &p.a22) * &g[1],
        ),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::rational::rat;

    fn sample() -> HeunParams {
        HeunParams::unchecked(rat(3, 2), rat(-2, 3), int(5), rat(7, 4), int(-3), int(0), int(0))
    }

    #[test]
    fn norms_vanish_past_n() {
        let n = 3;
        let g = norms_p(&sample(), n, n + 4).unwrap();
        assert_eq!(g[0], int(1));
        assert_eq!(g[1], -int(n as i64) * int(5) * int(-3));
        assert!(g[n + 1..].iter().all(Zero::is_zero));
        assert!(g[..=n].iter().all(|x| !x.is_zero()));
    }

    #[test]
    fn q_norms_first_step() {
        let p = sample();
        let n = 2;
        let g = norms_q(&p, n, 5).unwrap();
        assert_eq!(g[1], int(n as i64 + 2) * &p.a20 * (int(n as i64 + 1) * &p.a32 + &p.a22));
    }

    #[test]
    fn recursion_used_when_a32_vanishes() {
        let p = HeunParams::from_ints(1, 0, 2, 3, 5, 0, 0);
        assert!(norms_p_closed(&p, 2, 3).is_none());
        assert_eq!(norms_p(&p, 2, 3).unwrap()[1], int(-20));
    }

    #[test]
    fn low_moments() {
        let checks = low_moment_checks(&sample(), 3);
        assert!(checks[0].holds && checks[1].holds && checks[2].holds);
        assert!(checks[4].holds);
        assert!(!checks[3].holds);
    }

    #[test]
    fn identities_hold() {
        for k in 0..=4 {
            let r = inner_product_identities(&sample(), 4, k);
            assert!(r.all_hold(), "{r:?}");
        }
    }

    #[test]
    fn functional_rejects_high_degree() {
        let f = MomentFunctional::new(&RecurrenceCoeffs::p(&sample(), 2), 2);
        assert!(f.apply(&RationalPoly::from_ints(&[0, 0, 0, 1])).is_err());
    }
}
