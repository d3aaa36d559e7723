//! Christoffel–Darboux sums and kernels for the P- and Q-sequences.

use super::moments::{norms_p_closed, norms_q_closed};
use super::sequence::{nonzero, Kind, RecurrenceCoeffs};
use crate::error::{Error, Result};
use crate::exactmath::rational::Rational;
use crate::exactmath::RationalPoly;
use crate::heun::HeunParams;

/// The weights `G_0..G_kmax` in the closed form (running product of
/// the couplings when `a32 = 0`).
pub fn cd_weights(rec: &RecurrenceCoeffs, p: &HeunParams, kmax: usize) -> Vec<Rational> {
    let closed = match rec.kind {
        Kind::P => norms_p_closed(p, rec.n, kmax),
        Kind::Q => norms_q_closed(p, rec.n, kmax),
    };
    closed.unwrap_or_else(|| rec.norms_by_recursion(kmax))
}

fn weights_nonzero(weights: &[Rational], k: usize) -> Result<()> {
    for (j, w) in weights.iter().enumerate().take(k + 1) {
        nonzero(w, &format!("weight G_{j}"))?;
    }
    Ok(())
}

/// `sum_{j<=k} p_j(z) p_j(w) / G_j`.
pub fn cd_sum_from(polys: &[RationalPoly], weights: &[Rational], k: usize, z: &Rational, w: &Rational) -> Result<Rational> {
    weights_nonzero(weights, k)?;
    Ok((0..=k)
        .map(|j| polys[j].eval(z) * polys[j].eval(w) / &weights[j])
        .sum())
}

/// `(p_{k+1}(z) p_k(w) - p_k(z) p_{k+1}(w)) / (G_k (z - w))`.
pub fn cd_kernel_from(polys: &[RationalPoly], weights: &[Rational], k: usize, z: &Rational, w: &Rational) -> Result<Rational> {
    weights_nonzero(weights, k)?;
    if z == w {
        return Err(Error::InvalidParams("kernel form needs distinct arguments".into()));
    }
    let num = polys[k + 1].eval(z) * polys[k].eval(w) - polys[k].eval(z) * polys[k + 1].eval(w);
    Ok(num / (&weights[k] * (z - w)))
}

/// `sum_{j<=k} p_j(z)^2 / G_j`.
pub fn cd_confluent_sum_from(polys: &[RationalPoly], weights: &[Rational], k: usize, z: &Rational) -> Result<Rational> {
    cd_sum_from(polys, weights, k, z, z)
}

/// `(p_{k+1}'(z) p_k(z) - p_k'(z) p_{k+1}(z)) / G_k`.
pub fn cd_confluent_kernel_from(polys: &[RationalPoly], weights: &[Rational], k: usize, z: &Rational) -> Result<Rational> {
    weights_nonzero(weights, k)?;
    let num = polys[k + 1].derivative().eval(z) * polys[k].eval(z)
        - polys[k].derivative().eval(z) * polys[k + 1].eval(z);
    Ok(num / &weights[k])
}

struct Setup {
    polys: Vec<RationalPoly>,
    weights: Vec<Rational>,
}

fn setup(kind: Kind, p: &HeunParams, n: usize, k: usize) -> Setup {
    let rec = match kind {
        Kind::P => RecurrenceCoeffs::p(p, n),
        Kind::Q => RecurrenceCoeffs::q(p, n),
    };
    Setup {
        polys: rec.polys(k + 1),
        weights: cd_weights(&rec, p, k),
    }
}

pub fn cd_sum(p: &HeunParams, n: usize, k: usize, z: &Rational, w: &Rational) -> Result<Rational> {
    let s = setup(Kind::P, p, n, k);
    cd_sum_from(&s.polys, &s.weights, k, z, w)
}

pub fn cd_kernel(p: &HeunParams, n: usize, k: usize, z: &Rational, w: &Rational) -> Result<Rational> {
    let s = setup(Kind::P, p, n, k);
    cd_kernel_from(&s.polys, &s.weights, k, z, w)
}

pub fn cd_confluent_sum(p: &HeunParams, n: usize, k: usize, z: &Rational) -> Result<Rational> {
    let s = setup(Kind::P, p, n, k);
    cd_confluent_sum_from(&s.polys, &s.weights, k, z)
}

pub fn cd_confluent_kernel(p: &HeunParams, n: usize, k: usize, z: &Rational) -> Result<Rational> {
    let s = setup(Kind::P, p, n, k);
    cd_confluent_kernel_from(&s.polys, &s.weights, k, z)
}

pub fn cd_sum_q(p: &HeunParams, n: usize, k: usize, z: &Rational, w: &Rational) -> Result<Rational> {
    let s = setup(Kind::Q, p, n, k);
    cd_sum_from(&s.polys, &s.weights, k, z, w)
}

pub fn cd_kernel_q(p: &HeunParams, n: usize, k: usize, z: &Rational, w: &Rational) -> Result<Rational> {
    let s = setup(Kind::Q, p, n, k);
    cd_kernel_from(&s.polys, &s.weights, k, z, w)
}

pub fn cd_confluent_sum_q(p: &HeunParams, n: usize, k: usize, z: &Rational) -> Result<Rational> {
    let s = setup(Kind::Q, p, n, k);
    cd_confluent_sum_from(&s.polys, &s.weights, k, z)
}

pub fn cd_confluent_kernel_q(p: &HeunParams, n: usize, k: usize, z: &Rational) -> Result<Rational> {
    let s = setup(Kind::Q, p, n, k);
    cd_confluent_kernel_from(&s.polys, &s.weights, k, z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::rational::{int, rat};

    fn sample() -> HeunParams {
        HeunParams::unchecked(rat(3, 2), rat(-2, 3), int(5), rat(7, 4), int(-3), int(0), int(0))
    }

    #[test]
    fn p_identity_n4_k3() {
        let p = sample();
        let (z, w) = (rat(2, 7), rat(-5, 3));
        assert_eq!(cd_sum(&p, 4, 3, &z, &w).unwrap(), cd_kernel(&p, 4, 3, &z, &w).unwrap());
        assert_eq!(cd_confluent_sum(&p, 4, 3, &z).unwrap(), cd_confluent_kernel(&p, 4, 3, &z).unwrap());
    }

    #[test]
    fn k_zero_sum_is_one() {
        let p = sample();
        assert_eq!(cd_sum(&p, 3, 0, &rat(1, 2), &int(9)).unwrap(), int(1));
        assert_eq!(cd_sum_q(&p, 3, 0, &rat(1, 2), &int(9)).unwrap(), int(1));
    }

    #[test]
    fn q_identity() {
        let p = sample();
        let (z, w) = (rat(11, 5), rat(1, 8));
        assert_eq!(cd_sum_q(&p, 2, 2, &z, &w).unwrap(), cd_kernel_q(&p, 2, 2, &z, &w).unwrap());
        assert_eq!(cd_confluent_sum_q(&p, 1, 1, &z).unwrap(), cd_confluent_kernel_q(&p, 1, 1, &z).unwrap());
    }

    #[test]
    fn vanishing_weight_is_reported() {
        let p = sample();
        assert!(matches!(
            cd_sum(&p, 2, 3, &int(1), &int(2)),
            Err(Error::DegenerateParameters(_))
        ));
        assert!(cd_kernel(&p, 2, 1, &int(1), &int(1)).is_err());
    }
}
