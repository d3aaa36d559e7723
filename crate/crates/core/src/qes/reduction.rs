//! The (4,6)-hyperbolic problem as a confluent Heun equation for
//! `f(eta)`, where `psi = eta^(beta/2) (1-eta)^s e^(-alpha eta/2) f(eta)`.
//!
//! Symbolic quantities are [`MultiPoly`]s in `alpha` (variable 0), `beta`
//! (variable 1) and `s` (variable 2).

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactmath::rational::{factorial, format_rational, int, pochhammer, rat, serde_rational, Rational};
use crate::exactmath::{MultiPoly, RationalPoly, Tridiagonal};
use crate::heun::HeunParams;
use crate::orthoseq::{norms_p, HeunCoeffs, Kind, RecurrenceCoeffs};

pub const VARS: [&str; 3] = ["alpha", "beta", "s"];

pub fn alpha() -> MultiPoly {
    MultiPoly::var(0)
}

pub fn beta() -> MultiPoly {
    MultiPoly::var(1)
}

pub fn s_var() -> MultiPoly {
    MultiPoly::var(2)
}

fn c(k: i64) -> MultiPoly {
    MultiPoly::int(k)
}

/// `4n + 4s + 3`.
pub fn threshold(n: usize, s: &Rational) -> Rational {
    int(4 * n as i64 + 3) + int(4) * s
}

pub fn check_parity(s: &Rational) -> Result<()> {
    if s.is_zero() || *s == rat(1, 2) {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!(
            "parity exponent must be 0 or 1/2, got {}",
            format_rational(s)
        )))
    }
}

/// Coefficients of the f-equation in confluent Heun form.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolicHeun {
    pub coeffs: HeunCoeffs<MultiPoly>,
    pub tau10: MultiPoly,
    pub tau11: MultiPoly,
}

pub fn reduce_to_heun_symbolic() -> SymbolicHeun {
    let (a, b, s) = (alpha(), beta(), s_var());
    let one_b = &c(1) + &b;
    SymbolicHeun {
        coeffs: HeunCoeffs {
            a31: c(4),
            a32: c(-4),
            a20: &c(-4) * &a,
            a21: &(&(&c(6) + &(&c(4) * &a)) + &(&c(4) * &b)) + &(&c(8) * &s),
            a22: &c(-4) * &one_b,
        },
        // -alpha (alpha - 2 beta - 4 s - 3)
        tau10: -&(&a * &(&(&(&a - &(&c(2) * &b)) - &(&c(4) * &s)) - &c(3))),
        // alpha^2 - 2 alpha (1 + beta) - (1 + beta)(beta + 4 s)
        tau11: &(&(&a * &a) - &(&c(2) * &(&a * &one_b))) - &(&one_b * &(&b + &(&c(4) * &s))),
    }
}

/// The value substituted for zeta in the displayed critical polynomials:
/// `(1+beta)(beta+4s) + 2 alpha (1+beta) - alpha^2`, which is `-tau11`.
pub fn display_zeta() -> MultiPoly {
    -&reduce_to_heun_symbolic().tau11
}

/// A (4,6) problem at a concrete coupling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QesProblem {
    pub n: usize,
    #[serde(with = "serde_rational")]
    pub s: Rational,
    #[serde(with = "serde_rational")]
    pub d: Rational,
    /// `d sqrt(U0)`.
    #[serde(with = "serde_rational")]
    pub alpha: Rational,
    /// `d sqrt(-eps)`, tied to alpha by `alpha - 2 beta = 4n + 4s + 3`.
    #[serde(with = "serde_rational")]
    pub beta: Rational,
}

impl QesProblem {
    /// Fixes `beta = (alpha - (4n+4s+3))/2`, which must be positive.
    pub fn new(n: usize, s: Rational, d: Rational, alpha: Rational) -> Result<Self> {
        check_parity(&s)?;
        if d <= Rational::zero() {
            return Err(Error::InvalidParams("width d must be positive".into()));
        }
        let c = threshold(n, &s);
        if alpha <= c {
            return Err(Error::BelowThreshold {
                alpha: format_rational(&alpha),
                threshold: format_rational(&c),
            });
        }
        let beta = (&alpha - &c) / int(2);
        Ok(QesProblem { n, s, d, alpha, beta })
    }

    pub fn energy(&self) -> Rational {
        energy_from_alpha(self.n, &self.s, &self.d, &self.alpha)
    }

    pub fn u0(&self) -> Rational {
        &self.alpha * &self.alpha / (&self.d * &self.d)
    }
}

/// Heun parameters of the f-equation at `(alpha, beta, s)`.
pub fn reduce_to_heun(problem: &QesProblem) -> HeunParams {
    let at = [problem.alpha.clone(), problem.beta.clone(), problem.s.clone()];
    let sh = reduce_to_heun_symbolic();
    HeunParams::unchecked(
        sh.coeffs.a31.eval(&at),
        sh.coeffs.a32.eval(&at),
        sh.coeffs.a20.eval(&at),
        sh.coeffs.a21.eval(&at),
        sh.coeffs.a22.eval(&at),
        sh.tau10.eval(&at),
        sh.tau11.eval(&at),
    )
}

/// `eps_n = -(4n+4s+3 - alpha)^2 / (4 d^2)`, exact in alpha.
pub fn energy_from_alpha(n: usize, s: &Rational, d: &Rational, alpha: &Rational) -> Rational {
    let gap = threshold(n, s) - alpha;
    -(&gap * &gap) / (int(4) * d * d)
}

/// The same as a polynomial in alpha.
pub fn energy_poly(n: usize, s: &Rational, d: &Rational) -> RationalPoly {
    let gap = RationalPoly::new(vec![threshold(n, s), int(-1)]);
    (&gap * &gap).scale(&(-int(1) / (int(4) * d * d)))
}

/// Bound-state energy for given `d` and `U0`; requires `d^2 U0 > (4n+4s+3)^2`.
pub fn spectrum(n: usize, s: &Rational, d: &Rational, u0: &Rational) -> Result<f64> {
    check_parity(s)?;
    let c = threshold(n, s);
    let lhs = d * d * u0;
    if lhs <= &c * &c {
        return Err(Error::BelowThreshold {
            alpha: format!("sqrt({})", format_rational(&lhs)),
            threshold: format_rational(&c),
        });
    }
    let df = crate::exactmath::rational::to_f64(d);
    let alpha = df * crate::exactmath::rational::to_f64(u0).sqrt();
    let gap = crate::exactmath::rational::to_f64(&c) - alpha;
    Ok(-(gap * gap) / (4.0 * df * df))
}

/// The displayed matrix: `mu_j` on the diagonal, `gamma_j = 4 alpha (1-j+n)`
/// at row `j` below it, `delta_j = -4 j (beta + j)` at row `j-1` above it.
pub fn sufficient_matrix_symbolic(n: usize) -> Tridiagonal<MultiPoly> {
    let (a, b, s) = (alpha(), beta(), s_var());
    let mu = |j: i64| {
        let u = &c(2 * j + 1) + &b;
        let w = &(&c(2 * j) + &b) + &(&c(4) * &s);
        &(&(-&(&a * &a)) + &(&(&c(2) * &a) * &u)) + &(&u * &w)
    };
    let gamma = |j: i64| &c(4 * (1 - j + n as i64)) * &a;
    let delta = |j: i64| &c(-4 * j) * &(&b + &c(j));
    let n = n as i64;
    Tridiagonal::new(
        (0..=n).map(mu).collect(),
        (1..=n).map(gamma).collect(),
        (1..=n).map(delta).collect(),
    )
    .expect("consistent lengths")
}

/// Substitutes `beta = (alpha - (4n+4s+3))/2` and a fixed `s`.
pub fn to_alpha_poly(m: &MultiPoly, n: usize, s: &Rational) -> RationalPoly {
    let c = threshold(n, s);
    let beta_of_alpha = RationalPoly::new(vec![-c / int(2), rat(1, 2)]);
    m.substitute(&[RationalPoly::x(), beta_of_alpha, RationalPoly::constant(s.clone())])
}

/// The sufficient matrix with every entry a polynomial in alpha.
pub fn sufficient_matrix(n: usize, s: &Rational) -> Tridiagonal<RationalPoly> {
    sufficient_matrix_symbolic(n).map(|e| to_alpha_poly(e, n, s))
}

pub fn determinant_in_alpha(n: usize, s: &Rational) -> RationalPoly {
    sufficient_matrix(n, s).determinant()
}

fn symbolic_recurrence(n: usize) -> RecurrenceCoeffs<MultiPoly> {
    RecurrenceCoeffs::new(Kind::P, n, reduce_to_heun_symbolic().coeffs)
}

/// `P_{n+1}^n` of the reduced equation evaluated at `zeta`.
pub fn critical_polynomial_qes_at(n: usize, zeta: &MultiPoly) -> MultiPoly {
    symbolic_recurrence(n).evaluate(zeta, n + 1).pop().expect("non-empty")
}

/// `P_{n+1}^n(tau11)` in `(alpha, beta, s)`: the solvability condition.
pub fn critical_polynomial_qes(n: usize) -> MultiPoly {
    critical_polynomial_qes_at(n, &reduce_to_heun_symbolic().tau11)
}

/// Diagonal term of the f-recurrence, `2k(1 + 2 alpha + 2 beta + 2k + 4s)`.
pub fn direct_alpha(k: usize) -> MultiPoly {
    let k = k as i64;
    let inner = &(&(&c(1 + 2 * k) + &(&c(2) * &alpha())) + &(&c(2) * &beta())) + &(&c(4) * &s_var());
    &c(2 * k) * &inner
}

/// Coupling of the f-recurrence, `16 k (k-n-1) alpha (beta + k)`.
pub fn direct_beta(n: usize, k: usize) -> MultiPoly {
    let (k, n) = (k as i64, n as i64);
    &(&c(16 * k * (k - n - 1)) * &alpha()) * &(&beta() + &c(k))
}

/// Whether the generic recurrence of the reduced equation has exactly the
/// coefficients [`direct_alpha`] and [`direct_beta`] for `k <= kmax`.
pub fn recurrence_consistency(n: usize, kmax: usize) -> bool {
    let rec = symbolic_recurrence(n);
    (0..=kmax).all(|k| rec.alpha(k) == direct_alpha(k))
        && (1..=kmax).all(|k| rec.beta(k) == direct_beta(n, k))
}

/// `2^(4k) k! alpha^k (-n)_k (1+beta)_k`, cross-checked against the norms of
/// the reduced equation.
pub fn qes_ortho_norms(n: usize, s: &Rational, alpha: &Rational, beta: &Rational, kmax: usize) -> Result<Vec<Rational>> {
    let minus_n = -int(n as i64);
    let one_b = int(1) + beta;
    let closed: Vec<Rational> = (0..=kmax)
        .map(|k| {
            num_traits::pow(int(16), k)
                * factorial(k)
                * num_traits::pow(alpha.clone(), k)
                * pochhammer(&minus_n, k)
                * pochhammer(&one_b, k)
        })
        .collect();
    let at = [alpha.clone(), beta.clone(), s.clone()];
    let sh = reduce_to_heun_symbolic();
    let p = HeunParams::unchecked(
        sh.coeffs.a31.eval(&at),
        sh.coeffs.a32.eval(&at),
        sh.coeffs.a20.eval(&at),
        sh.coeffs.a21.eval(&at),
        sh.coeffs.a22.eval(&at),
        sh.tau10.eval(&at),
        sh.tau11.eval(&at),
    );
    if norms_p(&p, n, kmax)? != closed {
        return Err(Error::Consistency(
            "closed-form QES norms disagree with the reduced recurrence".into(),
        ));
    }
    Ok(closed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn necessary_condition_is_the_quantization_rule() {
        let sh = reduce_to_heun_symbolic();
        for n in 0..4 {
            // tau10 - n a20 = -alpha (alpha - 2 beta - 4 s - 3 - 4 n)
            let diff = &sh.tau10 - &(&MultiPoly::int(n) * &sh.coeffs.a20);
            let rule = &(&(&(&alpha() - &(&c(2) * &beta())) - &(&c(4) * &s_var())) - &c(3)) - &c(4 * n);
            assert_eq!(diff, -&(&alpha() * &rule));
        }
    }

    #[test]
    fn zero_coupling_equation() {
        let sh = reduce_to_heun_symbolic();
        let at = [int(0), int(0), int(0)];
        assert_eq!(sh.coeffs.a20.eval(&at), int(0));
        assert_eq!(sh.coeffs.a21.eval(&at), int(6));
        assert_eq!(sh.coeffs.a22.eval(&at), int(-4));
        assert_eq!(sh.tau10.eval(&at), int(0));
        assert_eq!(sh.tau11.eval(&at), int(0));
    }

    #[test]
    fn n0_matrix_is_minus_tau11() {
        let m = sufficient_matrix_symbolic(0);
        assert_eq!(m.determinant(), -&reduce_to_heun_symbolic().tau11);
    }

    #[test]
    fn displayed_matrix_equals_heun_matrix() {
        for n in 0..5usize {
            let sh = reduce_to_heun_symbolic();
            let rec = symbolic_recurrence(n);
            let m = sufficient_matrix_symbolic(n);
            for k in 0..=n {
                assert_eq!(m.diag()[k], &rec.alpha(k) - &sh.tau11);
            }
            for k in 1..=n {
                let low = &(&MultiPoly::int(k as i64 - 1) * &sh.coeffs.a20)
                    - &(&MultiPoly::int(n as i64) * &sh.coeffs.a20);
                assert_eq!(m.sub()[k - 1], low);
                let km1 = k as i64 - 1;
                let up = &MultiPoly::int(k as i64)
                    * &(&(&MultiPoly::int(km1) * &sh.coeffs.a32) + &sh.coeffs.a22);
                assert_eq!(m.sup()[k - 1], up);
            }
        }
    }

    #[test]
    fn recurrence_matches_direct_coefficients() {
        for n in 0..5 {
            assert!(recurrence_consistency(n, n + 2));
        }
    }

    #[test]
    fn spectrum_example() {
        assert_eq!(spectrum(1, &int(0), &int(1), &int(121)).unwrap(), -4.0);
        assert!(matches!(
            spectrum(1, &int(0), &int(1), &int(49)),
            Err(Error::BelowThreshold { .. })
        ));
        assert_eq!(energy_from_alpha(1, &int(0), &int(1), &int(11)), int(-4));
    }

    #[test]
    fn ortho_norms_small() {
        let (a, b) = (rat(17, 2), rat(3, 4));
        let g = qes_ortho_norms(2, &int(0), &a, &b, 3).unwrap();
        assert_eq!(g[0], int(1));
        assert_eq!(g[1], int(-16) * int(2) * &a * (int(1) + &b));
        assert!(g[3].is_zero());
    }

    #[test]
    fn problem_rejects_threshold() {
        assert!(QesProblem::new(0, int(0), int(1), int(3)).is_err());
        let p = QesProblem::new(0, rat(1, 2), int(1), int(9)).unwrap();
        assert_eq!(p.beta, int(2));
        assert!(QesProblem::new(0, rat(1, 3), int(1), int(9)).is_err());
    }
}
