use std::ops::{Add, Mul};

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::reduction::{determinant_in_alpha, energy_from_alpha, reduce_to_heun, threshold, QesProblem};
use crate::error::{Error, Result};
use crate::exactmath::rational::{
    decimal_width, factorial, int, pochhammer, serde_rational, serde_rational_vec, to_decimal_string, to_f64,
    Rational,
};
use crate::exactmath::{isolate_real_roots, RealRoot, RootRange};
use crate::heun::recurrence_coefficients;
use crate::orthoseq::p_polys;

/// Value with first and second derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub v: f64,
    pub d1: f64,
    pub d2: f64,
}

impl Jet {
    pub fn var(x: f64) -> Self {
        Jet { v: x, d1: 1.0, d2: 0.0 }
    }

    pub fn constant(c: f64) -> Self {
        Jet { v: c, d1: 0.0, d2: 0.0 }
    }

    pub fn scale(self, c: f64) -> Jet {
        Jet {
            v: c * self.v,
            d1: c * self.d1,
            d2: c * self.d2,
        }
    }

    pub fn exp(self) -> Jet {
        let e = self.v.exp();
        Jet {
            v: e,
            d1: e * self.d1,
            d2: e * (self.d2 + self.d1 * self.d1),
        }
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        Jet {
            v: self.v + o.v,
            d1: self.d1 + o.d1,
            d2: self.d2 + o.d2,
        }
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        Jet {
            v: self.v * o.v,
            d1: self.d1 * o.v + self.v * o.d1,
            d2: self.d2 * o.v + 2.0 * self.d1 * o.d1 + self.v * o.d2,
        }
    }
}

/// `ln cosh z` without overflow.
fn ln_cosh(z: f64) -> f64 {
    let a = z.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

/// `psi_n` of the (4,6) problem at a (refined) admissible coupling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Wavefunction {
    pub problem: QesProblem,
    /// Coefficients of `f(eta)`, lowest first, exact at the refined alpha.
    #[serde(with = "serde_rational_vec")]
    pub f_coeffs: Vec<Rational>,
    #[serde(with = "serde_rational")]
    pub tau11: Rational,
}

impl Wavefunction {
    pub fn new(problem: QesProblem) -> Result<Self> {
        let params = reduce_to_heun(&problem);
        let coeffs = recurrence_coefficients(&params, problem.n, &params.tau11)?;
        Ok(Wavefunction {
            tau11: params.tau11,
            f_coeffs: coeffs,
            problem,
        })
    }

    /// The same coefficients from `P_k(zeta) / (k! (1+beta)_k) (-1/4)^k`.
    pub fn f_coeffs_from_sequence(&self) -> Vec<Rational> {
        let params = reduce_to_heun(&self.problem);
        let n = self.problem.n;
        let one_b = int(1) + &self.problem.beta;
        p_polys(&params, n, n)
            .iter()
            .enumerate()
            .map(|(k, pk)| {
                pk.eval(&self.tau11) / (factorial(k) * pochhammer(&one_b, k))
                    * num_traits::pow(-Rational::new(1.into(), 4.into()), k)
            })
            .collect()
    }

    fn floats(&self) -> (f64, f64, bool, Vec<f64>) {
        (
            to_f64(&self.problem.alpha),
            to_f64(&self.problem.beta),
            !self.problem.s.is_zero(),
            self.f_coeffs.iter().map(to_f64).collect(),
        )
    }

    /// `psi` and its first two derivatives in `z = x/d`.
    pub fn jet(&self, z: f64) -> Jet {
        let (a, b, odd, f) = self.floats();
        let t = z.tanh();
        let sech2 = 1.0 - t * t;
        let tj = Jet {
            v: t,
            d1: sech2,
            d2: -2.0 * t * sech2,
        };
        let eta = Jet::constant(1.0) + (tj * tj).scale(-1.0);
        let ln_eta = Jet {
            v: -2.0 * ln_cosh(z),
            d1: -2.0 * t,
            d2: -2.0 * sech2,
        };
        let pre = (ln_eta.scale(0.5 * b) + eta.scale(-0.5 * a)).exp();
        let fj = f
            .iter()
            .rev()
            .fold(Jet::constant(0.0), |acc, &c| acc * eta + Jet::constant(c));
        let psi = pre * fj;
        if odd {
            psi * tj
        } else {
            psi
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.jet(x / to_f64(&self.problem.d)).v
    }

    /// `psi'' + (alpha^2 tanh^4 sech^2 - beta^2) psi` in `z`, the
    /// Schrödinger equation after `d^2 U0 = alpha^2`, `eps d^2 = -beta^2`.
    pub fn residual(&self, z: f64) -> f64 {
        let (a, b, _, _) = self.floats();
        let j = self.jet(z);
        let t = z.tanh();
        let v = t.powi(4) * (1.0 - t * t);
        j.d2 + (a * a * v - b * b) * j.v
    }

    /// `d ln|psi| / dz`, evaluated in log form so deep tails do not underflow.
    pub fn log_slope(&self, z: f64) -> f64 {
        let (a, b, odd, f) = self.floats();
        let t = z.tanh();
        let sech2 = 1.0 - t * t;
        let eta = sech2;
        let eta_d = -2.0 * t * sech2;
        let fv = f.iter().rev().fold(0.0, |acc, &c| acc * eta + c);
        let fd = f
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(0.0, |acc, (k, &c)| acc * eta + k as f64 * c);
        let mut slope = -b * t - 0.5 * a * eta_d + fd * eta_d / fv;
        if odd {
            slope += sech2 / t;
        }
        slope
    }

    /// Residual on `points` equally spaced `z` in `[-z_max, z_max]`,
    /// relative to the largest `|psi|` on the grid.
    pub fn residual_report(&self, points: usize, z_max: f64) -> ResidualReport {
        let grid: Vec<f64> = (0..points)
            .map(|i| -z_max + 2.0 * z_max * i as f64 / (points - 1) as f64)
            .collect();
        let psi_max = grid.iter().map(|&z| self.jet(z).v.abs()).fold(0.0, f64::max);
        let raw = grid.iter().map(|&z| self.residual(z).abs()).fold(0.0, f64::max);
        ResidualReport {
            points,
            z_max,
            psi_max,
            residual_max: raw / psi_max,
        }
    }

    pub fn tail_check(&self, z: f64) -> TailReport {
        let slope = self.log_slope(z);
        let expected = -to_f64(&self.problem.beta);
        TailReport {
            z,
            log_slope: slope,
            expected,
            deviation: (slope - expected).abs(),
        }
    }

    /// Parity defect `max |psi(z) -/+ psi(-z)|` over the grid.
    pub fn parity_defect(&self, points: usize, z_max: f64) -> f64 {
        let sign = if self.problem.s.is_zero() { 1.0 } else { -1.0 };
        (0..points)
            .map(|i| z_max * i as f64 / (points - 1) as f64)
            .map(|z| (self.jet(z).v - sign * self.jet(-z).v).abs())
            .fold(0.0, f64::max)
    }

    /// `(x, psi(x))` pairs on an even grid in `x`.
    pub fn samples(&self, points: usize, x_max: f64) -> Vec<(f64, f64)> {
        (0..points)
            .map(|i| {
                let x = -x_max + 2.0 * x_max * i as f64 / (points.max(2) - 1) as f64;
                (x, self.eval(x))
            })
            .collect()
    }

    /// Fails with the measured residual when it exceeds `tol`.
    pub fn checked(self, tol: f64) -> Result<Self> {
        let r = self.residual_report(200, 8.0).residual_max;
        if r > tol || !r.is_finite() {
            return Err(Error::InconsistentCoupling {
                residual: r,
                tolerance: tol,
            });
        }
        Ok(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub points: usize,
    pub z_max: f64,
    pub psi_max: f64,
    pub residual_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailReport {
    pub z: f64,
    pub log_slope: f64,
    pub expected: f64,
    pub deviation: f64,
}

/// An admissible coupling: a root of the sufficient determinant above the
/// threshold `4n + 4s + 3`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coupling {
    pub n: usize,
    #[serde(with = "serde_rational")]
    pub s: Rational,
    #[serde(with = "serde_rational")]
    pub d: Rational,
    pub alpha: RealRoot,
    pub alpha_decimal: String,
    pub u0: f64,
    /// `eps_0 .. eps_n` at this coupling.
    pub energies: Vec<f64>,
}

impl Coupling {
    /// The problem at the interval midpoint.
    pub fn problem(&self) -> Result<QesProblem> {
        QesProblem::new(self.n, self.s.clone(), self.d.clone(), self.alpha.midpoint())
    }

    pub fn wavefunction(&self) -> Result<Wavefunction> {
        Wavefunction::new(self.problem()?)
    }
}

/// Admissible couplings for degree `n` and parity `s`, each alpha refined to
/// width `10^-digits`.
pub fn solve_coupling(n: usize, s: &Rational, d: &Rational, digits: usize) -> Result<Vec<Coupling>> {
    super::reduction::check_parity(s)?;
    if *d <= Rational::zero() {
        return Err(Error::InvalidParams("width d must be positive".into()));
    }
    let det = determinant_in_alpha(n, s);
    let width = decimal_width(digits);
    let roots = isolate_real_roots(&det, &RootRange::above(threshold(n, s)))?;
    Ok(roots
        .into_iter()
        .map(|r| {
            let r = r.resolve_rational().refine(&width);
            let mid = r.midpoint();
            let df = to_f64(d);
            Coupling {
                n,
                s: s.clone(),
                d: d.clone(),
                alpha_decimal: to_decimal_string(&mid, digits),
                u0: to_f64(&(&mid * &mid)) / (df * df),
                energies: (0..=n).map(|m| to_f64(&energy_from_alpha(m, s, d, &mid))).collect(),
                alpha: r,
            }
        })
        .collect())
}
