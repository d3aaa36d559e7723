use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::exactmath::rational::int;
use crate::exactmath::RationalPoly;

/// `V(x) = -V0 sinh^p(x/d) / cosh^q(x/d)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialSpec {
    pub p: u32,
    pub q: u32,
    pub v0: f64,
    pub d: f64,
}

impl PotentialSpec {
    pub fn new(p: u32, q: u32, v0: f64, d: f64) -> Result<Self> {
        if q <= p {
            return Err(Error::InvalidParams(format!("need q > p, got p = {p}, q = {q}")));
        }
        if !(v0 > 0.0 && d > 0.0) {
            return Err(Error::InvalidParams("V0 and d must be positive".into()));
        }
        Ok(PotentialSpec { p, q, v0, d })
    }

    pub fn value(&self, x: f64) -> f64 {
        let z = x / self.d;
        // tanh^p sech^(q-p) avoids overflow of the separate powers
        let t = z.tanh();
        let sech = 1.0 / z.cosh();
        -self.v0 * t.powi(self.p as i32) * sech.powi((self.q - self.p) as i32)
    }

    /// Non-positive everywhere; fails for odd `p`.
    pub fn is_nonpositive(&self) -> bool {
        self.p.is_multiple_of(2)
    }
}

/// `d * [-(1 + (-1)^p) V0 Gamma((1+p)/2) Gamma((q-p)/2) / (2 Gamma((1+q)/2))]`.
pub fn potential_integral(spec: &PotentialSpec) -> f64 {
    if spec.p % 2 == 1 {
        return 0.0;
    }
    let (p, q) = (spec.p as f64, spec.q as f64);
    -spec.d * spec.v0 * gamma((1.0 + p) / 2.0) * gamma((q - p) / 2.0) / gamma((1.0 + q) / 2.0)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adaptive(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    adaptive(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
        + adaptive(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

/// Adaptive Simpson quadrature on `[a, b]` to absolute tolerance `tol`.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = simpson(a, b, fa, fm, fb);
    adaptive(f, a, b, fa, fm, fb, whole, tol, 50)
}

/// Numerical `int V dx` over the line, truncated where the integrand has
/// decayed below `1e-18` relative.
pub fn potential_quadrature(spec: &PotentialSpec) -> f64 {
    let decay = (spec.q - spec.p) as f64;
    let cutoff = spec.d * (42.0 + decay * std::f64::consts::LN_2) / decay;
    let f = |x: f64| spec.value(x);
    // integrate each half separately so the odd case cancels cleanly
    let tol = 1e-14 * spec.v0 * spec.d;
    integrate(&f, 0.0, cutoff, tol) + integrate(&f, -cutoff, 0.0, tol)
}

/// Coefficients of the equation in `eta = sech^2(x/d)`:
/// `4 eta^2 (1-eta) psi'' + (4 eta - 6 eta^2) psi' + (eps d^2 + d^2 U0 w(eta)) psi = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EtaEquation {
    pub second: RationalPoly,
    pub first: RationalPoly,
    /// `w(eta) = eta^((q-p)/2) (1-eta)^(p/2)`.
    pub potential_term: RationalPoly,
    /// All three singular points regular: the potential term is at most linear.
    pub fuchsian: bool,
}

pub fn reduce_to_eta(p: u32, q: u32) -> Result<EtaEquation> {
    if q <= p || p % 2 == 1 || (q - p) % 2 == 1 {
        return Err(Error::NotReducible { p, q });
    }
    let eta = RationalPoly::x();
    let one_minus = RationalPoly::from_ints(&[1, -1]);
    let pow = |b: &RationalPoly, k: u32| (0..k).fold(RationalPoly::from_ints(&[1]), |acc, _| &acc * b);
    let potential_term = &pow(&eta, (q - p) / 2) * &pow(&one_minus, p / 2);
    let fuchsian = potential_term.degree() <= 1;
    Ok(EtaEquation {
        second: RationalPoly::new(vec![int(0), int(0), int(4), int(-4)]),
        first: RationalPoly::from_ints(&[0, 4, -6]),
        potential_term,
        fuchsian,
    })
}
