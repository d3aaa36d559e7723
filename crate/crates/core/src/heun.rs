//! The generalized confluent Heun equation
//!
//! ```text
//! (a31 r^2 + a32 r) y'' + (a20 r^2 + a21 r + a22) y' - (tau10 r + tau11) y = 0
//! ```
//!
//! and its polynomial solutions.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactmath::rational::{
    decimal_width, format_rational, int, pochhammer, serde_rational, serde_rational_opt,
    serde_rational_vec, to_decimal_string, to_f64, Rational,
};
use crate::exactmath::{isolate_real_roots, RationalPoly, RealRoot, RootRange, Tridiagonal};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeunParams {
    #[serde(with = "serde_rational")]
    pub a31: Rational,
    #[serde(with = "serde_rational")]
    pub a32: Rational,
    #[serde(with = "serde_rational")]
    pub a20: Rational,
    #[serde(with = "serde_rational")]
    pub a21: Rational,
    #[serde(with = "serde_rational")]
    pub a22: Rational,
    #[serde(with = "serde_rational", default = "Rational::zero")]
    pub tau10: Rational,
    #[serde(with = "serde_rational", default = "Rational::zero")]
    pub tau11: Rational,
}

impl HeunParams {
    /// Builds and validates the side conditions `a31^2 + a32^2 != 0` and
    /// `a20^2 + tau10^2 != 0`.
    pub fn new(
        a31: Rational,
        a32: Rational,
        a20: Rational,
        a21: Rational,
        a22: Rational,
        tau10: Rational,
        tau11: Rational,
    ) -> Result<Self> {
        let p = Self::unchecked(a31, a32, a20, a21, a22, tau10, tau11);
        p.validate()?;
        Ok(p)
    }

    /// No side-condition check. The recurrence-level machinery only needs the
    /// five structural coefficients and stays meaningful without them.
    pub fn unchecked(
        a31: Rational,
        a32: Rational,
        a20: Rational,
        a21: Rational,
        a22: Rational,
        tau10: Rational,
        tau11: Rational,
    ) -> Self {
        HeunParams {
            a31,
            a32,
            a20,
            a21,
            a22,
            tau10,
            tau11,
        }
    }

    pub fn from_ints(a31: i64, a32: i64, a20: i64, a21: i64, a22: i64, tau10: i64, tau11: i64) -> Self {
        Self::unchecked(int(a31), int(a32), int(a20), int(a21), int(a22), int(tau10), int(tau11))
    }

    pub fn validate(&self) -> Result<()> {
        if self.a31.is_zero() && self.a32.is_zero() {
            return Err(Error::InvalidParams("a31 and a32 both vanish".into()));
        }
        if self.a20.is_zero() && self.tau10.is_zero() {
            return Err(Error::InvalidParams("a20 and tau10 both vanish".into()));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let p: HeunParams =
            serde_json::from_str(text).map_err(|e| Error::InvalidParams(e.to_string()))?;
        p.validate()?;
        Ok(p)
    }

    /// Same coefficients with `tau10 = n a20` and the given `tau11`.
    pub fn for_degree(&self, n: usize, tau11: Rational) -> Self {
        HeunParams {
            tau10: int(n as i64) * &self.a20,
            tau11,
            ..self.clone()
        }
    }

    /// `k(k-1) a31 + k a21`.
    pub fn alpha(&self, k: usize) -> Rational {
        let k = int(k as i64);
        &k * (&k - int(1)) * &self.a31 + &k * &self.a21
    }

    /// `k a32 + a22`.
    pub fn ladder(&self, k: usize) -> Rational {
        int(k as i64) * &self.a32 + &self.a22
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularityReport {
    /// Exponents at `r = 0`; `None` when `a32 = 0` (no regular singularity there).
    #[serde(with = "serde_rational_pair_opt")]
    pub origin_exponents: Option<[Rational; 2]>,
    #[serde(with = "serde_rational_opt")]
    pub second_point: Option<Rational>,
    #[serde(with = "serde_rational_pair_opt")]
    pub second_exponents: Option<[Rational; 2]>,
    pub irregular_at_infinity: bool,
}

mod serde_rational_pair_opt {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(
        v: &Option<[Rational; 2]>,
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        let strings = v.as_ref().map(|[a, b]| [format_rational(a), format_rational(b)]);
        strings.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Option<[Rational; 2]>, D::Error> {
        let strings = Option::<[String; 2]>::deserialize(d)?;
        strings
            .map(|[a, b]| {
                let a = crate::exactmath::parse_rational(&a).map_err(serde::de::Error::custom)?;
                let b = crate::exactmath::parse_rational(&b).map_err(serde::de::Error::custom)?;
                Ok([a, b])
            })
            .transpose()
    }
}

pub fn singularity_report(p: &HeunParams) -> SingularityReport {
    let one = int(1);
    let origin_exponents = (!p.a32.is_zero()).then(|| [int(0), &one - &p.a22 / &p.a32]);
    let (second_point, second_exponents) = if p.a31.is_zero() || p.a32.is_zero() {
        (None, None)
    } else {
        let e = &one - &p.a21 / &p.a31 + &p.a22 / &p.a32 + &p.a20 * &p.a32 / (&p.a31 * &p.a31);
        (Some(-&p.a32 / &p.a31), Some([int(0), e]))
    };
    SingularityReport {
        origin_exponents,
        second_point,
        second_exponents,
        irregular_at_infinity: !(p.a22.is_zero() && p.tau11.is_zero()),
    }
}

pub fn necessary_condition(p: &HeunParams, n: usize) -> bool {
    p.tau10 == int(n as i64) * &p.a20
}

fn require_necessary(p: &HeunParams, n: usize) -> Result<()> {
    if necessary_condition(p, n) {
        Ok(())
    } else {
        Err(Error::NecessaryConditionViolated {
            tau10: format_rational(&p.tau10),
            expected: format_rational(&(int(n as i64) * &p.a20)),
        })
    }
}

/// The `(n+1) x (n+1)` tridiagonal matrix whose determinant, as a polynomial
/// in `tau11`, is the sufficient condition. `p.tau11` is ignored.
pub fn sufficient_matrix(p: &HeunParams, n: usize) -> Result<Tridiagonal<RationalPoly>> {
    require_necessary(p, n)?;
    let tau = RationalPoly::x();
    let c = |q: Rational| RationalPoly::constant(q);
    let diag = (0..=n).map(|k| &c(p.alpha(k)) - &tau).collect();
    let sup = (0..n)
        .map(|k| c(int(k as i64 + 1) * p.ladder(k)))
        .collect();
    let sub = (1..=n)
        .map(|k| c(int(k as i64 - 1) * &p.a20 - &p.tau10))
        .collect();
    Tridiagonal::new(diag, sub, sup)
}

pub fn sufficient_determinant(p: &HeunParams, n: usize) -> Result<RationalPoly> {
    Ok(sufficient_matrix(p, n)?.determinant())
}

/// Real roots of the sufficient determinant, rational ones resolved exactly.
pub fn admissible_tau11(p: &HeunParams, n: usize) -> Result<Vec<RealRoot>> {
    let det = sufficient_determinant(p, n)?;
    Ok(isolate_real_roots(&det, &RootRange::all())?
        .iter()
        .map(RealRoot::resolve_rational)
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolySolution {
    pub n: usize,
    #[serde(with = "serde_rational")]
    pub tau11: Rational,
    #[serde(with = "serde_rational_vec")]
    pub coeffs: Vec<Rational>,
}

impl PolySolution {
    pub fn poly(&self) -> RationalPoly {
        RationalPoly::new(self.coeffs.clone())
    }
}

fn check_ladder(p: &HeunParams, n: usize) -> Result<()> {
    match (0..n).find(|&k| p.ladder(k).is_zero()) {
        Some(k) => Err(Error::DegenerateLadder { k }),
        None => Ok(()),
    }
}

/// Coefficients `C_0..C_n` from the three-term recurrence, no root check.
pub fn recurrence_coefficients(p: &HeunParams, n: usize, tau11: &Rational) -> Result<Vec<Rational>> {
    check_ladder(p, n)?;
    let tau10 = int(n as i64) * &p.a20;
    let mut c = vec![int(1)];
    let mut prev = Rational::zero();
    for k in 0..n {
        let kk = int(k as i64);
        let mid = (p.alpha(k) - tau11) * &c[k];
        let low = ((&kk - int(1)) * &p.a20 - &tau10) * &prev;
        let next = -(mid + low) / ((&kk + int(1)) * p.ladder(k));
        prev = c[k].clone();
        c.push(next);
    }
    Ok(c)
}

pub fn build_solution(p: &HeunParams, n: usize, tau11: &Rational) -> Result<PolySolution> {
    require_necessary(p, n)?;
    check_ladder(p, n)?;
    let value = sufficient_determinant(p, n)?.eval(tau11);
    if !value.is_zero() {
        return Err(Error::SufficientConditionViolated {
            tau11: format_rational(tau11),
            value: format_rational(&value),
        });
    }
    Ok(PolySolution {
        n,
        tau11: tau11.clone(),
        coeffs: recurrence_coefficients(p, n, tau11)?,
    })
}

/// A polynomial solution at an irrational `tau11`, known to an interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproxSolution {
    pub n: usize,
    #[serde(with = "serde_rational_vec")]
    pub tau11_interval: Vec<Rational>,
    pub tau11_decimal: String,
    pub coeffs: Vec<f64>,
    /// Largest coefficient of the operator residual at the interval midpoint.
    pub residual_bound: f64,
}

pub fn build_solution_approx(
    p: &HeunParams,
    n: usize,
    root: &RealRoot,
    digits: usize,
) -> Result<ApproxSolution> {
    require_necessary(p, n)?;
    let det = sufficient_determinant(p, n)?;
    let r = root.refine(&decimal_width(digits));
    if !r.factor.rem(&det)?.is_zero() && !det.rem(&r.factor)?.is_zero() {
        return Err(Error::Consistency(
            "isolating interval does not belong to the sufficient determinant".into(),
        ));
    }
    let mid = r.midpoint();
    let coeffs = recurrence_coefficients(p, n, &mid)?;
    let y = RationalPoly::new(coeffs.clone());
    let residual = ode_residual(&p.for_degree(n, mid.clone()), &y);
    let residual_bound = residual
        .coeffs()
        .iter()
        .map(|c| to_f64(c).abs())
        .fold(0.0, f64::max);
    Ok(ApproxSolution {
        n,
        tau11_interval: vec![r.lo.clone(), r.hi.clone()],
        tau11_decimal: to_decimal_string(&mid, digits),
        coeffs: coeffs.iter().map(to_f64).collect(),
        residual_bound,
    })
}

/// `(a31 r^2 + a32 r) y'' + (a20 r^2 + a21 r + a22) y' - (tau10 r + tau11) y`.
pub fn ode_residual(p: &HeunParams, y: &RationalPoly) -> RationalPoly {
    let q = |c: [&Rational; 3]| RationalPoly::new(c.iter().map(|&x| x.clone()).collect());
    let zero = Rational::zero();
    let lead = q([&zero, &p.a32, &p.a31]);
    let mid = q([&p.a22, &p.a21, &p.a20]);
    let low = q([&p.tau11, &p.tau10, &zero]);
    let d1 = y.derivative();
    let d2 = d1.derivative();
    &(&(&lead * &d2) + &(&mid * &d1)) - &(&low * y)
}

/// The operator obtained by differentiating the equation `m` times, applied
/// to `y`. Equals the `m`-th derivative of [`ode_residual`].
pub fn derivative_identity(p: &HeunParams, m: usize, y: &RationalPoly) -> RationalPoly {
    let mm = int(m as i64);
    let zero = Rational::zero();
    let q = |c: Vec<Rational>| RationalPoly::new(c);
    let c2 = q(vec![zero.clone(), p.a32.clone(), p.a31.clone()]);
    let c1 = q(vec![
        &mm * &p.a32 + &p.a22,
        &p.a21 + int(2) * &mm * &p.a31,
        p.a20.clone(),
    ]);
    let c0 = q(vec![
        &mm * (&mm - int(1)) * &p.a31 + &mm * &p.a21 - &p.tau11,
        int(2) * &mm * &p.a20 - &p.tau10,
    ]);
    let cm1 = RationalPoly::constant(&mm * (&mm - int(1)) * &p.a20 - &mm * &p.tau10);
    let mut out = &(&c2 * &y.nth_derivative(m + 2)) + &(&c1 * &y.nth_derivative(m + 1));
    out = &out + &(&c0 * &y.nth_derivative(m));
    if m > 0 {
        out = &out + &(&cm1 * &y.nth_derivative(m - 1));
    }
    out
}

/// Parameters of the degenerate case `a32 = a22 = 0` with
/// `tau10 = n a20` and `tau11 = k(k-1) a31 + k a21`.
pub fn degenerate_params(a31: Rational, a20: Rational, a21: Rational, n: usize, k: usize) -> HeunParams {
    let mut p = HeunParams::unchecked(
        a31,
        Rational::zero(),
        a20,
        a21,
        Rational::zero(),
        Rational::zero(),
        Rational::zero(),
    );
    p.tau10 = int(n as i64) * &p.a20;
    p.tau11 = p.alpha(k);
    p
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegenerateSolution {
    pub n: usize,
    pub k: usize,
    /// Lower parameter `2k + a21/a31` of the hypergeometric factor.
    #[serde(with = "serde_rational")]
    pub b: Rational,
    /// `r^k 1F1(k-n; b; -(a20/a31) r)` expanded.
    pub poly: RationalPoly,
}

/// Terminating `1F1(-m; b; c r)` as a polynomial in `r`.
pub fn hyp1f1_terminating(m: usize, b: &Rational, c: &Rational) -> Result<RationalPoly> {
    let a = -int(m as i64);
    let mut coeffs = Vec::with_capacity(m + 1);
    let mut c_pow = int(1);
    let mut fact = int(1);
    for j in 0..=m {
        let den = pochhammer(b, j);
        if den.is_zero() {
            return Err(Error::UndefinedHypergeometric {
                b: format_rational(b),
            });
        }
        coeffs.push(pochhammer(&a, j) / (den * &fact) * &c_pow);
        c_pow *= c;
        fact *= int(j as i64 + 1);
    }
    Ok(RationalPoly::new(coeffs))
}

pub fn degenerate_solution(p: &HeunParams, n: usize, k: usize) -> Result<DegenerateSolution> {
    if !p.a32.is_zero() || !p.a22.is_zero() {
        return Err(Error::InvalidParams("degenerate case needs a32 = a22 = 0".into()));
    }
    if p.a31.is_zero() {
        return Err(Error::InvalidParams("degenerate case needs a31 != 0".into()));
    }
    if k > n {
        return Err(Error::InvalidParams(format!("k = {k} exceeds n = {n}")));
    }
    require_necessary(p, n)?;
    if p.tau11 != p.alpha(k) {
        return Err(Error::SufficientConditionViolated {
            tau11: format_rational(&p.tau11),
            value: format!("expected tau11 = {}", format_rational(&p.alpha(k))),
        });
    }
    let b = int(2 * k as i64) + &p.a21 / &p.a31;
    let f = hyp1f1_terminating(n - k, &b, &(-&p.a20 / &p.a31))?;
    Ok(DegenerateSolution {
        n,
        k,
        b,
        poly: f.shift(k),
    })
}

impl DegenerateSolution {
    pub fn leading_power_is_k(&self) -> bool {
        self.poly.coeffs().iter().take(self.k).all(Zero::is_zero)
            && self.poly.coeff(self.k).is_one()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::rational::rat;

    fn params_n1() -> HeunParams {
        // a21 = 3, a20 = 1, a22 = 2, tau10 = a20
        HeunParams::from_ints(1, 1, 1, 3, 2, 1, 0)
    }

    #[test]
    fn side_conditions() {
        assert!(HeunParams::from_ints(0, 0, 1, 0, 0, 0, 0).validate().is_err());
        assert!(HeunParams::from_ints(1, 0, 0, 0, 0, 0, 0).validate().is_err());
        assert!(params_n1().validate().is_ok());
    }

    #[test]
    fn json_roundtrip() {
        let p = HeunParams::unchecked(rat(1, 3), int(1), int(-2), rat(5, 7), int(2), int(-2), int(0));
        let text = serde_json::to_string(&p).unwrap();
        assert!(text.contains("\"a31\":\"1/3\""));
        assert_eq!(HeunParams::from_json(&text).unwrap(), p);
    }

    #[test]
    fn singularity_exponents() {
        let p = HeunParams::from_ints(0, 1, 1, 0, 1, 0, 0);
        let r = singularity_report(&p);
        assert_eq!(r.origin_exponents, Some([int(0), int(0)]));
        assert!(r.second_point.is_none());
        let q = HeunParams::from_ints(1, 1, 0, 1, 1, 1, 0);
        assert_eq!(singularity_report(&q).second_exponents, Some([int(0), int(1)]));
        let flat = HeunParams::from_ints(1, 1, 1, 0, 0, 0, 0);
        assert!(!singularity_report(&flat).irregular_at_infinity);
    }

    #[test]
    fn necessary() {
        assert!(necessary_condition(&HeunParams::from_ints(1, 1, 5, 0, 1, 0, 0), 0));
        assert!(necessary_condition(&HeunParams::from_ints(1, 1, 4, 0, 1, 4, 0), 1));
        assert!(!necessary_condition(&HeunParams::from_ints(1, 1, 1, 0, 1, 3, 0), 2));
    }

    #[test]
    fn low_order_determinants() {
        let p = HeunParams::from_ints(2, 3, 5, 7, 11, 0, 0);
        assert_eq!(sufficient_determinant(&p, 0).unwrap(), RationalPoly::from_ints(&[0, -1]));
        let p1 = p.for_degree(1, int(0));
        // tau^2 - a21 tau + a20 a22
        assert_eq!(
            sufficient_determinant(&p1, 1).unwrap(),
            RationalPoly::from_ints(&[55, -7, 1])
        );
        assert!(sufficient_determinant(&p, 1).is_err());
    }

    #[test]
    fn admissible_roots() {
        let roots = admissible_tau11(&params_n1(), 1).unwrap();
        let vals: Vec<_> = roots.iter().map(|r| r.exact_value().cloned().unwrap()).collect();
        assert_eq!(vals, vec![int(1), int(2)]);
        let none = HeunParams::from_ints(1, 1, 1, 0, 1, 1, 0);
        assert!(admissible_tau11(&none, 1).unwrap().is_empty());
        assert_eq!(
            admissible_tau11(&HeunParams::from_ints(1, 1, 1, 0, 1, 0, 0), 0).unwrap()[0].exact_value(),
            Some(&int(0))
        );
    }

    #[test]
    fn first_degree_solution() {
        let p = params_n1();
        for t in [1, 2] {
            let s = build_solution(&p, 1, &int(t)).unwrap();
            assert_eq!(s.coeffs, vec![int(1), rat(t, 2)]);
            assert!(ode_residual(&p.for_degree(1, int(t)), &s.poly()).is_zero());
        }
        assert!(matches!(
            build_solution(&p, 1, &int(3)),
            Err(Error::SufficientConditionViolated { .. })
        ));
        let y0 = build_solution(&HeunParams::from_ints(1, 1, 1, 0, 1, 0, 0), 0, &int(0)).unwrap();
        assert_eq!(y0.coeffs, vec![int(1)]);
    }

    #[test]
    fn residual_of_constant() {
        let p = HeunParams::from_ints(1, 1, 1, 0, 1, 0, 5);
        assert_eq!(ode_residual(&p, &RationalPoly::from_ints(&[1])), RationalPoly::from_ints(&[-5]));
    }

    #[test]
    fn ladder_rejection() {
        // a22 = 0 breaks the k = 0 rung
        let p = HeunParams::from_ints(1, 1, 1, 3, 0, 1, 0);
        assert_eq!(build_solution(&p, 1, &int(0)), Err(Error::DegenerateLadder { k: 0 }));
    }

    #[test]
    fn irrational_root_gives_small_residual() {
        // tau^2 - 3 tau + 1: roots (3 ± sqrt 5)/2
        let p = HeunParams::from_ints(1, 1, 1, 3, 1, 1, 0);
        let roots = admissible_tau11(&p, 1).unwrap();
        assert_eq!(roots.len(), 2);
        let a = build_solution_approx(&p, 1, &roots[1], 30).unwrap();
        assert!(a.residual_bound < 1e-29);
        assert!(a.tau11_decimal.starts_with("2.618033988749894848204586834365"));
    }

    #[test]
    fn derivative_identity_matches_differentiated_residual() {
        let p = HeunParams::unchecked(rat(2, 3), int(-1), rat(5, 2), int(4), rat(-7, 3), int(3), rat(1, 9));
        let y = RationalPoly::from_ints(&[3, -1, 4, 1, -5, 9]);
        for m in 0..6 {
            assert_eq!(derivative_identity(&p, m, &y), ode_residual(&p, &y).nth_derivative(m));
        }
    }

    #[test]
    fn degenerate_examples() {
        let p = degenerate_params(int(1), int(1), int(2), 1, 0);
        let s = degenerate_solution(&p, 1, 0).unwrap();
        assert_eq!(s.poly, RationalPoly::new(vec![int(1), rat(1, 2)]));
        let q = degenerate_params(int(1), int(1), int(2), 3, 3);
        assert_eq!(degenerate_solution(&q, 3, 3).unwrap().poly, RationalPoly::x().shift(2));
        // b = 0 + (-1) with n - k = 2 terms: (b)_2 = 0
        let bad = degenerate_params(int(1), int(1), int(-1), 2, 0);
        assert!(matches!(
            degenerate_solution(&bad, 2, 0),
            Err(Error::UndefinedHypergeometric { .. })
        ));
    }
}
