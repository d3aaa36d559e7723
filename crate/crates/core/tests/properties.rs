use confluent_heun::exactmath::rational::{
    decimal_width, factorial, format_rational, int, parse_rational, pochhammer, rat, to_f64, Rational,
};
use confluent_heun::exactmath::{isolate_real_roots, RationalPoly, RootRange, Tridiagonal};
use confluent_heun::heun::{
    build_solution, build_solution_approx, recurrence_coefficients, sufficient_determinant, HeunParams,
};
use confluent_heun::orthoseq::{
    cd_kernel, cd_sum, critical_polynomial, factorize, norms_p, p_polys, q_polys, RecurrenceCoeffs,
};
use confluent_heun::qes::{solve_coupling, threshold};
use nalgebra::DMatrix;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

fn small() -> impl Strategy<Value = Rational> {
    (-9i64..=9, 1i64..=6).prop_map(|(n, d)| rat(n, d))
}

fn nonzero() -> impl Strategy<Value = Rational> {
    small().prop_filter("nonzero", |q| !q.is_zero())
}

/// Structural coefficients with every coupling of the P-sequence nonzero
/// up to the critical index.
fn params(n: usize) -> impl Strategy<Value = HeunParams> {
    (nonzero(), nonzero(), nonzero(), small(), nonzero())
        .prop_map(move |(a31, a32, a20, a21, a22)| {
            HeunParams::unchecked(a31, a32, a20, a21, a22, Rational::zero(), Rational::zero())
                .for_degree(n, Rational::zero())
        })
        .prop_filter("quasi-definite", move |p| (0..=n + 3).all(|k| !p.ladder(k).is_zero()))
}

fn cofactor_det(m: &[Vec<Rational>]) -> Rational {
    if m.len() == 1 {
        return m[0][0].clone();
    }
    (0..m.len())
        .map(|j| {
            let minor: Vec<Vec<Rational>> = m[1..]
                .iter()
                .map(|row| row.iter().enumerate().filter(|&(i, _)| i != j).map(|(_, e)| e.clone()).collect())
                .collect();
            let t = &m[0][j] * cofactor_det(&minor);
            if j % 2 == 0 { t } else { -t }
        })
        .sum()
}

/// Coefficients of the operator applied to `sum C_k r^k`, with each `C_k`
/// a polynomial in `tau11`.
fn operator_in_tau(p: &HeunParams, n: usize, cs: &[RationalPoly]) -> Vec<RationalPoly> {
    let t = RationalPoly::x();
    let k = |q: Rational| RationalPoly::constant(q);
    let get = |j: isize| {
        if j < 0 || j as usize >= cs.len() {
            RationalPoly::from_ints(&[0])
        } else {
            cs[j as usize].clone()
        }
    };
    (0..=n as isize + 1)
        .map(|j| {
            let jq = int(j as i64);
            let cj = get(j);
            let up = get(j + 1);
            let down = get(j - 1);
            let diag = k(&jq * (&jq - int(1)) * &p.a31 + &jq * &p.a21);
            let upc = k((&jq + int(1)) * (&jq * &p.a32 + &p.a22));
            let downc = k((&jq - int(1)) * &p.a20 - &p.tau10);
            &(&(&(&diag * &cj) + &(&upc * &up)) + &(&downc * &down)) - &(&t * &cj)
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn continuant_matches_cofactor_expansion(
        diag in prop::collection::vec(small(), 1..=6),
        off in prop::collection::vec((small(), small()), 5),
    ) {
        let n = diag.len();
        let sub: Vec<_> = off.iter().take(n - 1).map(|p| p.0.clone()).collect();
        let sup: Vec<_> = off.iter().take(n - 1).map(|p| p.1.clone()).collect();
        let t = Tridiagonal::new(diag, sub, sup).unwrap();
        let dense: Vec<Vec<Rational>> = (0..n).map(|i| (0..n).map(|j| t.entry(i, j)).collect()).collect();
        prop_assert_eq!(t.determinant(), cofactor_det(&dense));
    }

    #[test]
    fn sturm_isolation_finds_constructed_roots(
        roots in prop::collection::btree_set(-20i64..=20, 0..=5),
        quads in prop::collection::vec(1i64..=9, 0..=2),
        den in 1i64..=4,
    ) {
        let mut poly = RationalPoly::from_ints(&[1]);
        for r in &roots {
            poly = &poly * &RationalPoly::new(vec![-rat(*r, den), int(1)]);
        }
        for c in &quads {
            poly = &poly * &RationalPoly::from_ints(&[*c, 0, 1]);
        }
        let found = isolate_real_roots(&poly, &RootRange::all()).unwrap();
        prop_assert_eq!(found.len(), roots.len());
        for (iso, r) in found.iter().zip(&roots) {
            let exact = rat(*r, den);
            prop_assert!(iso.lo <= exact && exact <= iso.hi);
            let resolved = iso.resolve_rational();
            prop_assert_eq!(resolved.exact_value(), Some(&exact));
        }
        // real eigenvalues of the companion matrix land in the same places
        let deg = poly.degree();
        if deg >= 1 {
            let d = deg as usize;
            let lead = to_f64(&poly.leading());
            let comp = DMatrix::from_fn(d, d, |i, j| {
                if j == d - 1 {
                    -to_f64(&poly.coeff(i)) / lead
                } else if i == j + 1 {
                    1.0
                } else {
                    0.0
                }
            });
            let mut real: Vec<f64> = comp
                .complex_eigenvalues()
                .iter()
                .filter(|z| z.im.abs() < 1e-7)
                .map(|z| z.re)
                .collect();
            real.sort_by(|a, b| a.partial_cmp(b).unwrap());
            prop_assert_eq!(real.len(), roots.len());
            for (e, r) in real.iter().zip(&roots) {
                prop_assert!((e - *r as f64 / den as f64).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn refinement_keeps_the_root(m in 2i64..=60, digits in 1usize..=25) {
        // sqrt(m) for non-squares, the integer root otherwise
        let poly = RationalPoly::from_ints(&[-m, 0, 1]);
        let roots = isolate_real_roots(&poly, &RootRange::above(int(0))).unwrap();
        prop_assert_eq!(roots.len(), 1);
        let width = decimal_width(digits);
        let r = roots[0].refine(&width);
        prop_assert!(&r.hi - &r.lo <= width);
        prop_assert!(&r.lo * &r.lo <= int(m) && int(m) <= &r.hi * &r.hi);
    }

    #[test]
    fn residual_vanishes_on_every_root_of_the_determinant(n in 0usize..=6, p in params(6)) {
        // with C_k as polynomials in tau11, every operator coefficient is a
        // multiple of the sufficient determinant
        let p = p.for_degree(n, Rational::zero());
        let lifted = p_polys(&p, n, n);
        let cs: Vec<RationalPoly> = lifted
            .iter()
            .enumerate()
            .map(|(k, pk)| pk.scale(&(int(1) / (factorial(k) * num_traits::pow(p.a32.clone(), k) * pochhammer(&(&p.a22 / &p.a32), k)))))
            .collect();
        let det = sufficient_determinant(&p, n).unwrap();
        let res = operator_in_tau(&p, n, &cs);
        for (j, r) in res.iter().enumerate() {
            prop_assert!(r.rem(&det).unwrap().is_zero(), "coefficient of r^{} is not a multiple", j);
        }
        // and the top coefficient is exactly proportional, so the converse holds too
        prop_assert!(!res[n].is_zero());
    }

    #[test]
    fn residual_is_zero_at_rational_tau(n in 1usize..=3, p in params(3), tau in nonzero()) {
        // the determinant is affine in a20 at n = 1 and in a32 for n = 2, 3
        let with = |v: &Rational| {
            let mut q = p.clone();
            if n == 1 { q.a20 = v.clone() } else { q.a32 = v.clone() }
            q.for_degree(n, tau.clone())
        };
        let f = |v: &Rational| sufficient_determinant(&with(v), n).unwrap().eval(&tau);
        let (f0, f1) = (f(&int(0)), f(&int(1)));
        prop_assume!(f1 != f0);
        let q = with(&(-&f0 / (&f1 - &f0)));
        prop_assume!(!q.a20.is_zero() && q.validate().is_ok() && (0..n).all(|k| !q.ladder(k).is_zero()));
        let sol = build_solution(&q, n, &tau).unwrap();
        let y = sol.poly();
        let lead = RationalPoly::new(vec![int(0), q.a32.clone(), q.a31.clone()]);
        let mid = RationalPoly::new(vec![q.a22.clone(), q.a21.clone(), q.a20.clone()]);
        let low = RationalPoly::new(vec![q.tau11.clone(), q.tau10.clone()]);
        let res = &(&(&lead * &y.nth_derivative(2)) + &(&mid * &y.derivative())) - &(&low * &y);
        prop_assert!(res.is_zero());
    }

    #[test]
    fn determinant_bridge(n in 0usize..=5, p in params(5)) {
        let p = p.for_degree(n, Rational::zero());
        let sign = if n % 2 == 0 { -int(1) } else { int(1) };
        prop_assert_eq!(sufficient_determinant(&p, n).unwrap(), critical_polynomial(&p, n).scale(&sign));
    }

    #[test]
    fn coefficients_are_normalized_sequence_values(n in 1usize..=5, p in params(5), tau in small()) {
        let p = p.for_degree(n, tau.clone());
        let cs = recurrence_coefficients(&p, n, &tau).unwrap();
        let ps = p_polys(&p, n, n);
        for k in 0..=n {
            let norm = factorial(k) * num_traits::pow(p.a32.clone(), k) * pochhammer(&(&p.a22 / &p.a32), k);
            prop_assert_eq!(&cs[k] * &norm, ps[k].eval(&tau));
        }
    }

    #[test]
    fn quotient_is_the_q_sequence(n in 0usize..=3, k in 0usize..=3, p in params(3)) {
        let (quot, rem) = factorize(&p, n, k).unwrap();
        prop_assert!(rem.is_zero());
        prop_assert_eq!(&quot, &q_polys(&p, n, k)[k]);
    }

    #[test]
    fn christoffel_darboux(n in 1usize..=4, p in params(4), z in small(), w in small()) {
        prop_assume!(z != w);
        for k in 0..=n {
            prop_assert_eq!(cd_sum(&p, n, k, &z, &w).unwrap(), cd_kernel(&p, n, k, &z, &w).unwrap());
        }
    }

    #[test]
    fn norms_close_and_vanish(n in 0usize..=5, p in params(5)) {
        let g = norms_p(&p, n, n + 3).unwrap();
        prop_assert_eq!(&g, &RecurrenceCoeffs::p(&p, n).norms_by_recursion(n + 3));
        prop_assert!(g[..=n].iter().all(|x| !x.is_zero()));
        prop_assert!(g[n + 1..].iter().all(Zero::is_zero));
    }

    #[test]
    fn irrational_roots_give_tiny_residuals(n in 1usize..=4, p in params(4)) {
        let p = p.for_degree(n, Rational::zero());
        let det = sufficient_determinant(&p, n).unwrap();
        for root in isolate_real_roots(&det, &RootRange::all()).unwrap() {
            if root.resolve_rational().exact_value().is_none() {
                let a = build_solution_approx(&p, n, &root, 30).unwrap();
                let scale = a.coeffs.iter().fold(1.0f64, |m, c| m.max(c.abs()));
                prop_assert!(a.residual_bound <= 1e-14 * scale);
            }
        }
    }

    #[test]
    fn rationals_round_trip_through_text(q in small()) {
        prop_assert_eq!(parse_rational(&format_rational(&q)).unwrap(), q.clone());
        let json = serde_json::to_string(&p_like(&q)).unwrap();
        let back: HeunParams = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(back, p_like(&q));
    }
}

fn p_like(q: &Rational) -> HeunParams {
    HeunParams::unchecked(q.clone(), int(1), q.abs() + int(1), q.clone(), rat(1, 3), q.clone(), -q.clone())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn couplings_stay_above_threshold(n in 0usize..=3, odd in any::<bool>(), d in (1i64..=9, 1i64..=4)) {
        let s = if odd { rat(1, 2) } else { int(0) };
        let d = rat(d.0, d.1);
        let cs = solve_coupling(n, &s, &d, 20).unwrap();
        prop_assert_eq!(cs.len(), n + 1);
        for c in cs {
            prop_assert!(c.alpha.lo > threshold(n, &s));
            prop_assert!(c.alpha.to_f64() > 0.0);
        }
    }
}

#[test]
fn decimals_parse_exactly() {
    assert_eq!(parse_rational("0.25").unwrap(), rat(1, 4));
    assert_eq!(parse_rational("-1.5").unwrap(), rat(-3, 2));
    assert_eq!(parse_rational("3/-6").unwrap(), rat(-1, 2));
    assert!(parse_rational("1/0").is_err());
    assert!(parse_rational("abc").is_err());
}

#[test]
fn residual_improves_with_precision() {
    for n in 1..=2 {
        for s in [int(0), rat(1, 2)] {
            let coarse = solve_coupling(n, &s, &int(1), 3).unwrap();
            let fine = solve_coupling(n, &s, &int(1), 30).unwrap();
            for (a, b) in coarse.iter().zip(&fine) {
                let ra = a.wavefunction().unwrap().residual_report(200, 8.0).residual_max;
                let rb = b.wavefunction().unwrap().residual_report(200, 8.0).residual_max;
                assert!(rb < ra, "n={n}: {rb} !< {ra}");
                assert!(ra > 1e-6 && rb < 1e-10);
            }
        }
    }
}

#[test]
fn tails_decay_at_the_bound_state_rate() {
    for n in 0..=2 {
        for s in [int(0), rat(1, 2)] {
            for c in solve_coupling(n, &s, &rat(3, 2), 30).unwrap() {
                let w = c.wavefunction().unwrap();
                // log |psi| slope in x/d at x = 20 d is -beta
                let t = w.tail_check(20.0);
                assert!(t.deviation < 1e-6, "{t:?}");
                assert!(t.expected < 0.0);
            }
        }
    }
}
