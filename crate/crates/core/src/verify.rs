//! Randomized self-checks behind `heun verify`.
//!
//! Every suite draws small rational parameters from a seeded ChaCha stream,
//! so a given seed always yields the same cases and the same report.

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::exactmath::rational::{format_rational, int, rat, Rational};
use crate::heun::{sufficient_determinant, HeunParams};
use crate::orthoseq::christoffel::{cd_confluent_kernel_from, cd_confluent_sum_from, cd_kernel_from, cd_sum_from, cd_weights};
use crate::orthoseq::{
    critical_polynomial, factorize, inner_product_identities, low_moment_checks, norms_p, norms_q,
    RecurrenceCoeffs,
};
use crate::qes::{
    critical_polynomial_qes, determinant_in_alpha, qes_ortho_norms, recurrence_consistency, to_alpha_poly,
};

pub const DEFAULT_SEED: u64 = 20240611;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Random parameter sets per suite.
    pub cases: usize,
    /// Flip the sign of the recurrence couplings used to build the sequences.
    pub mutate: bool,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            seed: DEFAULT_SEED,
            cases: 20,
            mutate: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub identity: String,
    pub witness: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub name: String,
    pub checks: usize,
    pub failures: Vec<Failure>,
}

impl SuiteResult {
    fn new(name: &str) -> Self {
        SuiteResult {
            name: name.into(),
            checks: 0,
            failures: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, identity: impl Into<String>, witness: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(Failure {
                identity: identity.into(),
                witness: witness(),
            });
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub config: VerifyConfig,
    pub suites: Vec<SuiteResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(SuiteResult::passed)
    }
}

/// Source of small nonzero rationals and parameter sets.
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn rational(&mut self) -> Rational {
        let num: i64 = self.rng.random_range(-12..=12);
        let den: i64 = self.rng.random_range(1..=7);
        rat(num, den)
    }

    pub fn nonzero(&mut self) -> Rational {
        loop {
            let q = self.rational();
            if !q.is_zero() {
                return q;
            }
        }
    }

    /// Parameters whose P- and Q-couplings are nonzero up to the critical
    /// index, with `tau10 = n a20`.
    pub fn params(&mut self, n: usize) -> HeunParams {
        loop {
            let p = HeunParams::unchecked(
                self.nonzero(),
                self.nonzero(),
                self.nonzero(),
                self.rational(),
                self.nonzero(),
                Rational::zero(),
                Rational::zero(),
            );
            let p = p.for_degree(n, Rational::zero());
            let quasi_definite = (0..n).all(|k| !p.ladder(k).is_zero())
                && (0..=n + 4).all(|k| !(int(k as i64 + n as i64) * &p.a32 + &p.a22).is_zero());
            if quasi_definite {
                return p;
            }
        }
    }
}

fn show(p: &HeunParams) -> String {
    format!(
        "a31={} a32={} a20={} a21={} a22={}",
        format_rational(&p.a31),
        format_rational(&p.a32),
        format_rational(&p.a20),
        format_rational(&p.a21),
        format_rational(&p.a22)
    )
}

fn cd_suite(s: &mut Sampler, cfg: &VerifyConfig) -> SuiteResult {
    let mut out = SuiteResult::new("christoffel-darboux");
    for _ in 0..cfg.cases {
        for n in 1..=4 {
            let p = s.params(n);
            for rec in [RecurrenceCoeffs::p(&p, n), RecurrenceCoeffs::q(&p, n)] {
                // the weights always come from the unmutated closed form
                let weights = cd_weights(&rec, &p, n);
                let built = if cfg.mutate { rec.clone().with_flipped_beta() } else { rec.clone() };
                let polys = built.polys(n + 1);
                for k in 0..n {
                    let (z, w) = (s.rational(), s.rational());
                    if z == w {
                        continue;
                    }
                    let lhs = cd_sum_from(&polys, &weights, k, &z, &w);
                    let rhs = cd_kernel_from(&polys, &weights, k, &z, &w);
                    let ok = matches!((&lhs, &rhs), (Ok(a), Ok(b)) if a == b);
                    out.check(ok, format!("{:?} CD sum = kernel (n={n}, k={k})", rec.kind), || {
                        format!("{} z={} w={}", show(&p), format_rational(&z), format_rational(&w))
                    });
                    let lhs = cd_confluent_sum_from(&polys, &weights, k, &z);
                    let rhs = cd_confluent_kernel_from(&polys, &weights, k, &z);
                    let ok = matches!((&lhs, &rhs), (Ok(a), Ok(b)) if a == b);
                    out.check(ok, format!("{:?} confluent CD (n={n}, k={k})", rec.kind), || {
                        format!("{} z={}", show(&p), format_rational(&z))
                    });
                }
            }
        }
    }
    out
}

fn factorization_suite(s: &mut Sampler, cfg: &VerifyConfig) -> SuiteResult {
    let mut out = SuiteResult::new("factorization");
    for _ in 0..cfg.cases {
        for n in 0..=3 {
            let p = s.params(n);
            for k in 0..=3 {
                out.check(factorize(&p, n, k).is_ok(), format!("P_{} divides P_{}", n + 1, k + n + 1), || show(&p));
            }
        }
    }
    out
}

fn norm_suite(s: &mut Sampler, cfg: &VerifyConfig) -> SuiteResult {
    let mut out = SuiteResult::new("norms");
    for _ in 0..cfg.cases {
        for n in 0..=4 {
            let p = s.params(n);
            match norms_p(&p, n, n + 4) {
                Ok(g) => {
                    out.check(g[n + 1..].iter().all(Zero::is_zero), format!("G_k = 0 past k = {n}"), || show(&p));
                    out.check(g[..=n].iter().all(|x| !x.is_zero()), format!("G_k != 0 up to k = {n}"), || show(&p));
                }
                Err(e) => out.check(false, format!("P closed-form norms (n={n})"), || format!("{} ({e})", show(&p))),
            }
            out.check(norms_q(&p, n, 4).is_ok(), format!("Q closed-form norms (n={n})"), || show(&p));
        }
    }
    out
}

fn moment_suite(s: &mut Sampler, cfg: &VerifyConfig) -> SuiteResult {
    let mut out = SuiteResult::new("moments");
    for _ in 0..cfg.cases {
        for n in 1..=4 {
            let p = s.params(n);
            for k in 0..=n {
                for c in inner_product_identities(&p, n, k).checks {
                    out.check(c.holds, format!("{} (n={n}, k={k})", c.name), || show(&p));
                }
            }
            // the printed mu_4 form is a known misprint and is skipped here
            for (i, c) in low_moment_checks(&p, n).into_iter().enumerate() {
                if i != 3 {
                    out.check(c.holds, format!("{} (n={n})", c.name), || show(&p));
                }
            }
        }
    }
    out
}

fn determinant_suite(s: &mut Sampler, cfg: &VerifyConfig) -> SuiteResult {
    let mut out = SuiteResult::new("determinant-bridge");
    for _ in 0..cfg.cases {
        for n in 0..=5 {
            let p = s.params(n);
            let sign = if n % 2 == 0 { -int(1) } else { int(1) };
            let ok = match sufficient_determinant(&p, n) {
                Ok(det) => det == critical_polynomial(&p, n).scale(&sign),
                Err(_) => false,
            };
            out.check(ok, format!("det = (-1)^(n+1) P_(n+1) (n={n})"), || show(&p));
        }
    }
    out
}

fn qes_suite(s: &mut Sampler, cfg: &VerifyConfig) -> SuiteResult {
    let mut out = SuiteResult::new("qes-consistency");
    for n in 0..=3 {
        out.check(recurrence_consistency(n, n + 1), format!("reduced recurrence (n={n})"), String::new);
        for parity in [int(0), rat(1, 2)] {
            let det = determinant_in_alpha(n, &parity);
            let crit = to_alpha_poly(&critical_polynomial_qes(n), n, &parity);
            let ratio = &det.leading() / &crit.leading();
            let ok = !ratio.is_zero() && det == crit.scale(&ratio);
            out.check(ok, format!("det proportional to critical polynomial (n={n})"), || {
                format!("s={}", format_rational(&parity))
            });
        }
    }
    for _ in 0..cfg.cases {
        let n = s.rng.random_range(0..=3usize);
        let parity = if s.rng.random_bool(0.5) { int(0) } else { rat(1, 2) };
        let alpha = s.nonzero();
        let beta = loop {
            let b = s.rational();
            if !(&b + Rational::one()).is_zero() {
                break b;
            }
        };
        out.check(
            qes_ortho_norms(n, &parity, &alpha, &beta, n + 1).is_ok(),
            format!("closed-form QES norms (n={n})"),
            || format!("alpha={} beta={}", format_rational(&alpha), format_rational(&beta)),
        );
    }
    out
}

pub fn run(cfg: &VerifyConfig) -> VerifyReport {
    let mut s = Sampler::new(cfg.seed);
    let suites = vec![
        cd_suite(&mut s, cfg),
        factorization_suite(&mut s, cfg),
        norm_suite(&mut s, cfg),
        moment_suite(&mut s, cfg),
        determinant_suite(&mut s, cfg),
        qes_suite(&mut s, cfg),
    ];
    VerifyReport { config: *cfg, suites }
}
