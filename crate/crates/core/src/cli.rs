//! The `heun` command line.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactmath::rational::{
    format_rational, format_rational_capped, int, parse_rational, serde_rational, serde_rational_opt,
    serde_rational_vec, to_decimal_string, Rational,
};
use crate::exactmath::RationalPoly;
use crate::heun::{
    admissible_tau11, build_solution, build_solution_approx, necessary_condition, sufficient_determinant,
    ApproxSolution, HeunParams, PolySolution,
};
use crate::orthoseq::{
    factorize, generate_p, generate_q, low_moment_checks, moments, norms_p, zeros_p, IdentityCheck, Kind,
    OrthoSequence, ZerosReport,
};
use crate::qes::{solve_coupling, threshold};
use crate::verify::{self, VerifyConfig, VerifyReport};

/// Rationals longer than this are abbreviated in pretty output.
pub const PRETTY_CAP: usize = 40;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VERIFY: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Pretty,
}

#[derive(Debug, Parser)]
#[command(name = "heun", version, about = "Polynomial solutions of the generalized confluent Heun equation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Pretty)]
    pub format: Format,
    /// Decimal digits for interval refinement.
    #[arg(long, global = true, default_value_t = 30)]
    pub precision: usize,
}

fn rational_arg(s: &str) -> std::result::Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

#[derive(Debug, Clone, Args)]
pub struct ParamArgs {
    #[arg(long, value_parser = rational_arg, allow_hyphen_values = true)]
    pub a31: Rational,
    #[arg(long, value_parser = rational_arg, allow_hyphen_values = true)]
    pub a32: Rational,
    #[arg(long, value_parser = rational_arg, allow_hyphen_values = true)]
    pub a20: Rational,
    #[arg(long, value_parser = rational_arg, allow_hyphen_values = true)]
    pub a21: Rational,
    #[arg(long, value_parser = rational_arg, allow_hyphen_values = true)]
    pub a22: Rational,
    /// Defaults to `n a20`, the value the necessary condition requires.
    #[arg(long, value_parser = rational_arg, allow_hyphen_values = true)]
    pub tau10: Option<Rational>,
}

impl ParamArgs {
    fn params(&self, n: usize) -> HeunParams {
        HeunParams::unchecked(
            self.a31.clone(),
            self.a32.clone(),
            self.a20.clone(),
            self.a21.clone(),
            self.a22.clone(),
            self.tau10.clone().unwrap_or_else(|| int(n as i64) * &self.a20),
            int(0),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SeqKind {
    P,
    Q,
}

#[derive(Debug, Clone, Args)]
pub struct QesArgs {
    #[arg(long)]
    pub n: usize,
    /// Parity exponent, 0 or 1/2.
    #[arg(long, value_parser = rational_arg)]
    pub s: Rational,
    #[arg(long, value_parser = rational_arg)]
    pub d: Rational,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide solvability at degree n and build the polynomial solutions.
    SolveHeun {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        n: usize,
    },
    /// The P- (or Q-) sequence with norms and moments.
    GenPoly {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        kmax: Option<usize>,
        #[arg(long, value_enum, default_value_t = SeqKind::P)]
        kind: SeqKind,
    },
    /// Zeros of P_{k+1} by eigenvalues and by exact isolation.
    Zeros {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
    },
    /// Moments, norms and the low-moment identities.
    Moments {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        kmax: Option<usize>,
    },
    /// Divide P_{k+n+1} by the critical polynomial P_{n+1}.
    Factorize {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        k: usize,
    },
    /// Admissible couplings and energies of the (4,6) potential.
    QesSpectrum {
        #[command(flatten)]
        qes: QesArgs,
        /// Wavefunction samples per coupling.
        #[arg(long, default_value_t = 21)]
        points: usize,
    },
    /// A sampled wavefunction of the (4,6) potential.
    QesWavefunction {
        #[command(flatten)]
        qes: QesArgs,
        /// Which admissible coupling, in increasing order.
        #[arg(long, default_value_t = 0)]
        root: usize,
        #[arg(long, default_value_t = 201)]
        points: usize,
        /// Half-width of the grid in units of d.
        #[arg(long, default_value_t = 8.0)]
        extent: f64,
    },
    /// Randomized identity suites.
    Verify {
        #[arg(long, default_value_t = verify::DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        mutate: bool,
        #[arg(long, default_value_t = 20)]
        cases: usize,
    },
}

/// A command result that can be rendered in all three formats.
pub trait Render: Serialize {
    fn csv(&self) -> String;
    fn pretty(&self) -> String;

    fn json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable");
        s.push('\n');
        s
    }

    fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.json(),
            Format::Csv => self.csv(),
            Format::Pretty => self.pretty(),
        }
    }
}

fn cap(q: &Rational) -> String {
    format_rational_capped(q, PRETTY_CAP)
}

fn poly_pretty(p: &RationalPoly, var: &str) -> String {
    if p.coeffs().iter().all(|c| format_rational(c).len() <= PRETTY_CAP) {
        p.display_with(var)
    } else {
        let terms: Vec<String> = p.coeffs().iter().map(cap).collect();
        format!("[{}] (coefficients, lowest first)", terms.join(", "))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootEntry {
    #[serde(with = "serde_rational_vec")]
    pub interval: Vec<Rational>,
    pub decimal: String,
    #[serde(with = "serde_rational_opt", default)]
    pub exact: Option<Rational>,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub params: HeunParams,
    pub n: usize,
    pub necessary_condition: bool,
    pub verdict: String,
    /// Sufficient determinant as a polynomial in tau11.
    pub determinant: Option<RationalPoly>,
    pub roots: Vec<RootEntry>,
    pub solutions: Vec<PolySolution>,
    pub approximate: Vec<ApproxSolution>,
}

impl Render for SolveReport {
    fn csv(&self) -> String {
        let mut out = String::from("tau11_lo,tau11_hi,decimal,exact,multiplicity\n");
        for r in &self.roots {
            let exact = r.exact.as_ref().map(format_rational).unwrap_or_default();
            writeln!(
                out,
                "{},{},{},{},{}",
                format_rational(&r.interval[0]),
                format_rational(&r.interval[1]),
                r.decimal,
                exact,
                r.multiplicity
            )
            .unwrap();
        }
        out
    }

    fn pretty(&self) -> String {
        let mut out = String::new();
        writeln!(out, "degree n = {}: {}", self.n, self.verdict).unwrap();
        if let Some(det) = &self.determinant {
            writeln!(out, "sufficient determinant: {}", poly_pretty(det, "tau11")).unwrap();
        }
        for r in &self.roots {
            match &r.exact {
                Some(q) => writeln!(out, "  tau11 = {}", cap(q)).unwrap(),
                None => writeln!(out, "  tau11 ~ {}", r.decimal).unwrap(),
            }
        }
        for s in &self.solutions {
            writeln!(out, "y_{}(r) at tau11 = {}: {}", s.n, cap(&s.tau11), poly_pretty(&s.poly(), "r")).unwrap();
        }
        for a in &self.approximate {
            let terms: Vec<String> = a.coeffs.iter().map(|c| format!("{c:.15e}")).collect();
            writeln!(
                out,
                "y_{}(r) at tau11 ~ {}: [{}] (residual {:.2e})",
                a.n,
                a.tau11_decimal,
                terms.join(", "),
                a.residual_bound
            )
            .unwrap();
        }
        out
    }
}

pub fn cmd_solve_heun(params: &HeunParams, n: usize, digits: usize) -> Result<SolveReport> {
    params.validate()?;
    if !necessary_condition(params, n) {
        return Ok(SolveReport {
            params: params.clone(),
            n,
            necessary_condition: false,
            verdict: format!("no polynomial solution of degree {n}"),
            determinant: None,
            roots: Vec::new(),
            solutions: Vec::new(),
            approximate: Vec::new(),
        });
    }
    let det = sufficient_determinant(params, n)?;
    let roots = admissible_tau11(params, n)?;
    let mut entries = Vec::new();
    let mut solutions = Vec::new();
    let mut approximate = Vec::new();
    for r in &roots {
        let refined = r.refine(&crate::exactmath::rational::decimal_width(digits));
        entries.push(RootEntry {
            interval: vec![refined.lo.clone(), refined.hi.clone()],
            decimal: to_decimal_string(&refined.midpoint(), digits),
            exact: r.exact_value().cloned(),
            multiplicity: r.multiplicity,
        });
        match r.exact_value() {
            Some(q) => solutions.push(build_solution(params, n, q)?),
            None => approximate.push(build_solution_approx(params, n, r, digits)?),
        }
    }
    let verdict = if roots.is_empty() {
        "necessary condition holds; the sufficient determinant has no real roots".to_string()
    } else {
        format!("{} admissible tau11 value(s)", roots.len())
    };
    Ok(SolveReport {
        params: params.clone(),
        n,
        necessary_condition: true,
        verdict,
        determinant: Some(det),
        roots: entries,
        solutions,
        approximate,
    })
}

impl Render for OrthoSequence {
    fn csv(&self) -> String {
        self.to_csv()
    }

    fn pretty(&self) -> String {
        let name = match self.kind {
            Kind::P => "P",
            Kind::Q => "Q",
        };
        let mut out = String::new();
        for (k, p) in self.polys.iter().enumerate() {
            let g = self.norms.get(k).map(cap).unwrap_or_default();
            writeln!(out, "{name}_{k}^{}(zeta) = {}    G_{k} = {g}", self.n, poly_pretty(p, "zeta")).unwrap();
        }
        out
    }
}

impl Render for ZerosReport {
    fn csv(&self) -> String {
        let mut out = String::from("index,re,im\n");
        for (i, x) in self.eigenvalues.real.iter().enumerate() {
            writeln!(out, "{i},{x:e},0").unwrap();
        }
        let offset = self.eigenvalues.real.len();
        for (i, (re, im)) in self.eigenvalues.nonreal.iter().enumerate() {
            writeln!(out, "{},{re:e},{im:e}", offset + 2 * i).unwrap();
            writeln!(out, "{},{re:e},{:e}", offset + 2 * i + 1, -im).unwrap();
        }
        out
    }

    fn pretty(&self) -> String {
        let mut out = String::new();
        writeln!(out, "zeros of P_{}^{} ({:?})", self.k + 1, self.n, self.eigenvalues.method).unwrap();
        for (z, e) in self.exact.iter().zip(&self.eigenvalues.real) {
            writeln!(out, "  {}  (eigenvalue {e:.15e})", z.decimal).unwrap();
        }
        for (re, im) in &self.eigenvalues.nonreal {
            writeln!(out, "  {re:.15e} +/- {im:.15e} i").unwrap();
        }
        writeln!(out, "max relative deviation: {:.2e}", self.max_deviation).unwrap();
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentsReport {
    pub n: usize,
    #[serde(with = "serde_rational_vec")]
    pub moments: Vec<Rational>,
    #[serde(with = "serde_rational_vec")]
    pub norms: Vec<Rational>,
    pub checks: Vec<IdentityCheck>,
}

impl Render for MomentsReport {
    fn csv(&self) -> String {
        let mut out = String::from("k,moment,norm\n");
        for (k, m) in self.moments.iter().enumerate() {
            let g = self.norms.get(k).map(format_rational).unwrap_or_default();
            writeln!(out, "{k},{},{g}", format_rational(m)).unwrap();
        }
        out
    }

    fn pretty(&self) -> String {
        let mut out = String::new();
        for (k, m) in self.moments.iter().enumerate() {
            write!(out, "mu_{k} = {}", cap(m)).unwrap();
            if let Some(g) = self.norms.get(k) {
                write!(out, "    G_{k} = {}", cap(g)).unwrap();
            }
            out.push('\n');
        }
        for c in &self.checks {
            writeln!(out, "[{}] {}", if c.holds { "ok" } else { "differs" }, c.name).unwrap();
        }
        out
    }
}

pub fn cmd_moments(params: &HeunParams, n: usize, kmax: usize) -> Result<MomentsReport> {
    Ok(MomentsReport {
        n,
        moments: moments(params, n, kmax),
        norms: norms_p(params, n, kmax.min(n + 1))?,
        checks: low_moment_checks(params, n),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorReport {
    pub n: usize,
    pub k: usize,
    pub critical: RationalPoly,
    pub quotient: RationalPoly,
    pub remainder: RationalPoly,
}

impl Render for FactorReport {
    fn csv(&self) -> String {
        let width = self.critical.coeffs().len().max(self.quotient.coeffs().len()).max(1);
        let mut out = String::from("poly");
        for j in 0..width {
            write!(out, ",c{j}").unwrap();
        }
        out.push('\n');
        for (name, p) in [("critical", &self.critical), ("quotient", &self.quotient), ("remainder", &self.remainder)] {
            out.push_str(name);
            for j in 0..width {
                write!(out, ",{}", format_rational(&p.coeff(j))).unwrap();
            }
            out.push('\n');
        }
        out
    }

    fn pretty(&self) -> String {
        format!(
            "P_{}^{n} = P_{}^{n} * ({})\ncritical P_{}^{n}(zeta) = {}\nremainder: {}\n",
            self.k + self.n + 1,
            self.n + 1,
            poly_pretty(&self.quotient, "zeta"),
            self.n + 1,
            poly_pretty(&self.critical, "zeta"),
            poly_pretty(&self.remainder, "zeta"),
            n = self.n,
        )
    }
}

pub fn cmd_factorize(params: &HeunParams, n: usize, k: usize) -> Result<FactorReport> {
    let (quotient, remainder) = factorize(params, n, k)?;
    Ok(FactorReport {
        n,
        k,
        critical: crate::orthoseq::critical_polynomial(params, n),
        quotient,
        remainder,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaEntry {
    #[serde(with = "serde_rational_vec")]
    pub interval: Vec<Rational>,
    pub decimal: String,
}

/// One admissible coupling in the external JSON shape.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QesEntry {
    pub n: usize,
    #[serde(with = "serde_rational")]
    pub s: Rational,
    #[serde(with = "serde_rational")]
    pub d: Rational,
    pub alpha: AlphaEntry,
    #[serde(rename = "U0")]
    pub u0: f64,
    pub energies: Vec<f64>,
    pub residual_max: f64,
    pub wavefunction_samples: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QesReport {
    /// How beta and zeta are fixed in terms of alpha.
    pub conventions: Vec<String>,
    #[serde(with = "serde_rational")]
    pub threshold: Rational,
    pub couplings: Vec<QesEntry>,
}

impl Render for QesReport {
    fn csv(&self) -> String {
        let mut out = String::from("index,alpha,U0,energy_n,residual_max\n");
        for (i, c) in self.couplings.iter().enumerate() {
            let e = c.energies.last().copied().unwrap_or(f64::NAN);
            writeln!(out, "{i},{},{:e},{e:e},{:e}", c.alpha.decimal, c.u0, c.residual_max).unwrap();
        }
        out
    }

    fn pretty(&self) -> String {
        let mut out = String::new();
        if self.couplings.is_empty() {
            writeln!(out, "no admissible coupling above alpha = {}", cap(&self.threshold)).unwrap();
            return out;
        }
        let head = &self.couplings[0];
        writeln!(
            out,
            "n = {}, s = {}, d = {}: {} admissible coupling(s) above alpha = {}",
            head.n,
            format_rational(&head.s),
            cap(&head.d),
            self.couplings.len(),
            cap(&self.threshold)
        )
        .unwrap();
        for c in &self.couplings {
            writeln!(out, "  alpha = d sqrt(U0) ~ {}", c.alpha.decimal).unwrap();
            writeln!(out, "    U0 = {:.15e}, residual {:.2e}", c.u0, c.residual_max).unwrap();
            let es: Vec<String> = c.energies.iter().map(|e| format!("{e:.12e}")).collect();
            writeln!(out, "    energies eps_0..eps_{}: {}", c.n, es.join(", ")).unwrap();
        }
        out
    }
}

pub fn cmd_qes(n: usize, s: &Rational, d: &Rational, digits: usize, points: usize) -> Result<QesReport> {
    let couplings = solve_coupling(n, s, d, digits)?;
    let x_max = 8.0 * crate::exactmath::rational::to_f64(d);
    let mut entries = Vec::new();
    for c in couplings {
        let w = c.wavefunction()?;
        let residual = w.residual_report(200, 8.0).residual_max;
        entries.push(QesEntry {
            n,
            s: s.clone(),
            d: d.clone(),
            alpha: AlphaEntry {
                interval: vec![c.alpha.lo.clone(), c.alpha.hi.clone()],
                decimal: c.alpha_decimal.clone(),
            },
            u0: c.u0,
            energies: c.energies.clone(),
            residual_max: residual,
            wavefunction_samples: if points == 0 { Vec::new() } else { w.samples(points, x_max) },
        });
    }
    Ok(QesReport {
        conventions: vec![
            "beta = (alpha - (4n + 4s + 3))/2 > 0".into(),
            "zeta = tau11 = alpha^2 - 2 alpha (1 + beta) - (1 + beta)(beta + 4 s)".into(),
        ],
        threshold: threshold(n, s),
        couplings: entries,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WavefunctionReport {
    pub coupling: QesEntry,
    /// Coefficients of `f(eta)`, lowest first.
    #[serde(with = "serde_rational_vec")]
    pub f_coeffs: Vec<Rational>,
}

impl Render for WavefunctionReport {
    fn csv(&self) -> String {
        let mut out = String::from("x,psi\n");
        for (x, y) in &self.coupling.wavefunction_samples {
            writeln!(out, "{x:e},{y:e}").unwrap();
        }
        out
    }

    fn pretty(&self) -> String {
        let c = &self.coupling;
        let mut out = format!(
            "psi_{} at alpha ~ {} (residual {:.2e})\n",
            c.n, c.alpha.decimal, c.residual_max
        );
        let f = RationalPoly::new(self.f_coeffs.clone());
        writeln!(out, "f(eta) = {}", poly_pretty(&f, "eta")).unwrap();
        for (x, y) in &c.wavefunction_samples {
            writeln!(out, "  {x:>12.6} {y:>22.15e}").unwrap();
        }
        out
    }
}

pub fn cmd_qes_wavefunction(
    n: usize,
    s: &Rational,
    d: &Rational,
    digits: usize,
    root: usize,
    points: usize,
    extent: f64,
) -> Result<WavefunctionReport> {
    let couplings = solve_coupling(n, s, d, digits)?;
    let count = couplings.len();
    let c = couplings
        .into_iter()
        .nth(root)
        .ok_or_else(|| Error::InvalidParams(format!("root index {root} out of range ({count} couplings)")))?;
    let w = c.wavefunction()?;
    let x_max = extent * crate::exactmath::rational::to_f64(d);
    Ok(WavefunctionReport {
        coupling: QesEntry {
            n,
            s: s.clone(),
            d: d.clone(),
            alpha: AlphaEntry {
                interval: vec![c.alpha.lo.clone(), c.alpha.hi.clone()],
                decimal: c.alpha_decimal.clone(),
            },
            u0: c.u0,
            energies: c.energies.clone(),
            residual_max: w.residual_report(200, 8.0).residual_max,
            wavefunction_samples: w.samples(points, x_max),
        },
        f_coeffs: w.f_coeffs,
    })
}

impl Render for VerifyReport {
    fn csv(&self) -> String {
        let mut out = String::from("suite,checks,failures\n");
        for s in &self.suites {
            writeln!(out, "{},{},{}", s.name, s.checks, s.failures.len()).unwrap();
        }
        out
    }

    fn pretty(&self) -> String {
        let mut out = format!("seed {}{}\n", self.config.seed, if self.config.mutate { " (mutated)" } else { "" });
        for s in &self.suites {
            let status = if s.passed() { "PASS" } else { "FAIL" };
            writeln!(out, "{status} {:<20} {} checks", s.name, s.checks).unwrap();
            for f in s.failures.iter().take(3) {
                writeln!(out, "    {}: {}", f.identity, f.witness).unwrap();
            }
            if s.failures.len() > 3 {
                writeln!(out, "    ... {} more", s.failures.len() - 3).unwrap();
            }
        }
        out
    }
}

/// What a command produced: the rendered text and the exit status it implies.
struct Outcome {
    text: String,
    code: i32,
}

fn render<R: Render>(r: &R, format: Format) -> Outcome {
    Outcome {
        text: r.render(format),
        code: EXIT_OK,
    }
}

fn dispatch(cli: &Cli) -> Result<Outcome> {
    let fmt = cli.format;
    let digits = cli.precision;
    Ok(match &cli.command {
        Command::SolveHeun { params, n } => render(&cmd_solve_heun(&params.params(*n), *n, digits)?, fmt),
        Command::GenPoly { params, n, kmax, kind } => {
            let p = params.params(*n);
            let seq = match kind {
                SeqKind::P => generate_p(&p, *n, kmax.unwrap_or(n + 1)),
                SeqKind::Q => generate_q(&p, *n, kmax.unwrap_or(3)),
            };
            render(&seq, fmt)
        }
        Command::Zeros { params, n, k } => render(&zeros_p(&params.params(*n), *n, *k, digits)?, fmt),
        Command::Moments { params, n, kmax } => {
            render(&cmd_moments(&params.params(*n), *n, kmax.unwrap_or(2 * n + 2))?, fmt)
        }
        Command::Factorize { params, n, k } => render(&cmd_factorize(&params.params(*n), *n, *k)?, fmt),
        Command::QesSpectrum { qes, points } => render(&cmd_qes(qes.n, &qes.s, &qes.d, digits, *points)?, fmt),
        Command::QesWavefunction {
            qes,
            root,
            points,
            extent,
        } => render(
            &cmd_qes_wavefunction(qes.n, &qes.s, &qes.d, digits, *root, *points, *extent)?,
            fmt,
        ),
        Command::Verify { seed, mutate, cases } => {
            let report = verify::run(&VerifyConfig {
                seed: *seed,
                cases: *cases,
                mutate: *mutate,
            });
            Outcome {
                text: report.render(fmt),
                code: if report.passed() { EXIT_OK } else { EXIT_VERIFY },
            }
        }
    })
}

/// Runs the CLI on `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(text.as_bytes())
            } else {
                stdout.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let outcome = match dispatch(&cli) {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return match e {
                Error::InconsistentCoupling { .. } | Error::Consistency(_) => EXIT_VERIFY,
                _ => EXIT_USAGE,
            };
        }
    };
    let written = match &cli.out {
        Some(path) => std::fs::write(path, &outcome.text),
        None => stdout.write_all(outcome.text.as_bytes()),
    };
    if let Err(e) = written {
        let _ = writeln!(stderr, "error: {e}");
        return EXIT_USAGE;
    }
    outcome.code
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::rational::rat;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let mut full = vec!["heun"];
        full.extend_from_slice(args);
        let code = run(full, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn solve_heun_first_degree_example() {
        let p = HeunParams::from_ints(1, 1, 1, 3, 2, 1, 0);
        let r = cmd_solve_heun(&p, 1, 30).unwrap();
        let taus: Vec<_> = r.solutions.iter().map(|s| s.tau11.clone()).collect();
        assert_eq!(taus, vec![int(1), int(2)]);
        // y_1 = 1 + tau11 r / 2
        for s in &r.solutions {
            assert_eq!(s.coeffs, vec![int(1), &s.tau11 / int(2)]);
        }
    }

    #[test]
    fn solve_heun_degree_zero() {
        let p = HeunParams::from_ints(1, 1, 1, 3, 2, 0, 0);
        let r = cmd_solve_heun(&p, 0, 30).unwrap();
        assert_eq!(r.solutions.len(), 1);
        assert_eq!(r.solutions[0].tau11, int(0));
        assert_eq!(r.solutions[0].coeffs, vec![int(1)]);
    }

    #[test]
    fn necessary_condition_verdict() {
        let (code, out, _) = run_str(&[
            "solve-heun", "--a31", "1", "--a32", "1", "--a20", "1", "--a21", "3", "--a22", "2", "--tau10", "5",
            "--n", "1",
        ]);
        assert_eq!(code, 0);
        assert!(out.contains("no polynomial solution of degree 1"));
    }

    #[test]
    fn decimal_inputs_parse_exactly() {
        let (code, out, _) = run_str(&[
            "solve-heun", "--a31", "0.25", "--a32", "-1/2", "--a20", "1", "--a21", "3", "--a22", "2", "--n", "1",
            "--format", "json",
        ]);
        assert_eq!(code, 0);
        let r: SolveReport = serde_json::from_str(&out).unwrap();
        assert_eq!(r.params.a31, rat(1, 4));
        assert_eq!(r.params.a32, rat(-1, 2));
    }

    #[test]
    fn missing_width_is_usage_error() {
        let (code, _, err) = run_str(&["qes-spectrum", "--n", "0", "--s", "0"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("--d"));
    }

    #[test]
    fn invalid_params_are_usage_errors() {
        let (code, _, err) = run_str(&[
            "solve-heun", "--a31", "0", "--a32", "0", "--a20", "1", "--a21", "3", "--a22", "2", "--n", "1",
        ]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("a31 and a32"));
        let (code, _, _) = run_str(&["qes-spectrum", "--n", "0", "--s", "1/3", "--d", "1"]);
        assert_eq!(code, EXIT_USAGE);
    }

    #[test]
    fn qes_ground_state_report() {
        let r = cmd_qes(0, &int(0), &int(1), 30, 5).unwrap();
        assert_eq!(r.couplings.len(), 1);
        let c = &r.couplings[0];
        assert!(c.alpha.decimal.starts_with("7.605551275463989293119221267470"));
        assert!(c.residual_max < 1e-10);
        assert_eq!(c.wavefunction_samples.len(), 5);
    }

    #[test]
    fn pretty_caps_long_rationals() {
        let long = Rational::new(
            "123456789012345678901234567890123456789012345".parse().unwrap(),
            7.into(),
        );
        assert!(cap(&long).chars().count() <= PRETTY_CAP);
    }
}
