use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("division by the zero polynomial")]
    DivisionByZeroPolynomial,

    #[error("the zero polynomial has no isolated roots")]
    ZeroPolynomial,

    #[error("malformed tridiagonal matrix: diagonal has {diag} entries, sub {sub}, super {sup}")]
    MalformedTridiagonal { diag: usize, sub: usize, sup: usize },

    #[error("cannot parse rational from {0:?}")]
    ParseRational(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("necessary condition violated: tau10 = {tau10} but n*a20 = {expected}")]
    NecessaryConditionViolated { tau10: String, expected: String },

    #[error("sufficient condition violated: determinant at tau11 = {tau11} is {value}")]
    SufficientConditionViolated { tau11: String, value: String },

    #[error("degenerate ladder: k*a32 + a22 vanishes at k = {k}")]
    DegenerateLadder { k: usize },

    #[error("undefined hypergeometric parameter: lower parameter {b} hits a vanishing rising factorial")]
    UndefinedHypergeometric { b: String },

    #[error("degenerate parameters: {0}")]
    DegenerateParameters(String),

    #[error("internal consistency failure: {0}")]
    Consistency(String),

    #[error("not reducible to polynomial-coefficient form: p = {p}, q = {q}")]
    NotReducible { p: u32, q: u32 },

    #[error("below quantization threshold: d*sqrt(U0) = {alpha} must exceed {threshold}")]
    BelowThreshold { alpha: String, threshold: String },

    #[error("inconsistent coupling: max residual {residual:e} exceeds tolerance {tolerance:e}")]
    InconsistentCoupling { residual: f64, tolerance: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
