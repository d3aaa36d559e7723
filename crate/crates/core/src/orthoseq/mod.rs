//! Finite orthogonal sequences generated by the polynomial solutions, and
//! the quotient sequences past the critical polynomial.

pub mod christoffel;
pub mod moments;
pub mod sequence;
pub mod zeros;

pub use christoffel::{
    cd_confluent_kernel, cd_confluent_kernel_q, cd_confluent_sum, cd_confluent_sum_q, cd_kernel,
    cd_kernel_q, cd_sum, cd_sum_q,
};
pub use moments::{
    inner_product_identities, low_moment_checks, moments, norms_p, norms_q, IdentityCheck,
    IdentityReport, MomentFunctional,
};
pub use sequence::{
    critical_polynomial, factorize, generate_p, generate_q, p_polys, q_polys, HeunCoeffs, Kind,
    OrthoSequence, RecurrenceCoeffs,
};
pub use zeros::{zeros_p, ZerosReport};
