//! Bound states of `V(x) = -V0 sinh^p(x/d) / cosh^q(x/d)`, end to end for
//! `(p, q) = (4, 6)`.

pub mod potential;
pub mod reduction;
pub mod wavefunction;

pub use potential::{potential_integral, potential_quadrature, reduce_to_eta, EtaEquation, PotentialSpec};
pub use reduction::{
    critical_polynomial_qes, critical_polynomial_qes_at, determinant_in_alpha, energy_from_alpha,
    energy_poly, display_zeta, qes_ortho_norms, recurrence_consistency, reduce_to_heun,
    reduce_to_heun_symbolic, spectrum, sufficient_matrix, sufficient_matrix_symbolic, threshold,
    to_alpha_poly, QesProblem, SymbolicHeun,
};
pub use wavefunction::{solve_coupling, Coupling, Jet, ResidualReport, TailReport, Wavefunction};
