//! Exact rational arithmetic, polynomials, tridiagonal matrices and real
//! root isolation.

pub mod eigen;
pub mod multipoly;
pub mod poly;
pub mod rational;
pub mod roots;
pub mod tridiag;

pub use eigen::{eig_tridiagonal, EigenMethod, Eigenvalues};
pub use multipoly::MultiPoly;
pub use poly::RationalPoly;
pub use rational::{int, parse_rational, rat, Rational, Ring};
pub use roots::{isolate_real_roots, RealRoot, RootRange, SturmChain};
pub use tridiag::Tridiagonal;
