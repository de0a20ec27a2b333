//! Exact arithmetic: rationals, prime fields, multivariate polynomials and
//! rational functions, and sparse elimination over any of them.

pub mod echelon;
pub mod poly;
pub mod ratfunc;
pub mod scalar;

pub type Q = num_rational::BigRational;

pub use echelon::{Echelon, SparseRow};
pub use poly::{Monomial, Poly};
pub use ratfunc::RatFunc;
pub use scalar::{Fp, Scalar};
