//! Exact arithmetic: rationals, sparse polynomials, marker series, matrices
//! and expansions at infinity.

pub mod laurent;
pub mod matrix;
pub mod poly;
pub mod rational;
pub mod series;

pub use laurent::{puiseux_root_expansion, residue_at_infinity, residue_at_infinity_param, LaurentTail, RootExpansion, UPoly};
pub use matrix::QMatrix;
pub use poly::MultiPoly;
pub use rational::Rational;
pub use series::ExpSeries;
