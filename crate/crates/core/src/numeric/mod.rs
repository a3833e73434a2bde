//! Floating-point helpers: polynomial roots, quadrature, ODE stepping.

pub mod ode;
pub mod quadrature;
pub mod roots;

pub use ode::{dopri5, OdeStats};
pub use quadrature::integrate_adaptive;
pub use roots::{multiset_distance, polynomial_roots};
