//! Frobenius manifolds: exact WDVV verification, A_n singularity and P²
//! quantum cohomology charts, canonical frames, isomonodromic flows,
//! descendent tables and braid actions on monodromy data.

pub mod algebra;
pub mod descendents;
pub mod error;
pub mod frame;
pub mod frobenius;
pub mod isomonodromy;
pub mod json;
pub mod monodromy;
pub mod numeric;
pub mod quantum;
pub mod selftest;
pub mod singularity;

pub use error::{Error, Result};
