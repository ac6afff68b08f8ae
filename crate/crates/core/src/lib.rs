//! Velocity-distribution inverse problems for spherically symmetric systems.

// `!(x > 0.0)` is used on purpose: it rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod abel_eddington;
pub mod ans_solver;
pub mod density;
pub mod error;
pub mod inverse_problem;
pub mod models;
pub mod potential;
pub mod quadrature;

pub use density::{DensityShape, RadialDensity};
pub use error::{Result, VpsError};
pub use potential::PotentialProfile;
