//! Numerical laboratory for the inhomogeneous nonlinear Schrödinger equation
//! `i u_t + Delta u = lambda |x|^(-alpha) |u|^beta u`.

pub mod error;
pub mod field;
pub mod experiments;
pub mod grid;
pub mod random;
pub mod exponents;
pub mod solver;
pub mod spectral;
pub mod weighted;

pub use error::{Error, Result};
pub use field::{ComplexField, Trajectory};
pub use grid::GridSpec;
