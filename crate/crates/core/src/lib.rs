//! Gradient trees in the real line and the holomorphic disks that converge to
//! them: affine Lagrangian geometry, Schwarz-Christoffel maps evaluated through
//! hypergeometric series, the quadrilateral accessory parameter, and sup-norm
//! convergence measurement with explicit error bounds.

pub mod converge;
pub mod error;
pub mod geometry;
pub mod gradtree;
pub mod param;
pub mod quadrature;
pub mod report;
pub mod sampling;
pub mod scmap;
pub mod specfun;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Complex numbers used throughout the crate.
pub type ComplexValue = Complex64;
