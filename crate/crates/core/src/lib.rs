//! Numerical toolkit for Dirichlet eigenvalues of Schrödinger operators on
//! Minkowski-deformed planar domains.
//!
//! The crate rasterizes analytic shapes onto uniform grids, interpolates
//! domains by Minkowski sums, solves for first Dirichlet eigenpairs of
//! `-Δ + V`, builds the sup-convolution of two eigenfunctions as a trial
//! field on the interpolated domain, and checks the resulting eigenvalue
//! chord inequality, eigenfunction log-concavity, and related identities
//! at the discrete level.
//!
//! All numerical kernels are generic over the scalar type via [`scalar::Real`];
//! concrete `f64` aliases live at the crate root.

pub mod error;
pub mod field;
pub mod geometry;
pub mod io;
pub mod scalar;
pub mod spectral;
pub mod supconv;
pub mod tolerances;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::Real;

/// Concrete `f64` aliases for the common types.
pub type Grid64 = geometry::Grid<f64>;
pub type Shape64 = geometry::ShapeSpec<f64>;
pub type Domain64 = geometry::GridDomain<f64>;
pub type Potential64 = spectral::PotentialSpec<f64>;
pub type EigenPair64 = spectral::EigenPair<f64>;
pub type SupConv64 = supconv::SupConvField<f64>;
