//! Sup-convolution of two eigenfunctions on a Minkowski interpolant, with
//! the regularity probes that make it usable as a trial field.

mod field;
mod pairs;
mod probes;

pub use field::{sup_convolve, sup_convolve_reference, SupConvField};
pub use pairs::{
    gradient_identity_residual, identity_residuals, optimal_pairs, IdentityResidual, OptimalPair,
};
pub use probes::{
    ibp_check, lipschitz_estimate, mollify, semiconvexity_probe, IbpReport, MollifiedField,
    SemiconvexityProbe,
};
