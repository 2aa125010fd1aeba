//! Discrete Dirichlet Schrödinger operators `-Δ + V` and their first
//! eigenpairs.

mod eigen;
mod operator;
mod potential;
mod quotient;

pub use eigen::{smallest_eigenpair, EigenPair};
pub use operator::{assemble, DiscreteOperator};
pub use potential::PotentialSpec;
pub use quotient::{gradient_field, rayleigh_quotient};
