//! Planar domains: analytic shapes, grid rasterization, Minkowski interpolation.

mod grid;
mod minkowski;
mod shape;

pub use grid::{
    bilinear as bilinear_sample, distance_transform, rasterize, signed_distance_to_mask, BitMask,
    DeformationParam, Grid, GridDomain,
};
pub use minkowski::{boundary_inclusion_check, is_convex, minkowski_interpolate};
pub use shape::ShapeSpec;
