//! Coordinate frames, cylindrical sectors, and rational B-spline curves.

mod nurbs;
mod point;
mod sector;

pub use nurbs::{
    basis_derivatives, basis_functions, knot_domain, knot_vector, EndMode, NurbsPath,
    PIPE_DEGREE,
};
pub use point::{normalize_angle, CartPoint, CylPoint};
pub use sector::{distance_point_to_sector, Sector};
