//! Free-form pipe routing in annular layout spaces.
//!
//! The crate models the space between two surfaces of revolution (casing
//! and nacelle), voxelizes obstacle point clouds into cylindrical octrees,
//! folds layout rules into a precomputed potential-energy table, and routes
//! cubic rational B-spline pipes through it. Two planners are provided
//! behind a common registry: a self-learning actor-critic agent that grows
//! the curve control point by control point, and a quantum-behaved particle
//! swarm baseline that optimizes a fixed-size control polygon.

pub mod environment;
pub mod error;
pub mod export;
pub mod geometry;
pub mod learner;
pub mod planner;
pub mod potential;
pub mod qpso;
pub mod routing;
pub mod scene;

pub use error::{Error, Result};
