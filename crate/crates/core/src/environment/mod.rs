//! Layout-space definition, obstacle clouds, and octree voxelization.

mod cloud;
mod layout;
mod octree;

pub use cloud::PointCloud;
pub use layout::LayoutSpace;
pub use octree::{cylindrical_bounds, ObstacleOctree};
