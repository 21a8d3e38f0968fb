//! Canopy structure from crop LiDAR point clouds: ground normalization,
//! canopy height model, row detection, plant density, leaf area index and
//! leaf density, plus a ray-cast generator of synthetic crop tiles.

pub mod chm;
pub mod cloud;
pub mod density;
pub mod error;
pub mod estimate;
pub mod ground;
pub mod lai;
pub mod rows;
mod signal;
pub mod synth;

pub use chm::{build_chm, CanopyHeightModel};
pub use cloud::{PointCloud, Tile};
pub use error::{LidarError, Result};
pub use estimate::{canopy_height, estimate_structure, AllometryEntry, CanopyStructureEstimate, StructureConfig};
pub use ground::normalize_ground;
pub use lai::{estimate_lai, leaf_density, LaiForm};
pub use rows::{detect_rows, RowAxis, RowSegmentation};
