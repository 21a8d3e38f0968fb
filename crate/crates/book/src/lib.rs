//! The guide in `book/src`, included here so every snippet runs as a
//! doc-test.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/permittivity.md")]
pub mod permittivity {}

#[doc = include_str!("../../../book/src/canopy.md")]
pub mod canopy {}

#[doc = include_str!("../../../book/src/ground.md")]
pub mod ground {}

#[doc = include_str!("../../../book/src/calibration.md")]
pub mod calibration {}

#[doc = include_str!("../../../book/src/retrieval.md")]
pub mod retrieval {}

#[doc = include_str!("../../../book/src/lidar.md")]
pub mod lidar {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
