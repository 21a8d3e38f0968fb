//! Forward model, radar calibration and grid-search inversion for nadir
//! wideband radar soil moisture retrieval under crop canopies.

pub mod canopy;
pub mod em;
pub mod error;
pub mod formats;
pub mod ground;
pub mod radar;
pub mod retrieval;
pub mod scene;

pub use error::{Error, Result};
