//! Time-domain radar processing, from raw A-scans to calibrated RCS.
//!
//! The chain is: locate the ground echo in the envelope of the trace, cut a
//! short window around it ([`isolate_ground_return`]), take its spectrum on
//! the analysis grid ([`channel_response`]), then divide out the hardware
//! response measured once on a metal plate ([`derive_calibration`],
//! [`measured_rcs`]).

mod ascan;
mod calibration;
mod gate;
mod response;
mod ricker;

pub use ascan::{envelope, synthesize_ascan, AScan, Echo, Shaping, SynthesisConfig, MIN_SAMPLE_RATE};
pub use calibration::{
    derive_calibration, measured_rcs, plate_rcs, CalibrationFactor, PlateMeasurement,
    VALID_BAND_THRESHOLD,
};
pub use gate::{isolate_ground_return, GateConfig, GatedSegment};
pub use response::{channel_response, ChannelResponse};
pub use ricker::{ricker, ricker_spectrum, DEFAULT_CENTER_FREQUENCY};
