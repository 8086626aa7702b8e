//! Channel with a variable bottom: profile, change of variables to gKdV, and direct integration.

mod equation;
mod profile;
mod synth;
mod transform;

pub use equation::VariableBottomEquation;
pub use profile::{build_profile, load_elevation, BottomProfile, BottomSource, DEFAULT_DEPTH_MARGIN};
pub use synth::{coefficient_fields, synth_coefficients, write_coefficients_csv, FRAME_SPEED};
pub use transform::{transform_backward, transform_forward, Transformed, OUT_OF_BAND_LIMIT};
