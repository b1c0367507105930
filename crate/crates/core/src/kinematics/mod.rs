//! Kinematics oracle: speed profiles, power graphs, and exact overlap
//! energies used to generate surrogate-fit data and to cross-validate the
//! optimizer's predictions.
//!
//! This is a physics-lite simulator: point-mass train, constant maximum
//! acceleration and braking, Davis quadratic running resistance plus a grade
//! term. It is not an optimal-control solver; its job is to produce
//! realistic, monotone energy-vs-trip-time curves and power pulses.

mod overlap;
mod power;
mod profile;
mod samples;

pub use overlap::{exact_overlap_regen, sweep_transfer_samples, PowerSegment, TransferSample};
pub use power::{fwhm_window, power_profile, FwhmRect, PowerProfile};
pub use profile::{
    build_speed_profile, build_speed_profile_with, minimum_trip_time, KinematicsError, Phase,
    PhaseKind, ProfileOptions, SpeedProfile,
};
pub use samples::{energy_vs_triptime_samples, joules_to_kwh, TripSample};

pub const GRAVITY: f64 = 9.80665;

/// Default power-sampling step, seconds.
pub const SAMPLE_STEP_S: f64 = 0.1;
