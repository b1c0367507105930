//! Overlap-time evaluation for a concrete timetable.
//!
//! The overlap between an event's effective accelerating and braking blocks
//! has a closed form as a sum of two pointwise minima; it is positive on
//! intersection, zero at touch, and minus the gap when the blocks are apart.
//! This is the same expression the hypograph rows linearize, evaluated here
//! directly so solutions can be checked independently of the LP.

use crate::fitting::FitBundle;
use crate::model::{Instance, Timetable};
use crate::pairing::SyncEvent;
use crate::scalar::Scalar;

use super::build::BuildError;

/// Absolute-time effective blocks of an event: `(accel, brake)`, each as
/// `(start, end)` seconds. Block boundaries come from the phase fits
/// evaluated at the realized trip times.
pub fn phase_blocks<S: Scalar>(
    instance: &Instance,
    tt: &Timetable,
    fits: &FitBundle<S>,
    event: &SyncEvent,
) -> Result<((S, S), (S, S)), BuildError> {
    let (accel_train, accel_platform) = event.accel_side();
    let (accel_track, accel_trip) = tt
        .departure_trip(instance, accel_train, accel_platform)
        .ok_or_else(|| BuildError::MissingEvent {
            key: format!(
                "departure trip of {} at {}",
                instance.train_id(accel_train),
                instance.network.platform_id(accel_platform)
            ),
        })?;
    let accel_fits = fits.phase.get(&(accel_train, accel_track)).ok_or_else(|| {
        BuildError::MissingFit {
            key: format!(
                "phase({},#{})",
                instance.train_id(accel_train),
                accel_track.get()
            ),
        }
    })?;
    let departure: S = tt
        .departure(accel_train, accel_platform)
        .expect("departure_trip checked it")
        .as_scalar();
    let trip_a: S = accel_trip.as_scalar();
    let accel_block = (
        departure + accel_fits.accel_start.eval(trip_a),
        departure + accel_fits.accel_end.eval(trip_a),
    );

    let (brake_train, brake_platform) = event.brake_side();
    let (brake_track, brake_trip) = tt
        .arrival_trip(instance, brake_train, brake_platform)
        .ok_or_else(|| BuildError::MissingEvent {
            key: format!(
                "arrival trip of {} at {}",
                instance.train_id(brake_train),
                instance.network.platform_id(brake_platform)
            ),
        })?;
    let brake_fits = fits.phase.get(&(brake_train, brake_track)).ok_or_else(|| {
        BuildError::MissingFit {
            key: format!(
                "phase({},#{})",
                instance.train_id(brake_train),
                brake_track.get()
            ),
        }
    })?;
    let arrival: S = tt
        .arrival(brake_train, brake_platform)
        .expect("arrival_trip checked it")
        .as_scalar();
    let trip_b: S = brake_trip.as_scalar();
    let brake_block = (
        arrival - brake_fits.brake_lead.eval(trip_b),
        arrival - brake_fits.brake_lag.eval(trip_b),
    );

    Ok((accel_block, brake_block))
}

/// Signed overlap time of an event under a timetable:
/// `min(brake end, accel end) + min(-accel start, -brake start)`.
pub fn evaluate_sigma<S: Scalar>(
    instance: &Instance,
    tt: &Timetable,
    fits: &FitBundle<S>,
    event: &SyncEvent,
) -> Result<S, BuildError> {
    let ((accel_start, accel_end), (brake_start, brake_end)) =
        phase_blocks(instance, tt, fits, event)?;
    Ok(brake_end.min(accel_end) + (-accel_start).min(-brake_start))
}
