//! Instance-wide fit orchestration: oracle sample generation and the bundle
//! of every affine surrogate the LP consumes.

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::kinematics::{
    build_speed_profile_with, energy_vs_triptime_samples, power_profile, sweep_transfer_samples,
    FwhmRect, KinematicsError, PowerSegment, ProfileOptions, TransferSample, TripSample,
};
use crate::model::{Instance, Timetable, Track, TrackIdx, TrainIdx};
use crate::pairing::{SyncEvent, SyncEvents};
use crate::scalar::Scalar;
use crate::time::TimeWindow;

use super::affine::{fit_affine, fit_affine_nonneg, AffineFit, FitError};

#[derive(Debug, Error, PartialEq)]
pub enum SampleError {
    #[error("EMPTY_ROBUST_WINDOW: {key}")]
    EmptyWindow { key: String },
    #[error("MISSING_EVENT: baseline timetable lacks {key}")]
    MissingBaseline { key: String },
    #[error(transparent)]
    Kinematics(#[from] KinematicsError),
}

/// Raw oracle observations, keyed the way the fits consume them.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleSet<S> {
    /// Trip-time sweep per (train, track).
    pub track_sweeps: BTreeMap<(TrainIdx, TrackIdx), Vec<TripSample<S>>>,
    /// (trip time, consumed kWh) sweep per (crossover index, pair index).
    pub crossover_sweeps: BTreeMap<(u32, u32), Vec<(S, S)>>,
    /// (overlap time, transferred kWh) sweep per synchronization event.
    pub event_sweeps: BTreeMap<SyncEvent, Vec<TransferSample<S>>>,
}

impl<S> Default for SampleSet<S> {
    fn default() -> Self {
        SampleSet {
            track_sweeps: BTreeMap::new(),
            crossover_sweeps: BTreeMap::new(),
            event_sweeps: BTreeMap::new(),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SampleOptions {
    /// Trip times sampled per window sweep.
    pub n_trip_samples: usize,
    /// Shifts sampled per event sweep.
    pub n_shift_samples: usize,
    pub profile: ProfileOptions,
}

impl Default for SampleOptions {
    fn default() -> Self {
        SampleOptions {
            n_trip_samples: 9,
            n_shift_samples: 17,
            profile: ProfileOptions::default(),
        }
    }
}

fn sweep_points(window: TimeWindow, n: usize) -> Vec<f64> {
    let lb = window.lb.as_secs_f64();
    let ub = window.ub.as_secs_f64();
    let n = n.max(2);
    (0..n)
        .map(|i| lb + (ub - lb) * i as f64 / (n - 1) as f64)
        .collect()
}

/// Runs the kinematics oracle over every surface the fits need: trip-time
/// sweeps per (train, track) and crossover pair, and overlap-transfer sweeps
/// per synchronization event at the baseline's realized trip times.
///
/// Identical rolling stock makes many sweeps coincide, so results are cached
/// by physical key (track, window, trip time) and cloned per logical key.
pub fn generate_sample_set<S: Scalar>(
    instance: &Instance,
    baseline: &Timetable,
    events: &SyncEvents,
    options: &SampleOptions,
) -> Result<SampleSet<S>, SampleError> {
    let mut out = SampleSet::default();
    let physics = &instance.physics;

    // Per-(train, track) sweeps, deduplicated across identical windows.
    let mut sweep_cache: HashMap<(u32, i64, i64), Vec<TripSample<S>>> = HashMap::new();
    for (ti, train) in instance.trains.iter().enumerate() {
        let t = TrainIdx(ti as u32);
        for &track_idx in &train.path_tracks {
            let key = (t, track_idx);
            let window = instance
                .trip_windows
                .get(&key)
                .and_then(|w| w.robustified())
                .ok_or_else(|| SampleError::EmptyWindow {
                    key: format!("trip({},#{})", train.id, track_idx.get()),
                })?;
            let cache_key = (track_idx.0, window.lb.0, window.ub.0);
            let sweep = match sweep_cache.get(&cache_key) {
                Some(s) => s.clone(),
                None => {
                    let track = instance.network.track(track_idx);
                    let times = sweep_points(window, options.n_trip_samples);
                    let s = energy_vs_triptime_samples(track, physics, &times, &options.profile)?;
                    sweep_cache.insert(cache_key, s.clone());
                    s
                }
            };
            out.track_sweeps.insert(key, sweep);
        }
    }

    // Crossover consumption sweeps on the synthetic crossover segment.
    let mut cross_cache: HashMap<(i64, i64), Vec<(S, S)>> = HashMap::new();
    for (ci, crossover) in instance.network.crossovers.iter().enumerate() {
        let segment = Track {
            from: crossover.from,
            to: crossover.to,
            length: instance.crossover_length,
            grade: 0.0,
        };
        for (pi, pair) in crossover.turnaround_pairs.iter().enumerate() {
            let window = pair.window.robustified().ok_or_else(|| SampleError::EmptyWindow {
                key: format!("cross({},{})", ci, pi),
            })?;
            let cache_key = (window.lb.0, window.ub.0);
            let sweep = match cross_cache.get(&cache_key) {
                Some(s) => s.clone(),
                None => {
                    let times = sweep_points(window, options.n_trip_samples);
                    let samples =
                        energy_vs_triptime_samples::<S>(&segment, physics, &times, &options.profile)?;
                    let s: Vec<(S, S)> = samples
                        .iter()
                        .map(|ts| (ts.trip_time_s, ts.consumed_kwh))
                        .collect();
                    cross_cache.insert(cache_key, s.clone());
                    s
                }
            };
            out.crossover_sweeps.insert((ci as u32, pi as u32), sweep);
        }
    }

    // Event transfer sweeps at baseline trip times.
    type Pulse<S> = (PowerSegment<S>, PowerSegment<S>, FwhmRect<S>, FwhmRect<S>);
    let mut pulse_cache: HashMap<(u32, i64), Pulse<S>> = HashMap::new();
    let mut event_cache: HashMap<(u32, u32, i64, i64), Vec<TransferSample<S>>> = HashMap::new();
    let radius_s = instance.closeness_radius.as_secs_f64();

    let mut pulse_for = |track_idx: TrackIdx, trip_us: i64| -> Result<Pulse<S>, SampleError> {
        if let Some(p) = pulse_cache.get(&(track_idx.0, trip_us)) {
            return Ok(p.clone());
        }
        let track = instance.network.track(track_idx);
        let trip_s = trip_us as f64 / 1e6;
        let sp = build_speed_profile_with::<S>(track, trip_s, physics, &options.profile)?;
        let pp = power_profile(&sp, track, physics);
        let pulse = (
            pp.accel_segment(),
            pp.brake_segment(),
            pp.accel_fwhm(),
            pp.brake_fwhm(),
        );
        pulse_cache.insert((track_idx.0, trip_us), pulse.clone());
        Ok(pulse)
    };

    for event in events.iter() {
        let (accel_train, accel_platform) = event.accel_side();
        let (brake_train, brake_platform) = event.brake_side();
        let accel_info = baseline
            .departure_trip(instance, accel_train, accel_platform)
            .ok_or_else(|| SampleError::MissingBaseline {
                key: format!(
                    "departure trip of {} at {}",
                    instance.train_id(accel_train),
                    instance.network.platform_id(accel_platform)
                ),
            })?;
        let brake_info = baseline
            .arrival_trip(instance, brake_train, brake_platform)
            .ok_or_else(|| SampleError::MissingBaseline {
                key: format!(
                    "arrival trip of {} at {}",
                    instance.train_id(brake_train),
                    instance.network.platform_id(brake_platform)
                ),
            })?;

        let cache_key = (
            accel_info.0 .0,
            brake_info.0 .0,
            accel_info.1 .0,
            brake_info.1 .0,
        );
        let sweep = match event_cache.get(&cache_key) {
            Some(s) => s.clone(),
            None => {
                let (accel_seg, _, accel_rect, _) = pulse_for(accel_info.0, accel_info.1 .0)?;
                let (_, brake_seg, _, brake_rect) = pulse_for(brake_info.0, brake_info.1 .0)?;
                let lo = accel_rect.start_offset_s.to_f64_lossy()
                    - brake_rect.end_offset_s.to_f64_lossy()
                    - radius_s;
                let hi = accel_rect.end_offset_s.to_f64_lossy()
                    - brake_rect.start_offset_s.to_f64_lossy()
                    + radius_s;
                let n = options.n_shift_samples.max(2);
                let shifts: Vec<S> = (0..n)
                    .map(|k| S::from_f64_lossy(lo + (hi - lo) * k as f64 / (n - 1) as f64))
                    .collect();
                let s = sweep_transfer_samples(&brake_seg, &accel_seg, &accel_rect, &brake_rect, &shifts);
                event_cache.insert(cache_key, s.clone());
                s
            }
        };
        out.event_sweeps.insert(*event, sweep);
    }

    Ok(out)
}

/// The four phase-boundary surrogates for one (train, track): evaluated at a
/// trip time they place the effective blocks as
/// `[departure + accel_start, departure + accel_end]` and
/// `[arrival - brake_lead, arrival - brake_lag]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseFits<S> {
    pub accel_start: AffineFit<S>,
    pub accel_end: AffineFit<S>,
    pub brake_lead: AffineFit<S>,
    pub brake_lag: AffineFit<S>,
}

/// Every affine surrogate of an instance.
#[derive(Clone, Debug, PartialEq)]
pub struct FitBundle<S> {
    pub consumption_track: BTreeMap<(TrainIdx, TrackIdx), AffineFit<S>>,
    pub consumption_crossover: BTreeMap<(u32, u32), AffineFit<S>>,
    pub regen: BTreeMap<SyncEvent, AffineFit<S>>,
    pub phase: BTreeMap<(TrainIdx, TrackIdx), PhaseFits<S>>,
}

impl<S> Default for FitBundle<S> {
    fn default() -> Self {
        FitBundle {
            consumption_track: BTreeMap::new(),
            consumption_crossover: BTreeMap::new(),
            regen: BTreeMap::new(),
            phase: BTreeMap::new(),
        }
    }
}

/// Fits every surrogate from the oracle samples: unconstrained least squares
/// for consumption and phase boundaries, nonnegative least squares for the
/// regenerative transfers.
pub fn fit_instance<S: Scalar>(
    instance: &Instance,
    samples: &SampleSet<S>,
) -> Result<FitBundle<S>, FitError> {
    let mut bundle = FitBundle::default();

    for (ti, train) in instance.trains.iter().enumerate() {
        let t = TrainIdx(ti as u32);
        for &track_idx in &train.path_tracks {
            let key = (t, track_idx);
            let sweep = samples.track_sweeps.get(&key).ok_or_else(|| {
                FitError::MissingSamples {
                    key: format!("track sweep ({},#{})", train.id, track_idx.get()),
                }
            })?;
            let consumption: Vec<(S, S)> = sweep
                .iter()
                .map(|s| (s.trip_time_s, s.consumed_kwh))
                .collect();
            bundle
                .consumption_track
                .insert(key, fit_affine(&consumption)?);
            let col = |f: fn(&TripSample<S>) -> S| -> Vec<(S, S)> {
                sweep.iter().map(|s| (s.trip_time_s, f(s))).collect()
            };
            bundle.phase.insert(
                key,
                PhaseFits {
                    accel_start: fit_affine(&col(|s| s.accel_rect.start_offset_s))?,
                    accel_end: fit_affine(&col(|s| s.accel_rect.end_offset_s))?,
                    brake_lead: fit_affine(&col(|s| -s.brake_rect.start_offset_s))?,
                    brake_lag: fit_affine(&col(|s| -s.brake_rect.end_offset_s))?,
                },
            );
        }
    }

    for (ci, crossover) in instance.network.crossovers.iter().enumerate() {
        for (pi, _) in crossover.turnaround_pairs.iter().enumerate() {
            let key = (ci as u32, pi as u32);
            let sweep = samples.crossover_sweeps.get(&key).ok_or_else(|| {
                FitError::MissingSamples {
                    key: format!("crossover sweep ({ci},{pi})"),
                }
            })?;
            bundle
                .consumption_crossover
                .insert(key, fit_affine(sweep)?);
        }
    }

    for (event, sweep) in &samples.event_sweeps {
        let data: Vec<(S, S)> = sweep
            .iter()
            .map(|s| (s.overlap_s, s.transferred_kwh))
            .collect();
        bundle.regen.insert(*event, fit_affine_nonneg(&data)?);
    }

    Ok(bundle)
}
