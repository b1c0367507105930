//! Effective-energy prediction, baseline comparison, and cross-validation
//! against the kinematics oracle.

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::fitting::{FitBundle, SampleError};
use crate::kinematics::{
    build_speed_profile_with, exact_overlap_regen, joules_to_kwh, power_profile, PowerSegment,
    ProfileOptions,
};
use crate::lp::{evaluate_sigma, BuildError};
use crate::model::{Instance, Timetable, Track, TrainIdx};
use crate::pairing::{SyncEvent, SyncEvents};
use crate::solver::{SolveStatus, Solution};

#[derive(Debug, Error)]
pub enum ReportError {
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error(transparent)]
    Sample(#[from] SampleError),
}

/// Predicted effective energy of one timetable under the fitted surrogates.
#[derive(Clone, Debug, PartialEq)]
pub struct EnergyReport {
    pub consumption_kwh: f64,
    pub regen_transferred_kwh: f64,
    /// `consumption - regen_transferred`.
    pub effective_kwh: f64,
    pub per_event_regen: BTreeMap<SyncEvent, f64>,
    /// Events whose affine regen term went negative and was clamped to zero.
    pub clamped_event_count: usize,
}

/// Surrogate prediction: affine consumption terms at the realized trip
/// times, plus per-event transfers `max(slope·overlap + intercept, 0)`.
pub fn predict_energy(
    instance: &Instance,
    tt: &Timetable,
    fits: &FitBundle<f64>,
    events: &SyncEvents,
) -> Result<EnergyReport, BuildError> {
    let mut consumption = 0.0f64;
    for (ti, train) in instance.trains.iter().enumerate() {
        let t = TrainIdx(ti as u32);
        for (k, &track_idx) in train.path_tracks.iter().enumerate() {
            let fit = fits
                .consumption_track
                .get(&(t, track_idx))
                .ok_or_else(|| BuildError::MissingFit {
                    key: format!("consumption({},#{})", train.id, track_idx.get()),
                })?;
            let trip = tt.trip_time(instance, t, k).ok_or_else(|| {
                BuildError::MissingEvent {
                    key: format!("trip({},#{})", train.id, track_idx.get()),
                }
            })?;
            consumption += fit.eval(trip.as_secs_f64());
        }
    }
    for (ci, crossover) in instance.network.crossovers.iter().enumerate() {
        for (pi, pair) in crossover.turnaround_pairs.iter().enumerate() {
            let fit = fits
                .consumption_crossover
                .get(&(ci as u32, pi as u32))
                .ok_or_else(|| BuildError::MissingFit {
                    key: format!("crossover({ci},{pi})"),
                })?;
            let dep = tt
                .departure(pair.from_train, crossover.from)
                .ok_or_else(|| BuildError::MissingEvent {
                    key: format!("departure({})", instance.train_id(pair.from_train)),
                })?;
            let arr = tt
                .arrival(pair.to_train, crossover.to)
                .ok_or_else(|| BuildError::MissingEvent {
                    key: format!("arrival({})", instance.train_id(pair.to_train)),
                })?;
            consumption += fit.eval((arr - dep).as_secs_f64());
        }
    }

    let mut per_event_regen = BTreeMap::new();
    let mut transferred = 0.0f64;
    let mut clamped = 0usize;
    for event in events.iter() {
        let fit = fits.regen.get(event).ok_or_else(|| BuildError::MissingFit {
            key: format!(
                "regen({},{})",
                instance.train_id(event.train),
                instance.train_id(event.partner)
            ),
        })?;
        let sigma = evaluate_sigma(instance, tt, fits, event)?;
        let affine = fit.eval(sigma);
        let value = affine.max(0.0);
        if affine < 0.0 {
            clamped += 1;
        }
        transferred += value;
        per_event_regen.insert(*event, value);
    }

    Ok(EnergyReport {
        consumption_kwh: consumption,
        regen_transferred_kwh: transferred,
        effective_kwh: consumption - transferred,
        per_event_regen,
        clamped_event_count: clamped,
    })
}

/// Solve metadata carried into reports.
#[derive(Clone, Debug, PartialEq)]
pub struct SolveSummary {
    pub status: SolveStatus,
    pub objective_kwh: f64,
    pub iterations: usize,
    pub wall_time_s: f64,
    pub primal_residual: f64,
    pub duality_gap_rel: f64,
}

impl From<&Solution> for SolveSummary {
    fn from(s: &Solution) -> Self {
        SolveSummary {
            status: s.status,
            objective_kwh: s.objective,
            iterations: s.iterations,
            wall_time_s: s.wall_time_s,
            primal_residual: s.primal_residual,
            duality_gap_rel: s.duality_gap_rel,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComparisonReport {
    pub baseline: EnergyReport,
    pub optimized: EnergyReport,
    /// `100·(baseline - optimized)/baseline` effective energy.
    pub reduction_pct: f64,
    /// Reduction recomputed by the kinematics oracle, when cross-validation
    /// ran.
    pub simulator_reduction_pct: Option<f64>,
    pub solve_stats: Option<SolveSummary>,
}

pub fn compare(
    baseline: EnergyReport,
    optimized: EnergyReport,
    solve_stats: Option<SolveSummary>,
) -> ComparisonReport {
    let reduction_pct =
        100.0 * (baseline.effective_kwh - optimized.effective_kwh) / baseline.effective_kwh;
    ComparisonReport {
        baseline,
        optimized,
        reduction_pct,
        simulator_reduction_pct: None,
        solve_stats,
    }
}

/// Oracle-side effective energy of a timetable: simulated acceleration-phase
/// consumption at the realized trip times, and per-event transfers from the
/// exact overlap of the simulated power pulses.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleEnergy {
    pub consumption_kwh: f64,
    pub regen_transferred_kwh: f64,
    pub effective_kwh: f64,
    pub per_event_regen: BTreeMap<SyncEvent, f64>,
}

pub fn oracle_energy(
    instance: &Instance,
    tt: &Timetable,
    events: &SyncEvents,
    options: &ProfileOptions,
) -> Result<OracleEnergy, SampleError> {
    let physics = &instance.physics;
    type Pulse = (PowerSegment<f64>, PowerSegment<f64>, f64);
    let mut cache: HashMap<(u32, i64), Pulse> = HashMap::new();
    let mut pulse_for = |track: &Track, track_key: u32, trip_us: i64| -> Result<Pulse, SampleError> {
        if let Some(p) = cache.get(&(track_key, trip_us)) {
            return Ok(p.clone());
        }
        let sp = build_speed_profile_with::<f64>(track, trip_us as f64 / 1e6, physics, options)?;
        let pp = power_profile(&sp, track, physics);
        let pulse = (
            pp.accel_segment(),
            pp.brake_segment(),
            joules_to_kwh(pp.accel_energy),
        );
        cache.insert((track_key, trip_us), pulse.clone());
        Ok(pulse)
    };

    let mut consumption = 0.0f64;
    for (ti, train) in instance.trains.iter().enumerate() {
        let t = TrainIdx(ti as u32);
        for (k, &track_idx) in train.path_tracks.iter().enumerate() {
            let trip = tt.trip_time(instance, t, k).ok_or_else(|| {
                SampleError::MissingBaseline {
                    key: format!("trip({},#{})", train.id, track_idx.get()),
                }
            })?;
            let track = instance.network.track(track_idx);
            consumption += pulse_for(track, track_idx.0, trip.0)?.2;
        }
    }
    for crossover in &instance.network.crossovers {
        let segment = Track {
            from: crossover.from,
            to: crossover.to,
            length: instance.crossover_length,
            grade: 0.0,
        };
        // Crossover pulses are keyed past the real track range.
        let key = u32::MAX;
        for pair in &crossover.turnaround_pairs {
            let dep = tt
                .departure(pair.from_train, crossover.from)
                .ok_or_else(|| SampleError::MissingBaseline {
                    key: format!("departure({})", instance.train_id(pair.from_train)),
                })?;
            let arr = tt
                .arrival(pair.to_train, crossover.to)
                .ok_or_else(|| SampleError::MissingBaseline {
                    key: format!("arrival({})", instance.train_id(pair.to_train)),
                })?;
            consumption += pulse_for(&segment, key, (arr - dep).0)?.2;
        }
    }

    let mut per_event_regen = BTreeMap::new();
    let mut transferred = 0.0f64;
    for event in events.iter() {
        let (accel_train, accel_platform) = event.accel_side();
        let (brake_train, brake_platform) = event.brake_side();
        let (accel_track, accel_trip) = tt
            .departure_trip(instance, accel_train, accel_platform)
            .ok_or_else(|| SampleError::MissingBaseline {
                key: format!("departure trip of {}", instance.train_id(accel_train)),
            })?;
        let (brake_track, brake_trip) = tt
            .arrival_trip(instance, brake_train, brake_platform)
            .ok_or_else(|| SampleError::MissingBaseline {
                key: format!("arrival trip of {}", instance.train_id(brake_train)),
            })?;
        let (accel_seg, _, _) = pulse_for(
            instance.network.track(accel_track),
            accel_track.0,
            accel_trip.0,
        )?;
        let (_, brake_seg, _) = pulse_for(
            instance.network.track(brake_track),
            brake_track.0,
            brake_trip.0,
        )?;
        let departure = tt
            .departure(accel_train, accel_platform)
            .expect("departure_trip checked it");
        let arrival = tt
            .arrival(brake_train, brake_platform)
            .expect("arrival_trip checked it");
        let shift = (arrival - departure).as_secs_f64();
        let kwh = exact_overlap_regen(&brake_seg, &accel_seg, shift);
        transferred += kwh;
        per_event_regen.insert(*event, kwh);
    }

    Ok(OracleEnergy {
        consumption_kwh: consumption,
        regen_transferred_kwh: transferred,
        effective_kwh: consumption - transferred,
        per_event_regen,
    })
}

/// Surrogate-vs-oracle comparison on a solved instance.
#[derive(Clone, Debug, PartialEq)]
pub struct CrossValidation {
    pub surrogate_reduction_pct: f64,
    pub oracle_reduction_pct: f64,
    /// Surrogate minus oracle transfer per event, on the optimized timetable.
    pub per_event_gap_kwh: BTreeMap<SyncEvent, f64>,
    pub oracle_baseline: OracleEnergy,
    pub oracle_optimized: OracleEnergy,
}

/// Recomputes both timetables' effective energy with the kinematics oracle
/// and reports the reduction percentages of both prediction routes.
pub fn crossvalidate(
    instance: &Instance,
    fits: &FitBundle<f64>,
    events: &SyncEvents,
    baseline_tt: &Timetable,
    optimized_tt: &Timetable,
    options: &ProfileOptions,
) -> Result<CrossValidation, ReportError> {
    let surrogate_base = predict_energy(instance, baseline_tt, fits, events)?;
    let surrogate_opt = predict_energy(instance, optimized_tt, fits, events)?;
    let oracle_base = oracle_energy(instance, baseline_tt, events, options)?;
    let oracle_opt = oracle_energy(instance, optimized_tt, events, options)?;

    let per_event_gap_kwh = surrogate_opt
        .per_event_regen
        .iter()
        .map(|(event, &sur)| {
            let ora = oracle_opt.per_event_regen.get(event).copied().unwrap_or(0.0);
            (*event, sur - ora)
        })
        .collect();

    Ok(CrossValidation {
        surrogate_reduction_pct: 100.0
            * (surrogate_base.effective_kwh - surrogate_opt.effective_kwh)
            / surrogate_base.effective_kwh,
        oracle_reduction_pct: 100.0 * (oracle_base.effective_kwh - oracle_opt.effective_kwh)
            / oracle_base.effective_kwh,
        per_event_gap_kwh,
        oracle_baseline: oracle_base,
        oracle_optimized: oracle_opt,
    })
}
