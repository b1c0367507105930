//! Tabular (CSV) formats: timetables, oracle sample tables, fit files, and
//! event lists.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::fitting::{AffineFit, FitBundle, PhaseFits, SampleSet};
use crate::kinematics::{FwhmRect, TransferSample, TripSample};
use crate::model::{Instance, PlatformIdx, Timetable, TrackIdx, TrainIdx};
use crate::pairing::{Direction, SyncEvent, SyncEvents};
use crate::time::Micros;
use crate::Real;

use super::IoError;

fn platform_of(instance: &Instance, id: &str) -> Result<PlatformIdx, IoError> {
    instance
        .network
        .platforms
        .iter()
        .position(|p| p.id == id)
        .map(|i| PlatformIdx(i as u32))
        .ok_or_else(|| IoError::UnknownId {
            kind: "platform",
            id: id.to_string(),
        })
}

fn train_of(instance: &Instance, id: &str) -> Result<TrainIdx, IoError> {
    instance
        .trains
        .iter()
        .position(|t| t.id == id)
        .map(|i| TrainIdx(i as u32))
        .ok_or_else(|| IoError::UnknownId {
            kind: "train",
            id: id.to_string(),
        })
}

fn track_label(instance: &Instance, track: TrackIdx) -> String {
    let t = instance.network.track(track);
    format!(
        "{}->{}",
        instance.network.platform_id(t.from),
        instance.network.platform_id(t.to)
    )
}

fn track_of(instance: &Instance, label: &str) -> Result<TrackIdx, IoError> {
    let (from, to) = label.split_once("->").ok_or_else(|| IoError::Malformed {
        kind: "track",
        msg: format!("expected from->to, got {label:?}"),
    })?;
    let key = (platform_of(instance, from)?, platform_of(instance, to)?);
    instance
        .network
        .tracks
        .iter()
        .position(|t| (t.from, t.to) == key)
        .map(|i| TrackIdx(i as u32))
        .ok_or_else(|| IoError::UnknownId {
            kind: "track",
            id: label.to_string(),
        })
}

fn direction_label(d: Direction) -> &'static str {
    match d {
        Direction::Right => "right",
        Direction::Left => "left",
    }
}

fn direction_of(label: &str) -> Result<Direction, IoError> {
    match label {
        "right" => Ok(Direction::Right),
        "left" => Ok(Direction::Left),
        other => Err(IoError::Malformed {
            kind: "direction",
            msg: format!("{other:?}"),
        }),
    }
}

// ---------------------------------------------------------------- timetable

#[derive(Serialize, Deserialize)]
struct TimetableRow {
    train_id: String,
    platform_id: String,
    arrival_s: f64,
    departure_s: f64,
}

/// One record per (train, platform), sorted by train then path order.
pub fn write_timetable(path: &Path, instance: &Instance, tt: &Timetable) -> Result<(), IoError> {
    let mut w = csv::Writer::from_path(path)?;
    for (ti, train) in instance.trains.iter().enumerate() {
        let t = TrainIdx(ti as u32);
        for &p in &train.path_platforms {
            let (Some(arr), Some(dep)) = (tt.arrival(t, p), tt.departure(t, p)) else {
                continue;
            };
            w.serialize(TimetableRow {
                train_id: train.id.clone(),
                platform_id: instance.network.platform_id(p).to_string(),
                arrival_s: arr.as_secs_f64(),
                departure_s: dep.as_secs_f64(),
            })?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_timetable(path: &Path, instance: &Instance) -> Result<Timetable, IoError> {
    let mut tt = Timetable::new();
    let mut r = csv::Reader::from_path(path)?;
    for row in r.deserialize::<TimetableRow>() {
        let row = row?;
        let t = train_of(instance, &row.train_id)?;
        let p = platform_of(instance, &row.platform_id)?;
        tt.set_arrival(t, p, Micros::from_secs_f64(row.arrival_s));
        tt.set_departure(t, p, Micros::from_secs_f64(row.departure_s));
    }
    Ok(tt)
}

// ------------------------------------------------------------------- events

#[derive(Serialize, Deserialize)]
struct EventRow {
    i: String,
    j: String,
    train: String,
    partner: String,
    direction: String,
}

pub fn write_events(path: &Path, instance: &Instance, events: &SyncEvents) -> Result<(), IoError> {
    let mut w = csv::Writer::from_path(path)?;
    for event in events.iter() {
        w.serialize(EventRow {
            i: instance.network.platform_id(event.i).to_string(),
            j: instance.network.platform_id(event.j).to_string(),
            train: instance.train_id(event.train).to_string(),
            partner: instance.train_id(event.partner).to_string(),
            direction: direction_label(event.direction).to_string(),
        })?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_events(path: &Path, instance: &Instance) -> Result<SyncEvents, IoError> {
    let mut events = SyncEvents::default();
    let mut r = csv::Reader::from_path(path)?;
    for row in r.deserialize::<EventRow>() {
        let row = row?;
        let event = SyncEvent {
            i: platform_of(instance, &row.i)?,
            j: platform_of(instance, &row.j)?,
            train: train_of(instance, &row.train)?,
            partner: train_of(instance, &row.partner)?,
            direction: direction_of(&row.direction)?,
        };
        match event.direction {
            Direction::Right => events.right.push(event),
            Direction::Left => events.left.push(event),
        }
    }
    Ok(events)
}

// ------------------------------------------------------------------ samples

#[derive(Serialize, Deserialize)]
struct TrackSampleRow {
    train_id: String,
    track: String,
    trip_time_s: f64,
    consumed_kwh: f64,
    hold_kwh: f64,
    regen_kwh: f64,
    accel_start_s: f64,
    accel_end_s: f64,
    accel_peak_w: f64,
    brake_lead_s: f64,
    brake_lag_s: f64,
    brake_peak_w: f64,
}

#[derive(Serialize, Deserialize)]
struct CrossoverSampleRow {
    crossover: u32,
    pair: u32,
    trip_time_s: f64,
    consumed_kwh: f64,
}

#[derive(Serialize, Deserialize)]
struct RegenSampleRow {
    i: String,
    j: String,
    train: String,
    partner: String,
    direction: String,
    overlap_s: f64,
    transferred_kwh: f64,
}

pub const TRACK_SAMPLES_FILE: &str = "track_samples.csv";
pub const CROSSOVER_SAMPLES_FILE: &str = "crossover_samples.csv";
pub const REGEN_SAMPLES_FILE: &str = "regen_samples.csv";

/// Writes the three sample tables into `dir`.
pub fn write_samples(dir: &Path, instance: &Instance, samples: &SampleSet<Real>) -> Result<(), IoError> {
    let mut w = csv::Writer::from_path(dir.join(TRACK_SAMPLES_FILE))?;
    for (&(t, tr), sweep) in &samples.track_sweeps {
        for s in sweep {
            w.serialize(TrackSampleRow {
                train_id: instance.train_id(t).to_string(),
                track: track_label(instance, tr),
                trip_time_s: s.trip_time_s,
                consumed_kwh: s.consumed_kwh,
                hold_kwh: s.hold_kwh,
                regen_kwh: s.regen_kwh,
                accel_start_s: s.accel_rect.start_offset_s,
                accel_end_s: s.accel_rect.end_offset_s,
                accel_peak_w: s.accel_rect.height_w,
                brake_lead_s: -s.brake_rect.start_offset_s,
                brake_lag_s: -s.brake_rect.end_offset_s,
                brake_peak_w: s.brake_rect.height_w,
            })?;
        }
    }
    w.flush()?;

    let mut w = csv::Writer::from_path(dir.join(CROSSOVER_SAMPLES_FILE))?;
    for (&(ci, pi), sweep) in &samples.crossover_sweeps {
        for &(trip, kwh) in sweep {
            w.serialize(CrossoverSampleRow {
                crossover: ci,
                pair: pi,
                trip_time_s: trip,
                consumed_kwh: kwh,
            })?;
        }
    }
    w.flush()?;

    let mut w = csv::Writer::from_path(dir.join(REGEN_SAMPLES_FILE))?;
    for (event, sweep) in &samples.event_sweeps {
        for s in sweep {
            w.serialize(RegenSampleRow {
                i: instance.network.platform_id(event.i).to_string(),
                j: instance.network.platform_id(event.j).to_string(),
                train: instance.train_id(event.train).to_string(),
                partner: instance.train_id(event.partner).to_string(),
                direction: direction_label(event.direction).to_string(),
                overlap_s: s.overlap_s,
                transferred_kwh: s.transferred_kwh,
            })?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Reads the sample tables back from `dir`.
pub fn read_samples(dir: &Path, instance: &Instance) -> Result<SampleSet<Real>, IoError> {
    let mut samples = SampleSet::default();

    let mut r = csv::Reader::from_path(dir.join(TRACK_SAMPLES_FILE))?;
    for row in r.deserialize::<TrackSampleRow>() {
        let row = row?;
        let key = (train_of(instance, &row.train_id)?, track_of(instance, &row.track)?);
        samples
            .track_sweeps
            .entry(key)
            .or_default()
            .push(TripSample {
                trip_time_s: row.trip_time_s,
                consumed_kwh: row.consumed_kwh,
                hold_kwh: row.hold_kwh,
                regen_kwh: row.regen_kwh,
                accel_rect: FwhmRect {
                    start_offset_s: row.accel_start_s,
                    end_offset_s: row.accel_end_s,
                    height_w: row.accel_peak_w,
                },
                brake_rect: FwhmRect {
                    start_offset_s: -row.brake_lead_s,
                    end_offset_s: -row.brake_lag_s,
                    height_w: row.brake_peak_w,
                },
            });
    }

    let mut r = csv::Reader::from_path(dir.join(CROSSOVER_SAMPLES_FILE))?;
    for row in r.deserialize::<CrossoverSampleRow>() {
        let row = row?;
        samples
            .crossover_sweeps
            .entry((row.crossover, row.pair))
            .or_default()
            .push((row.trip_time_s, row.consumed_kwh));
    }

    let mut r = csv::Reader::from_path(dir.join(REGEN_SAMPLES_FILE))?;
    for row in r.deserialize::<RegenSampleRow>() {
        let row = row?;
        let event = SyncEvent {
            i: platform_of(instance, &row.i)?,
            j: platform_of(instance, &row.j)?,
            train: train_of(instance, &row.train)?,
            partner: train_of(instance, &row.partner)?,
            direction: direction_of(&row.direction)?,
        };
        samples
            .event_sweeps
            .entry(event)
            .or_default()
            .push(TransferSample {
                overlap_s: row.overlap_s,
                transferred_kwh: row.transferred_kwh,
            });
    }
    Ok(samples)
}

// --------------------------------------------------------------------- fits

#[derive(Serialize, Deserialize)]
struct FitRow {
    key: String,
    slope: f64,
    intercept: f64,
    residual_rms: f64,
    n_samples: usize,
}

fn fit_row(key: String, fit: &AffineFit<Real>) -> FitRow {
    FitRow {
        key,
        slope: fit.slope,
        intercept: fit.intercept,
        residual_rms: fit.residual_rms,
        n_samples: fit.n_samples,
    }
}

/// One record per surrogate: key, slope, intercept, residual RMS, samples.
pub fn write_fits(path: &Path, instance: &Instance, fits: &FitBundle<Real>) -> Result<(), IoError> {
    let mut w = csv::Writer::from_path(path)?;
    for (&(t, tr), fit) in &fits.consumption_track {
        w.serialize(fit_row(
            format!("con|{}|{}", instance.train_id(t), track_label(instance, tr)),
            fit,
        ))?;
    }
    for (&(ci, pi), fit) in &fits.consumption_crossover {
        w.serialize(fit_row(format!("cross|{ci}|{pi}"), fit))?;
    }
    for (&(t, tr), phase) in &fits.phase {
        let base = format!("{}|{}", instance.train_id(t), track_label(instance, tr));
        w.serialize(fit_row(format!("phase_accel_start|{base}"), &phase.accel_start))?;
        w.serialize(fit_row(format!("phase_accel_end|{base}"), &phase.accel_end))?;
        w.serialize(fit_row(format!("phase_brake_lead|{base}"), &phase.brake_lead))?;
        w.serialize(fit_row(format!("phase_brake_lag|{base}"), &phase.brake_lag))?;
    }
    for (event, fit) in &fits.regen {
        w.serialize(fit_row(
            format!(
                "regen|{}|{}|{}|{}|{}",
                instance.network.platform_id(event.i),
                instance.network.platform_id(event.j),
                instance.train_id(event.train),
                instance.train_id(event.partner),
                direction_label(event.direction)
            ),
            fit,
        ))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_fits(path: &Path, instance: &Instance) -> Result<FitBundle<Real>, IoError> {
    let mut bundle = FitBundle::default();
    let mut phase_parts: BTreeMap<(TrainIdx, TrackIdx), BTreeMap<String, AffineFit<Real>>> =
        BTreeMap::new();
    let mut r = csv::Reader::from_path(path)?;
    for row in r.deserialize::<FitRow>() {
        let row = row?;
        let fit = AffineFit {
            slope: row.slope,
            intercept: row.intercept,
            residual_rms: row.residual_rms,
            n_samples: row.n_samples,
        };
        let parts: Vec<&str> = row.key.split('|').collect();
        match parts.as_slice() {
            ["con", train, track] => {
                bundle.consumption_track.insert(
                    (train_of(instance, train)?, track_of(instance, track)?),
                    fit,
                );
            }
            ["cross", ci, pi] => {
                let ci: u32 = ci.parse().map_err(|_| IoError::Malformed {
                    kind: "fit key",
                    msg: row.key.clone(),
                })?;
                let pi: u32 = pi.parse().map_err(|_| IoError::Malformed {
                    kind: "fit key",
                    msg: row.key.clone(),
                })?;
                bundle.consumption_crossover.insert((ci, pi), fit);
            }
            [kind, train, track] if kind.starts_with("phase_") => {
                let key = (train_of(instance, train)?, track_of(instance, track)?);
                phase_parts
                    .entry(key)
                    .or_default()
                    .insert(kind.to_string(), fit);
            }
            ["regen", i, j, train, partner, direction] => {
                let event = SyncEvent {
                    i: platform_of(instance, i)?,
                    j: platform_of(instance, j)?,
                    train: train_of(instance, train)?,
                    partner: train_of(instance, partner)?,
                    direction: direction_of(direction)?,
                };
                bundle.regen.insert(event, fit);
            }
            _ => {
                return Err(IoError::Malformed {
                    kind: "fit key",
                    msg: row.key,
                })
            }
        }
    }
    for (key, mut parts) in phase_parts {
        let mut take = |name: &str| {
            parts.remove(name).ok_or_else(|| IoError::Malformed {
                kind: "fit file",
                msg: format!("incomplete phase fits for {key:?}: missing {name}"),
            })
        };
        bundle.phase.insert(
            key,
            PhaseFits {
                accel_start: take("phase_accel_start")?,
                accel_end: take("phase_accel_end")?,
                brake_lead: take("phase_brake_lead")?,
                brake_lag: take("phase_brake_lag")?,
            },
        );
    }
    Ok(bundle)
}
