//! Structural validation of instances.
//!
//! Violations are data, not failures: `validate_instance` returns every
//! problem it finds, each with a stable machine-readable code, and an empty
//! list means the instance is sound.

use std::collections::BTreeSet;
use std::fmt;

use super::{Instance, PlatformIdx, TrainIdx};
use crate::time::UncertainWindow;

#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    DuplicatePlatform { id: String },
    DanglingPlatform { context: String },
    DanglingTrain { context: String },
    TrackSelfLoop { track: usize },
    DuplicateTrack { from: String, to: String },
    TrackLengthNotPositive { track: usize },
    GradeOutOfRange { track: usize, grade: f64, limit: f64 },
    PathTooShort { train: String },
    PathNotContiguous { train: String, position: usize },
    CrossoverSameLine { crossover: usize },
    TurnaroundMismatch { crossover: usize, detail: String },
    OmegaNotLex { first: String, second: String },
    OmegaDuplicate { first: String, second: String },
    IntervalNotOrdered { key: String },
    EmptyRobustWindow { key: String },
    WindowNegative { key: String },
    MissingWindow { key: String },
    HeadwayDirection { track: usize, train: String },
    HeadwayNotPositive { track: usize, train: String },
    HorizonTooSmall { given_s: f64, required_s: f64 },
    PhysicsRange { field: &'static str },
}

impl Violation {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            Violation::DuplicatePlatform { .. } => "DUPLICATE_PLATFORM",
            Violation::DanglingPlatform { .. } => "DANGLING_PLATFORM",
            Violation::DanglingTrain { .. } => "DANGLING_TRAIN",
            Violation::TrackSelfLoop { .. } => "TRACK_SELF_LOOP",
            Violation::DuplicateTrack { .. } => "DUPLICATE_TRACK",
            Violation::TrackLengthNotPositive { .. } => "TRACK_LENGTH_NOT_POSITIVE",
            Violation::GradeOutOfRange { .. } => "GRADE_OUT_OF_RANGE",
            Violation::PathTooShort { .. } => "PATH_TOO_SHORT",
            Violation::PathNotContiguous { .. } => "PATH_NOT_CONTIGUOUS",
            Violation::CrossoverSameLine { .. } => "CROSSOVER_SAME_LINE",
            Violation::TurnaroundMismatch { .. } => "TURNAROUND_MISMATCH",
            Violation::OmegaNotLex { .. } => "OMEGA_NOT_LEX",
            Violation::OmegaDuplicate { .. } => "OMEGA_DUPLICATE",
            Violation::IntervalNotOrdered { .. } => "INTERVAL_NOT_ORDERED",
            Violation::EmptyRobustWindow { .. } => "EMPTY_ROBUST_WINDOW",
            Violation::WindowNegative { .. } => "WINDOW_NEGATIVE",
            Violation::MissingWindow { .. } => "MISSING_WINDOW",
            Violation::HeadwayDirection { .. } => "HEADWAY_DIRECTION",
            Violation::HeadwayNotPositive { .. } => "HEADWAY_NOT_POSITIVE",
            Violation::HorizonTooSmall { .. } => "HORIZON_TOO_SMALL",
            Violation::PhysicsRange { .. } => "PHYSICS_RANGE",
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: ", self.code())?;
        match self {
            Violation::DuplicatePlatform { id } => write!(f, "platform id {id:?} repeats"),
            Violation::DanglingPlatform { context } => write!(f, "{context}"),
            Violation::DanglingTrain { context } => write!(f, "{context}"),
            Violation::TrackSelfLoop { track } => write!(f, "track #{track} loops on one platform"),
            Violation::DuplicateTrack { from, to } => write!(f, "track {from}->{to} repeats"),
            Violation::TrackLengthNotPositive { track } => write!(f, "track #{track}"),
            Violation::GradeOutOfRange { track, grade, limit } => {
                write!(f, "track #{track} grade {grade}° outside ±{limit}°")
            }
            Violation::PathTooShort { train } => write!(f, "train {train} visits < 2 platforms"),
            Violation::PathNotContiguous { train, position } => {
                write!(f, "train {train} track #{position} does not join its platforms")
            }
            Violation::CrossoverSameLine { crossover } => write!(f, "crossover #{crossover}"),
            Violation::TurnaroundMismatch { crossover, detail } => {
                write!(f, "crossover #{crossover}: {detail}")
            }
            Violation::OmegaNotLex { first, second } => {
                write!(f, "regen pair ({first}, {second}) not ordered by id")
            }
            Violation::OmegaDuplicate { first, second } => {
                write!(f, "regen pair ({first}, {second}) repeats")
            }
            Violation::IntervalNotOrdered { key } => write!(f, "{key}"),
            Violation::EmptyRobustWindow { key } => write!(f, "{key}"),
            Violation::WindowNegative { key } => write!(f, "{key}"),
            Violation::MissingWindow { key } => write!(f, "{key}"),
            Violation::HeadwayDirection { track, train } => {
                write!(f, "train {train} does not traverse track #{track}")
            }
            Violation::HeadwayNotPositive { track, train } => {
                write!(f, "track #{track}, pair starting {train}")
            }
            Violation::HorizonTooSmall { given_s, required_s } => {
                write!(f, "horizon {given_s}s below analytic bound {required_s}s")
            }
            Violation::PhysicsRange { field } => write!(f, "{field} out of range"),
        }
    }
}

/// Maximum slope magnitude accepted for track grades, degrees.
pub const GRADE_LIMIT_DEG: f64 = 2.00453;

/// Checks every structural invariant of an instance and returns all
/// violations found. An empty list means the instance is valid.
pub fn validate_instance(instance: &Instance) -> Vec<Violation> {
    let mut out = Vec::new();
    let n_platforms = instance.network.platforms.len();
    let n_trains = instance.trains.len();
    let platform_ok = |p: PlatformIdx| p.get() < n_platforms;
    let train_ok = |t: TrainIdx| t.get() < n_trains;

    let mut seen_ids = BTreeSet::new();
    for p in &instance.network.platforms {
        if !seen_ids.insert(p.id.as_str()) {
            out.push(Violation::DuplicatePlatform { id: p.id.clone() });
        }
    }

    let mut seen_tracks = BTreeSet::new();
    for (k, track) in instance.network.tracks.iter().enumerate() {
        if !platform_ok(track.from) || !platform_ok(track.to) {
            out.push(Violation::DanglingPlatform {
                context: format!("track #{k} references an unknown platform"),
            });
            continue;
        }
        if track.from == track.to {
            out.push(Violation::TrackSelfLoop { track: k });
        }
        if !seen_tracks.insert((track.from, track.to)) {
            out.push(Violation::DuplicateTrack {
                from: instance.network.platform_id(track.from).to_string(),
                to: instance.network.platform_id(track.to).to_string(),
            });
        }
        if !(track.length > 0.0) {
            out.push(Violation::TrackLengthNotPositive { track: k });
        }
        if track.grade.abs() > GRADE_LIMIT_DEG {
            out.push(Violation::GradeOutOfRange {
                track: k,
                grade: track.grade,
                limit: GRADE_LIMIT_DEG,
            });
        }
    }

    for train in &instance.trains {
        if train.path_platforms.len() < 2
            || train.path_tracks.len() + 1 != train.path_platforms.len()
        {
            out.push(Violation::PathTooShort {
                train: train.id.clone(),
            });
            continue;
        }
        if train.path_platforms.iter().any(|&p| !platform_ok(p))
            || train
                .path_tracks
                .iter()
                .any(|&tr| tr.get() >= instance.network.tracks.len())
        {
            out.push(Violation::DanglingPlatform {
                context: format!("train {} path references an unknown element", train.id),
            });
            continue;
        }
        for (k, &track_idx) in train.path_tracks.iter().enumerate() {
            let track = instance.network.track(track_idx);
            if track.from != train.path_platforms[k] || track.to != train.path_platforms[k + 1] {
                out.push(Violation::PathNotContiguous {
                    train: train.id.clone(),
                    position: k,
                });
            }
        }
    }

    for (k, crossover) in instance.network.crossovers.iter().enumerate() {
        if !platform_ok(crossover.from) || !platform_ok(crossover.to) {
            out.push(Violation::DanglingPlatform {
                context: format!("crossover #{k} references an unknown platform"),
            });
            continue;
        }
        let from_line = &instance.network.platform(crossover.from).line_id;
        let to_line = &instance.network.platform(crossover.to).line_id;
        if from_line == to_line {
            out.push(Violation::CrossoverSameLine { crossover: k });
        }
        for pair in &crossover.turnaround_pairs {
            if !train_ok(pair.from_train) || !train_ok(pair.to_train) {
                out.push(Violation::DanglingTrain {
                    context: format!("crossover #{k} turnaround references an unknown train"),
                });
                continue;
            }
            if pair.from_train == pair.to_train {
                out.push(Violation::TurnaroundMismatch {
                    crossover: k,
                    detail: "a train cannot turn around into itself".into(),
                });
            }
            if instance.train(pair.from_train).last_platform() != crossover.from {
                out.push(Violation::TurnaroundMismatch {
                    crossover: k,
                    detail: format!(
                        "train {} does not end at the crossover origin",
                        instance.train_id(pair.from_train)
                    ),
                });
            }
            if instance.train(pair.to_train).first_platform() != crossover.to {
                out.push(Violation::TurnaroundMismatch {
                    crossover: k,
                    detail: format!(
                        "train {} does not start at the crossover destination",
                        instance.train_id(pair.to_train)
                    ),
                });
            }
            check_window(
                &pair.window,
                &format!(
                    "crossover window #{k} ({}, {})",
                    instance.train_id(pair.from_train),
                    instance.train_id(pair.to_train)
                ),
                true,
                &mut out,
            );
        }
    }

    let mut seen_pairs = BTreeSet::new();
    for &(i, j) in &instance.regen_pairs {
        if !platform_ok(i) || !platform_ok(j) {
            out.push(Violation::DanglingPlatform {
                context: "regen pair references an unknown platform".into(),
            });
            continue;
        }
        let (id_i, id_j) = (
            instance.network.platform_id(i),
            instance.network.platform_id(j),
        );
        if id_i >= id_j {
            out.push(Violation::OmegaNotLex {
                first: id_i.to_string(),
                second: id_j.to_string(),
            });
        }
        if !seen_pairs.insert((i, j)) {
            out.push(Violation::OmegaDuplicate {
                first: id_i.to_string(),
                second: id_j.to_string(),
            });
        }
    }

    for (ti, train) in instance.trains.iter().enumerate() {
        let t = TrainIdx(ti as u32);
        if train.path_platforms.len() < 2 {
            continue;
        }
        for &p in &train.path_platforms {
            match instance.dwell_windows.get(&(t, p)) {
                Some(w) => check_window(
                    w,
                    &format!(
                        "dwell window ({}, {})",
                        train.id,
                        instance.network.platform_id(p)
                    ),
                    true,
                    &mut out,
                ),
                None => out.push(Violation::MissingWindow {
                    key: format!(
                        "dwell window ({}, {})",
                        train.id,
                        instance.network.platform_id(p)
                    ),
                }),
            }
        }
        for &tr in &train.path_tracks {
            match instance.trip_windows.get(&(t, tr)) {
                Some(w) => check_window(
                    w,
                    &format!("trip window ({}, track #{})", train.id, tr.get()),
                    true,
                    &mut out,
                ),
                None => out.push(Violation::MissingWindow {
                    key: format!("trip window ({}, track #{})", train.id, tr.get()),
                }),
            }
        }
        check_window(
            &train.travel_window,
            &format!("travel window ({})", train.id),
            true,
            &mut out,
        );
    }

    for conn in &instance.connections {
        if !train_ok(conn.arriving) || !train_ok(conn.departing) {
            out.push(Violation::DanglingTrain {
                context: "connection references an unknown train".into(),
            });
            continue;
        }
        check_window(
            &conn.window,
            &format!(
                "connection window ({}, {})",
                instance.train_id(conn.arriving),
                instance.train_id(conn.departing)
            ),
            false,
            &mut out,
        );
    }

    for hw in &instance.headways {
        if hw.track.get() >= instance.network.tracks.len() {
            out.push(Violation::DanglingPlatform {
                context: "headway references an unknown track".into(),
            });
            continue;
        }
        if !train_ok(hw.first) || !train_ok(hw.second) {
            out.push(Violation::DanglingTrain {
                context: "headway references an unknown train".into(),
            });
            continue;
        }
        for &t in &[hw.first, hw.second] {
            if !instance.train(t).path_tracks.contains(&hw.track) {
                out.push(Violation::HeadwayDirection {
                    track: hw.track.get(),
                    train: instance.train_id(t).to_string(),
                });
            }
        }
        if hw.headway_from.0 <= 0 || hw.headway_to.0 <= 0 {
            out.push(Violation::HeadwayNotPositive {
                track: hw.track.get(),
                train: instance.train_id(hw.first).to_string(),
            });
        }
    }

    let ph = &instance.physics;
    let physics_checks: [(&'static str, bool); 8] = [
        ("accel_max", ph.accel_max > 0.0),
        ("decel_max", ph.decel_max < 0.0),
        (
            "eta_elec_to_kin",
            ph.eta_elec_to_kin > 0.0 && ph.eta_elec_to_kin <= 1.0,
        ),
        (
            "eta_kin_to_regen",
            ph.eta_kin_to_regen > 0.0 && ph.eta_kin_to_regen <= 1.0,
        ),
        (
            "transmission_loss",
            (0.0..1.0).contains(&ph.transmission_loss),
        ),
        ("train_mass", ph.train_mass > 0.0),
        (
            "davis_coeffs",
            ph.davis_coeffs.0 >= 0.0 && ph.davis_coeffs.1 >= 0.0 && ph.davis_coeffs.2 >= 0.0,
        ),
        ("speed_limit", ph.speed_limit > 0.0),
    ];
    for (field, ok) in physics_checks {
        if !ok {
            out.push(Violation::PhysicsRange { field });
        }
    }

    if instance.horizon.0 <= 0 {
        out.push(Violation::HorizonTooSmall {
            given_s: instance.horizon.as_secs_f64(),
            required_s: 0.0,
        });
    } else if let Some(required) = instance.computed_horizon() {
        if instance.horizon < required {
            out.push(Violation::HorizonTooSmall {
                given_s: instance.horizon.as_secs_f64(),
                required_s: required.as_secs_f64(),
            });
        }
    }

    out
}

fn check_window(w: &UncertainWindow, key: &str, nonneg: bool, out: &mut Vec<Violation>) {
    if !w.intervals_well_formed() {
        out.push(Violation::IntervalNotOrdered { key: key.to_string() });
        return;
    }
    if w.robustified().is_none() {
        out.push(Violation::EmptyRobustWindow { key: key.to_string() });
    }
    if nonneg && w.lb_interval.0 .0 < 0 {
        out.push(Violation::WindowNegative { key: key.to_string() });
    }
}
