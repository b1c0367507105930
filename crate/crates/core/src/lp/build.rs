//! LP assembly from an instance, its fit bundle, and its event sets.

use thiserror::Error;

use crate::fitting::{AffineFit, FitBundle, PhaseFits};
use crate::model::{ConstraintFamily, Instance, TrackIdx, TrainIdx};
use crate::pairing::{Direction, SyncEvents};
use crate::time::{TimeWindow, UncertainWindow};

use super::program::{LinearProgram, Row, RowBound};
use super::var::VarTable;

#[derive(Debug, Error, PartialEq)]
pub enum BuildError {
    #[error("MISSING_FIT: {key}")]
    MissingFit { key: String },
    #[error("MISSING_EVENT: {key}")]
    MissingEvent { key: String },
    #[error("EMPTY_ROBUST_WINDOW: {key}")]
    EmptyRobustWindow { key: String },
}

/// The robust counterpart of a box-uncertain window: the largest lower bound
/// against the smallest upper bound.
pub fn robustify(w: &UncertainWindow) -> Result<TimeWindow, BuildError> {
    w.robustified().ok_or_else(|| BuildError::EmptyRobustWindow {
        key: format!(
            "lb in [{}, {}], ub in [{}, {}]",
            w.lb_interval.0, w.lb_interval.1, w.ub_interval.0, w.ub_interval.1
        ),
    })
}

fn range(window: TimeWindow) -> RowBound {
    RowBound::Range(window.lb.as_secs_f64(), window.ub.as_secs_f64())
}

/// Assembles the full LP: robustified operational rows in canonical family
/// order, five hypograph rows per event with the phase surrogates folded in
/// symbolically, domain bounds on the event times, and the effective-energy
/// objective (consumption minus regenerative transfer).
pub fn build_lp(
    instance: &Instance,
    fits: &FitBundle<f64>,
    events: &SyncEvents,
) -> Result<LinearProgram, BuildError> {
    let vars = VarTable::for_instance(instance, events);
    let n = vars.len();
    let mut rows: Vec<Row> = Vec::new();
    let mut objective = vec![0.0f64; n];
    let mut offset = 0.0f64;

    let arrival = |t: TrainIdx, p| {
        vars.arrival(t, p).ok_or_else(|| BuildError::MissingEvent {
            key: format!(
                "arrival({},{})",
                instance.train_id(t),
                instance.network.platform_id(p)
            ),
        })
    };
    let departure = |t: TrainIdx, p| {
        vars.departure(t, p).ok_or_else(|| BuildError::MissingEvent {
            key: format!(
                "departure({},{})",
                instance.train_id(t),
                instance.network.platform_id(p)
            ),
        })
    };
    let consumption_fit = |t: TrainIdx, tr: TrackIdx| -> Result<&AffineFit<f64>, BuildError> {
        fits.consumption_track
            .get(&(t, tr))
            .ok_or_else(|| BuildError::MissingFit {
                key: format!("consumption({},#{})", instance.train_id(t), tr.get()),
            })
    };
    let phase_fit = |t: TrainIdx, tr: TrackIdx| -> Result<&PhaseFits<f64>, BuildError> {
        fits.phase.get(&(t, tr)).ok_or_else(|| BuildError::MissingFit {
            key: format!("phase({},#{})", instance.train_id(t), tr.get()),
        })
    };

    // TRACK rows and the track-consumption objective terms.
    for (ti, train) in instance.trains.iter().enumerate() {
        let t = TrainIdx(ti as u32);
        for (k, &tr) in train.path_tracks.iter().enumerate() {
            let window = instance
                .trip_windows
                .get(&(t, tr))
                .ok_or_else(|| BuildError::MissingEvent {
                    key: format!("trip window ({},#{})", train.id, tr.get()),
                })
                .and_then(|w| robustify(w))?;
            let d_from = departure(t, train.path_platforms[k])?;
            let a_to = arrival(t, train.path_platforms[k + 1])?;
            rows.push(Row {
                family: ConstraintFamily::Track,
                terms: vec![(a_to, 1.0), (d_from, -1.0)],
                bound: range(window),
            });
            let fit = consumption_fit(t, tr)?;
            objective[a_to] += fit.slope;
            objective[d_from] -= fit.slope;
            offset += fit.intercept;
        }
    }

    // CROSS rows and crossover-consumption objective terms.
    for (ci, crossover) in instance.network.crossovers.iter().enumerate() {
        for (pi, pair) in crossover.turnaround_pairs.iter().enumerate() {
            let window = robustify(&pair.window)?;
            let d_from = departure(pair.from_train, crossover.from)?;
            let a_to = arrival(pair.to_train, crossover.to)?;
            rows.push(Row {
                family: ConstraintFamily::Cross,
                terms: vec![(a_to, 1.0), (d_from, -1.0)],
                bound: range(window),
            });
            let fit = fits
                .consumption_crossover
                .get(&(ci as u32, pi as u32))
                .ok_or_else(|| BuildError::MissingFit {
                    key: format!("crossover({ci},{pi})"),
                })?;
            objective[a_to] += fit.slope;
            objective[d_from] -= fit.slope;
            offset += fit.intercept;
        }
    }

    // DWELL rows.
    for (ti, train) in instance.trains.iter().enumerate() {
        let t = TrainIdx(ti as u32);
        for &p in &train.path_platforms {
            let window = instance
                .dwell_windows
                .get(&(t, p))
                .ok_or_else(|| BuildError::MissingEvent {
                    key: format!(
                        "dwell window ({},{})",
                        train.id,
                        instance.network.platform_id(p)
                    ),
                })
                .and_then(|w| robustify(w))?;
            let a = arrival(t, p)?;
            let d = departure(t, p)?;
            rows.push(Row {
                family: ConstraintFamily::Dwell,
                terms: vec![(d, 1.0), (a, -1.0)],
                bound: range(window),
            });
        }
    }

    // CONNECT rows.
    for conn in &instance.connections {
        let window = robustify(&conn.window)?;
        let a = arrival(conn.arriving, conn.from_platform)?;
        let d = departure(conn.departing, conn.to_platform)?;
        rows.push(Row {
            family: ConstraintFamily::Connect,
            terms: vec![(d, 1.0), (a, -1.0)],
            bound: range(window),
        });
    }

    // HEADWAY rows: one-sided minimum separations at both track ends.
    for hw in &instance.headways {
        let track = instance.network.track(hw.track);
        for (platform, h) in [(track.from, hw.headway_from), (track.to, hw.headway_to)] {
            let d_first = departure(hw.first, platform)?;
            let d_second = departure(hw.second, platform)?;
            rows.push(Row {
                family: ConstraintFamily::Headway,
                terms: vec![(d_second, 1.0), (d_first, -1.0)],
                bound: RowBound::Ge(h.as_secs_f64()),
            });
        }
    }

    // TRAVEL rows.
    for (ti, train) in instance.trains.iter().enumerate() {
        let t = TrainIdx(ti as u32);
        let window = robustify(&train.travel_window)?;
        let a_last = arrival(t, train.last_platform())?;
        let d_first = departure(t, train.first_platform())?;
        rows.push(Row {
            family: ConstraintFamily::Travel,
            terms: vec![(a_last, 1.0), (d_first, -1.0)],
            bound: range(window),
        });
    }

    // Hypograph rows, right events then left events. Phase boundaries are
    // substituted symbolically: with the accelerating train's next arrival
    // `a_n` and departure `d_i`, and the braking train's arrival `a_j` and
    // previous departure `d_p`, each block edge is affine in those columns.
    for event in events.iter() {
        let family = match event.direction {
            Direction::Right => ConstraintFamily::HypoRight,
            Direction::Left => ConstraintFamily::HypoLeft,
        };
        let ev = vars.event_vars(event).ok_or_else(|| BuildError::MissingEvent {
            key: "event variables".into(),
        })?;

        let (accel_train, accel_platform) = event.accel_side();
        let accel_tr = instance.train(accel_train);
        let accel_pos = accel_tr
            .path_position(accel_platform)
            .filter(|pos| pos + 1 < accel_tr.path_platforms.len())
            .ok_or_else(|| BuildError::MissingEvent {
                key: format!(
                    "outgoing track of {} at {}",
                    instance.train_id(accel_train),
                    instance.network.platform_id(accel_platform)
                ),
            })?;
        let accel_track = accel_tr.path_tracks[accel_pos];
        let d_i = departure(accel_train, accel_platform)?;
        let a_n = arrival(accel_train, accel_tr.path_platforms[accel_pos + 1])?;
        let pf_a = phase_fit(accel_train, accel_track)?;
        let (c1, b1) = (pf_a.accel_start.slope, pf_a.accel_start.intercept);
        let (c2, b2) = (pf_a.accel_end.slope, pf_a.accel_end.intercept);

        let (brake_train, brake_platform) = event.brake_side();
        let brake_tr = instance.train(brake_train);
        let brake_pos = brake_tr
            .path_position(brake_platform)
            .filter(|&pos| pos > 0)
            .ok_or_else(|| BuildError::MissingEvent {
                key: format!(
                    "incoming track of {} at {}",
                    instance.train_id(brake_train),
                    instance.network.platform_id(brake_platform)
                ),
            })?;
        let brake_track = brake_tr.path_tracks[brake_pos - 1];
        let a_j = arrival(brake_train, brake_platform)?;
        let d_p = departure(brake_train, brake_tr.path_platforms[brake_pos - 1])?;
        let pf_b = phase_fit(brake_train, brake_track)?;
        let (c3, b3) = (pf_b.brake_lead.slope, pf_b.brake_lead.intercept);
        let (c4, b4) = (pf_b.brake_lag.slope, pf_b.brake_lag.intercept);

        // overlap ≤ ends_min + starts_min
        rows.push(Row {
            family,
            terms: vec![(ev.overlap, 1.0), (ev.ends_min, -1.0), (ev.starts_min, -1.0)],
            bound: RowBound::Le(0.0),
        });
        // ends_min ≤ brake block end = (1-c4)·a_j + c4·d_p - b4
        rows.push(Row {
            family,
            terms: vec![(ev.ends_min, 1.0), (a_j, -(1.0 - c4)), (d_p, -c4)],
            bound: RowBound::Le(-b4),
        });
        // ends_min ≤ accel block end = (1-c2)·d_i + c2·a_n + b2
        rows.push(Row {
            family,
            terms: vec![(ev.ends_min, 1.0), (d_i, -(1.0 - c2)), (a_n, -c2)],
            bound: RowBound::Le(b2),
        });
        // starts_min ≤ -(accel block start) = -(1-c1)·d_i - c1·a_n - b1
        rows.push(Row {
            family,
            terms: vec![(ev.starts_min, 1.0), (d_i, 1.0 - c1), (a_n, c1)],
            bound: RowBound::Le(-b1),
        });
        // starts_min ≤ -(brake block start) = -(1-c3)·a_j - c3·d_p + b3
        rows.push(Row {
            family,
            terms: vec![(ev.starts_min, 1.0), (a_j, 1.0 - c3), (d_p, c3)],
            bound: RowBound::Le(b3),
        });

        // Regenerative-transfer objective term (maximized, so negated).
        let regen = fits.regen.get(event).ok_or_else(|| BuildError::MissingFit {
            key: format!(
                "regen({},{},{},{})",
                instance.network.platform_id(event.i),
                instance.network.platform_id(event.j),
                instance.train_id(event.train),
                instance.train_id(event.partner)
            ),
        })?;
        objective[ev.overlap] -= regen.slope;
        offset -= regen.intercept;
    }

    // DOMAIN bounds: event times in [0, horizon]; event-variable triples free
    // (their hypograph rows and the time bounds already bound them above).
    let horizon = instance.horizon.as_secs_f64();
    let mut var_bounds = vec![(f64::NEG_INFINITY, f64::INFINITY); n];
    for (_, &idx) in vars.iter_arrivals() {
        var_bounds[idx] = (0.0, horizon);
    }
    for (_, &idx) in vars.iter_departures() {
        var_bounds[idx] = (0.0, horizon);
    }

    Ok(LinearProgram {
        objective,
        objective_offset: offset,
        rows,
        var_bounds,
        vars,
    })
}
