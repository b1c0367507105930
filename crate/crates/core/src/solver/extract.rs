//! Timetable extraction from a solved LP.
//!
//! Solution values are rounded onto the microsecond grid the audit works in.
//! Rounding can nick a binding window by a microsecond, so a bounded repair
//! pass re-projects stray events; window slack is on the order of seconds,
//! so these microsecond nudges never cascade far.

use thiserror::Error;

use crate::lp::LinearProgram;
use crate::model::{audit_timetable, Instance, Timetable, TrainIdx};
use crate::time::Micros;

#[derive(Debug, Error)]
pub enum ExtractError {
    #[error("solution lacks values for the event-time columns")]
    MissingColumns,
    #[error("rounding repair left {remaining} violations after {sweeps} sweeps")]
    RepairFailed { remaining: usize, sweeps: usize },
    #[error("audit failed during extraction: {0}")]
    Audit(#[from] crate::model::AuditError),
}

/// Rounds the solved event times to integer microseconds and repairs any
/// rounding-induced window violations, returning a timetable that passes the
/// exact integer audit.
pub fn extract_timetable(
    instance: &Instance,
    lp: &LinearProgram,
    values: &[f64],
) -> Result<Timetable, ExtractError> {
    if values.len() != lp.n_vars() {
        return Err(ExtractError::MissingColumns);
    }
    let horizon = instance.horizon;
    let clamp = |t: Micros| Micros(t.0.clamp(0, horizon.0));
    let mut tt = Timetable::new();
    for (&(train, platform), &idx) in lp.vars.iter_arrivals() {
        tt.set_arrival(train, platform, clamp(Micros::from_secs_f64(values[idx])));
    }
    for (&(train, platform), &idx) in lp.vars.iter_departures() {
        tt.set_departure(train, platform, clamp(Micros::from_secs_f64(values[idx])));
    }
    if !tt.covers(instance) {
        return Err(ExtractError::MissingColumns);
    }

    const MAX_SWEEPS: usize = 64;
    for sweep in 0..MAX_SWEEPS {
        let report = audit_timetable(instance, &tt)?;
        if report.is_feasible() {
            return Ok(tt);
        }
        if sweep + 1 == MAX_SWEEPS {
            return Err(ExtractError::RepairFailed {
                remaining: report.n_violations(),
                sweeps: MAX_SWEEPS,
            });
        }
        repair_sweep(instance, &mut tt);
    }
    unreachable!("loop returns or errors")
}

/// One repair pass: every violated window pushes its dependent event just
/// inside the window. Later events absorb the nudge, earlier ones are left
/// alone; magnitudes are microseconds against second-scale slack.
fn repair_sweep(instance: &Instance, tt: &mut Timetable) {
    let horizon = instance.horizon;
    for (ti, train) in instance.trains.iter().enumerate() {
        let t = TrainIdx(ti as u32);
        for (k, &platform) in train.path_platforms.iter().enumerate() {
            // Dwell: move the departure.
            if let (Some(w), Some(a), Some(d)) = (
                instance
                    .dwell_windows
                    .get(&(t, platform))
                    .and_then(|w| w.robustified()),
                tt.arrival(t, platform),
                tt.departure(t, platform),
            ) {
                let v = d - a;
                if v < w.lb {
                    tt.set_departure(t, platform, a + w.lb);
                } else if v > w.ub {
                    tt.set_departure(t, platform, a + w.ub);
                }
            }
            // Trip onto the next platform: move the next arrival.
            if k < train.path_tracks.len() {
                let next = train.path_platforms[k + 1];
                if let (Some(w), Some(d), Some(a_next)) = (
                    instance
                        .trip_windows
                        .get(&(t, train.path_tracks[k]))
                        .and_then(|w| w.robustified()),
                    tt.departure(t, platform),
                    tt.arrival(t, next),
                ) {
                    let v = a_next - d;
                    if v < w.lb {
                        tt.set_arrival(t, next, d + w.lb);
                    } else if v > w.ub {
                        tt.set_arrival(t, next, d + w.ub);
                    }
                }
            }
        }
    }
    for crossover in &instance.network.crossovers {
        for pair in &crossover.turnaround_pairs {
            if let (Some(w), Some(d), Some(a)) = (
                pair.window.robustified(),
                tt.departure(pair.from_train, crossover.from),
                tt.arrival(pair.to_train, crossover.to),
            ) {
                let v = a - d;
                if v < w.lb {
                    tt.set_arrival(pair.to_train, crossover.to, d + w.lb);
                } else if v > w.ub {
                    tt.set_arrival(pair.to_train, crossover.to, d + w.ub);
                }
            }
        }
    }
    for conn in &instance.connections {
        if let (Some(w), Some(a), Some(d)) = (
            conn.window.robustified(),
            tt.arrival(conn.arriving, conn.from_platform),
            tt.departure(conn.departing, conn.to_platform),
        ) {
            let v = d - a;
            if v < w.lb {
                tt.set_departure(conn.departing, conn.to_platform, a + w.lb);
            } else if v > w.ub {
                tt.set_departure(conn.departing, conn.to_platform, a + w.ub);
            }
        }
    }
    for hw in &instance.headways {
        let track = instance.network.track(hw.track);
        for (platform, h) in [(track.from, hw.headway_from), (track.to, hw.headway_to)] {
            if let (Some(d1), Some(d2)) = (
                tt.departure(hw.first, platform),
                tt.departure(hw.second, platform),
            ) {
                if d2 - d1 < h {
                    tt.set_departure(hw.second, platform, d1 + h);
                }
            }
        }
    }
    for (ti, train) in instance.trains.iter().enumerate() {
        let t = TrainIdx(ti as u32);
        if let (Some(w), Some(d_first), Some(a_last)) = (
            train.travel_window.robustified(),
            tt.departure(t, train.first_platform()),
            tt.arrival(t, train.last_platform()),
        ) {
            let v = a_last - d_first;
            if v < w.lb {
                tt.set_arrival(t, train.last_platform(), d_first + w.lb);
            } else if v > w.ub {
                tt.set_arrival(t, train.last_platform(), d_first + w.ub);
            }
        }
        // Domain clamp.
        for &p in &train.path_platforms {
            if let Some(a) = tt.arrival(t, p) {
                tt.set_arrival(t, p, Micros(a.0.clamp(0, horizon.0)));
            }
            if let Some(d) = tt.departure(t, p) {
                tt.set_departure(t, p, Micros(d.0.clamp(0, horizon.0)));
            }
        }
    }
}
