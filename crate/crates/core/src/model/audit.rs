//! Feasibility audit of a timetable against the robustified windows.
//!
//! The audit re-evaluates every operational inequality directly in integer
//! microseconds, so it is an oracle independent of the LP: a timetable passes
//! iff it satisfies each robustified constraint family exactly.

use std::collections::BTreeMap;

use thiserror::Error;

use super::{ConstraintFamily, Instance, Timetable, TrainIdx};
use crate::time::{Micros, TimeWindow, UncertainWindow};

#[derive(Debug, Error, PartialEq)]
pub enum AuditError {
    #[error("MISSING_EVENT: train {train} has no {which} at platform {platform}")]
    MissingEvent {
        train: String,
        platform: String,
        which: &'static str,
    },
    #[error("EMPTY_ROBUST_WINDOW: {key}")]
    EmptyRobustWindow { key: String },
}

/// One violated inequality: the achieved difference and how far outside the
/// window it lies (`slack` is negative exactly when violated).
#[derive(Clone, Debug, PartialEq)]
pub struct AuditEntry {
    pub key: String,
    pub value: Micros,
    pub slack: Micros,
}

/// Violations grouped by constraint family. Empty everywhere iff feasible.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct AuditReport {
    pub violations: BTreeMap<ConstraintFamily, Vec<AuditEntry>>,
}

impl AuditReport {
    pub fn is_feasible(&self) -> bool {
        self.violations.values().all(|v| v.is_empty())
    }

    pub fn n_violations(&self) -> usize {
        self.violations.values().map(|v| v.len()).sum()
    }

    fn push(&mut self, family: ConstraintFamily, entry: AuditEntry) {
        self.violations.entry(family).or_default().push(entry);
    }
}

/// Checks `tt` against every robustified constraint of `instance` and lists
/// each violation with its slack. Feasible timetables yield all-empty lists.
pub fn audit_timetable(instance: &Instance, tt: &Timetable) -> Result<AuditReport, AuditError> {
    let mut report = AuditReport::default();
    for family in ConstraintFamily::OPERATIONAL {
        report.violations.entry(family).or_default();
    }

    let arrival = |t: TrainIdx, p| {
        tt.arrival(t, p).ok_or_else(|| AuditError::MissingEvent {
            train: instance.train_id(t).to_string(),
            platform: instance.network.platform_id(p).to_string(),
            which: "arrival",
        })
    };
    let departure = |t: TrainIdx, p| {
        tt.departure(t, p).ok_or_else(|| AuditError::MissingEvent {
            train: instance.train_id(t).to_string(),
            platform: instance.network.platform_id(p).to_string(),
            which: "departure",
        })
    };
    let robust = |w: &UncertainWindow, key: &str| {
        w.robustified().ok_or_else(|| AuditError::EmptyRobustWindow {
            key: key.to_string(),
        })
    };
    let range_slack = |value: Micros, w: TimeWindow| (value - w.lb).min(w.ub - value);

    for (ti, train) in instance.trains.iter().enumerate() {
        let t = TrainIdx(ti as u32);

        // DWELL: departure - arrival within the dwell window at every stop.
        for &p in &train.path_platforms {
            let key = format!("dwell({},{})", train.id, instance.network.platform_id(p));
            let w = match instance.dwell_windows.get(&(t, p)) {
                Some(w) => robust(w, &key)?,
                None => continue,
            };
            let value = departure(t, p)? - arrival(t, p)?;
            let slack = range_slack(value, w);
            if slack.0 < 0 {
                report.push(ConstraintFamily::Dwell, AuditEntry { key, value, slack });
            }
        }

        // TRACK: trip time within the track window.
        for (k, &tr) in train.path_tracks.iter().enumerate() {
            let key = format!("trip({},#{})", train.id, tr.get());
            let w = match instance.trip_windows.get(&(t, tr)) {
                Some(w) => robust(w, &key)?,
                None => continue,
            };
            let track = instance.network.track(tr);
            debug_assert_eq!(track.from, train.path_platforms[k]);
            let value = arrival(t, track.to)? - departure(t, track.from)?;
            let slack = range_slack(value, w);
            if slack.0 < 0 {
                report.push(ConstraintFamily::Track, AuditEntry { key, value, slack });
            }
        }

        // TRAVEL: last arrival minus first departure.
        let key = format!("travel({})", train.id);
        let w = robust(&train.travel_window, &key)?;
        let value = arrival(t, train.last_platform())? - departure(t, train.first_platform())?;
        let slack = range_slack(value, w);
        if slack.0 < 0 {
            report.push(ConstraintFamily::Travel, AuditEntry { key, value, slack });
        }

        // DOMAIN: all events within [0, horizon].
        for &p in &train.path_platforms {
            for (which, value) in [("a", arrival(t, p)?), ("d", departure(t, p)?)] {
                let slack = value.min(instance.horizon - value);
                if slack.0 < 0 {
                    report.push(
                        ConstraintFamily::Domain,
                        AuditEntry {
                            key: format!(
                                "{which}({},{})",
                                train.id,
                                instance.network.platform_id(p)
                            ),
                            value,
                            slack,
                        },
                    );
                }
            }
        }
    }

    // CROSS: turnaround trip time over each crossing-over.
    for crossover in &instance.network.crossovers {
        for pair in &crossover.turnaround_pairs {
            let key = format!(
                "cross({},{})",
                instance.train_id(pair.from_train),
                instance.train_id(pair.to_train)
            );
            let w = robust(&pair.window, &key)?;
            let value =
                arrival(pair.to_train, crossover.to)? - departure(pair.from_train, crossover.from)?;
            let slack = range_slack(value, w);
            if slack.0 < 0 {
                report.push(ConstraintFamily::Cross, AuditEntry { key, value, slack });
            }
        }
    }

    // CONNECT: transfer window between arriving and departing trains.
    for conn in &instance.connections {
        let key = format!(
            "connect({},{})",
            instance.train_id(conn.arriving),
            instance.train_id(conn.departing)
        );
        let w = robust(&conn.window, &key)?;
        let value =
            departure(conn.departing, conn.to_platform)? - arrival(conn.arriving, conn.from_platform)?;
        let slack = range_slack(value, w);
        if slack.0 < 0 {
            report.push(ConstraintFamily::Connect, AuditEntry { key, value, slack });
        }
    }

    // HEADWAY: minimum departure separation at both ends of the track.
    for hw in &instance.headways {
        let track = instance.network.track(hw.track);
        for (platform, h) in [(track.from, hw.headway_from), (track.to, hw.headway_to)] {
            let value = departure(hw.second, platform)? - departure(hw.first, platform)?;
            let slack = value - h;
            if slack.0 < 0 {
                report.push(
                    ConstraintFamily::Headway,
                    AuditEntry {
                        key: format!(
                            "headway({},{},{})",
                            instance.train_id(hw.first),
                            instance.train_id(hw.second),
                            instance.network.platform_id(platform)
                        ),
                        value,
                        slack,
                    },
                );
            }
        }
    }

    Ok(report)
}
