//! Dense variable indexing.
//!
//! Event times get one arrival and one departure column per (train, path
//! platform). Each synchronization event adds three columns: the overlap
//! time itself and the two hypograph helpers it is bounded by (the smaller
//! block end and the smaller negated block start).

use std::collections::BTreeMap;

use crate::model::{Instance, PlatformIdx, TrainIdx};
use crate::pairing::{SyncEvent, SyncEvents};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VarKind {
    Arrival,
    Departure,
    /// Overlap time between an effective accelerating and braking block.
    Overlap,
    /// Hypograph helper bounded above by each block end.
    EndsMin,
    /// Hypograph helper bounded above by each negated block start.
    StartsMin,
}

/// Column indices of one event's variable triple.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EventVars {
    pub overlap: usize,
    pub ends_min: usize,
    pub starts_min: usize,
}

/// Bijection between model keys and dense column indices, in canonical
/// order: per train (path order) arrival then departure, then right events,
/// then left events (overlap, ends-min, starts-min per event).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct VarTable {
    pub names: Vec<String>,
    pub kinds: Vec<VarKind>,
    arrival: BTreeMap<(TrainIdx, PlatformIdx), usize>,
    departure: BTreeMap<(TrainIdx, PlatformIdx), usize>,
    event_vars: BTreeMap<SyncEvent, EventVars>,
}

impl VarTable {
    pub fn for_instance(instance: &Instance, events: &SyncEvents) -> VarTable {
        let mut table = VarTable::default();
        for (ti, train) in instance.trains.iter().enumerate() {
            let t = TrainIdx(ti as u32);
            for &p in &train.path_platforms {
                let idx = table.names.len();
                table.names.push(format!("a_t{}_p{}", ti, p.get()));
                table.kinds.push(VarKind::Arrival);
                table.arrival.insert((t, p), idx);
                table.names.push(format!("d_t{}_p{}", ti, p.get()));
                table.kinds.push(VarKind::Departure);
                table.departure.insert((t, p), idx + 1);
            }
        }
        for (side, list) in [("r", &events.right), ("l", &events.left)] {
            for (k, event) in list.iter().enumerate() {
                let overlap = table.names.len();
                table.names.push(format!("ovl_{side}{k}"));
                table.kinds.push(VarKind::Overlap);
                table.names.push(format!("em_{side}{k}"));
                table.kinds.push(VarKind::EndsMin);
                table.names.push(format!("sm_{side}{k}"));
                table.kinds.push(VarKind::StartsMin);
                table.event_vars.insert(
                    *event,
                    EventVars {
                        overlap,
                        ends_min: overlap + 1,
                        starts_min: overlap + 2,
                    },
                );
            }
        }
        table
    }

    /// Rebuilds key maps for a table parsed from an interchange file. Event
    /// columns are re-associated positionally against `events`, which must be
    /// the same construction the file was written from.
    pub fn from_names(names: Vec<String>, events: Option<&SyncEvents>) -> VarTable {
        let mut table = VarTable {
            names,
            ..VarTable::default()
        };
        for (idx, name) in table.names.iter().enumerate() {
            let kind = match name.split('_').next() {
                Some("a") => VarKind::Arrival,
                Some("d") => VarKind::Departure,
                Some("ovl") => VarKind::Overlap,
                Some("em") => VarKind::EndsMin,
                Some("sm") => VarKind::StartsMin,
                _ => VarKind::Arrival,
            };
            table.kinds.push(kind);
            if let Some(rest) = name
                .strip_prefix("a_t")
                .or_else(|| name.strip_prefix("d_t"))
            {
                if let Some((t, p)) = rest.split_once("_p") {
                    if let (Ok(t), Ok(p)) = (t.parse::<u32>(), p.parse::<u32>()) {
                        let key = (TrainIdx(t), PlatformIdx(p));
                        if name.starts_with('a') {
                            table.arrival.insert(key, idx);
                        } else {
                            table.departure.insert(key, idx);
                        }
                    }
                }
            }
        }
        if let Some(events) = events {
            for (side, list) in [("r", &events.right), ("l", &events.left)] {
                for (k, event) in list.iter().enumerate() {
                    let find = |prefix: &str| {
                        let target = format!("{prefix}_{side}{k}");
                        table.names.iter().position(|n| *n == target)
                    };
                    if let (Some(overlap), Some(ends_min), Some(starts_min)) =
                        (find("ovl"), find("em"), find("sm"))
                    {
                        table.event_vars.insert(
                            *event,
                            EventVars {
                                overlap,
                                ends_min,
                                starts_min,
                            },
                        );
                    }
                }
            }
        }
        table
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn arrival(&self, train: TrainIdx, platform: PlatformIdx) -> Option<usize> {
        self.arrival.get(&(train, platform)).copied()
    }

    pub fn departure(&self, train: TrainIdx, platform: PlatformIdx) -> Option<usize> {
        self.departure.get(&(train, platform)).copied()
    }

    pub fn event_vars(&self, event: &SyncEvent) -> Option<EventVars> {
        self.event_vars.get(event).copied()
    }

    pub fn iter_arrivals(&self) -> impl Iterator<Item = (&(TrainIdx, PlatformIdx), &usize)> {
        self.arrival.iter()
    }

    pub fn iter_departures(&self) -> impl Iterator<Item = (&(TrainIdx, PlatformIdx), &usize)> {
        self.departure.iter()
    }

    pub fn iter_event_vars(&self) -> impl Iterator<Item = (&SyncEvent, &EventVars)> {
        self.event_vars.iter()
    }
}
