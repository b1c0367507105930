//! Synchronization-event construction.
//!
//! For each eligible platform pair and each train dwelling at the first
//! platform, partners on the second platform whose baseline dwell midpoint
//! falls within the closeness radius form an event: to the right when the
//! partner is not earlier (it will brake while the train accelerates), to
//! the left when strictly earlier (roles swap).

use std::collections::BTreeSet;

use crate::model::{Instance, PlatformIdx, Timetable, TrainIdx};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Direction {
    Right,
    Left,
}

/// One synchronization opportunity on a regen-eligible platform pair
/// `(i, j)`: `train` dwells at `i`, `partner` dwells at `j`.
///
/// For a right event the accelerating side is `train` departing `i` and the
/// braking side is `partner` arriving at `j`; for a left event the roles are
/// mirrored (`partner` accelerates out of `j` while `train` brakes into `i`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SyncEvent {
    pub i: PlatformIdx,
    pub j: PlatformIdx,
    pub train: TrainIdx,
    pub partner: TrainIdx,
    pub direction: Direction,
}

impl SyncEvent {
    /// (train, platform) whose departure anchors the accelerating block.
    pub fn accel_side(&self) -> (TrainIdx, PlatformIdx) {
        match self.direction {
            Direction::Right => (self.train, self.i),
            Direction::Left => (self.partner, self.j),
        }
    }

    /// (train, platform) whose arrival anchors the braking block.
    pub fn brake_side(&self) -> (TrainIdx, PlatformIdx) {
        match self.direction {
            Direction::Right => (self.partner, self.j),
            Direction::Left => (self.train, self.i),
        }
    }
}

/// The constructed event sets, right and left.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SyncEvents {
    pub right: Vec<SyncEvent>,
    pub left: Vec<SyncEvent>,
}

impl SyncEvents {
    pub fn iter(&self) -> impl Iterator<Item = &SyncEvent> {
        self.right.iter().chain(self.left.iter())
    }

    pub fn len(&self) -> usize {
        self.right.len() + self.left.len()
    }

    pub fn is_empty(&self) -> bool {
        self.right.is_empty() && self.left.is_empty()
    }
}

/// Builds the synchronization event sets from the baseline timetable.
///
/// A partner with equal midpoint is a right event only (the right definition
/// admits a zero gap, the left one does not), so the sets are disjoint.
/// Trains missing either track needed for the accelerating or braking role
/// (path endpoints) are skipped: neither block exists for them.
pub fn build_sync_events(instance: &Instance, baseline: &Timetable) -> SyncEvents {
    let mut events = SyncEvents::default();
    let radius_2x = instance.closeness_radius.0 * 2;
    if radius_2x <= 0 {
        return events;
    }

    // Trains dwelling at each platform, with doubled baseline midpoints
    // (avoids halving, so comparisons stay exact in integer microseconds).
    let n_platforms = instance.network.platforms.len();
    let mut dwellers: Vec<Vec<(TrainIdx, i64, usize)>> = vec![Vec::new(); n_platforms];
    for (ti, train) in instance.trains.iter().enumerate() {
        let t = TrainIdx(ti as u32);
        for (pos, &p) in train.path_platforms.iter().enumerate() {
            let (Some(arr), Some(dep)) = (baseline.arrival(t, p), baseline.departure(t, p))
            else {
                continue;
            };
            dwellers[p.get()].push((t, arr.0 + dep.0, pos));
        }
    }

    let mut seen = BTreeSet::new();
    for &(i, j) in &instance.regen_pairs {
        for &(t, mid2_t, pos_t) in &dwellers[i.get()] {
            let t_path_len = instance.train(t).path_platforms.len();
            for &(partner, mid2_p, pos_p) in &dwellers[j.get()] {
                if t == partner {
                    continue;
                }
                let partner_path_len = instance.train(partner).path_platforms.len();
                let gap2 = mid2_p - mid2_t;
                let event = if (0..=radius_2x).contains(&gap2) {
                    // Right: `t` accelerates out of i, partner brakes into j.
                    if pos_t + 1 >= t_path_len || pos_p == 0 {
                        continue;
                    }
                    SyncEvent {
                        i,
                        j,
                        train: t,
                        partner,
                        direction: Direction::Right,
                    }
                } else if (1..=radius_2x).contains(&-gap2) {
                    // Left: partner accelerates out of j, `t` brakes into i.
                    if pos_p + 1 >= partner_path_len || pos_t == 0 {
                        continue;
                    }
                    SyncEvent {
                        i,
                        j,
                        train: t,
                        partner,
                        direction: Direction::Left,
                    }
                } else {
                    continue;
                };
                if seen.insert((i, j, t, partner)) {
                    match event.direction {
                        Direction::Right => events.right.push(event),
                        Direction::Left => events.left.push(event),
                    }
                }
            }
        }
    }
    events
}
