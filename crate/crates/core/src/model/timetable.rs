//! Arrival/departure times per (train, platform).

use std::collections::BTreeMap;

use super::{Instance, PlatformIdx, TrainIdx};
use crate::time::Micros;

/// A timetable: one arrival and one departure per platform on each train's
/// path. Values are microseconds from service start.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Timetable {
    arrival: BTreeMap<(TrainIdx, PlatformIdx), Micros>,
    departure: BTreeMap<(TrainIdx, PlatformIdx), Micros>,
}

impl Timetable {
    pub fn new() -> Timetable {
        Timetable::default()
    }

    pub fn set_arrival(&mut self, train: TrainIdx, platform: PlatformIdx, at: Micros) {
        self.arrival.insert((train, platform), at);
    }

    pub fn set_departure(&mut self, train: TrainIdx, platform: PlatformIdx, at: Micros) {
        self.departure.insert((train, platform), at);
    }

    pub fn arrival(&self, train: TrainIdx, platform: PlatformIdx) -> Option<Micros> {
        self.arrival.get(&(train, platform)).copied()
    }

    pub fn departure(&self, train: TrainIdx, platform: PlatformIdx) -> Option<Micros> {
        self.departure.get(&(train, platform)).copied()
    }

    /// Baseline midpoint of the dwell at a platform: (arrival + departure)/2.
    pub fn dwell_midpoint(&self, train: TrainIdx, platform: PlatformIdx) -> Option<Micros> {
        Some(
            self.arrival(train, platform)?
                .midpoint(self.departure(train, platform)?),
        )
    }

    /// Realized trip time on a train's `k`-th track.
    pub fn trip_time(&self, instance: &Instance, train: TrainIdx, k: usize) -> Option<Micros> {
        let t = instance.train(train);
        let dep = self.departure(train, t.path_platforms[k])?;
        let arr = self.arrival(train, t.path_platforms[k + 1])?;
        Some(arr - dep)
    }

    /// The track a train accelerates onto when departing `platform`, with
    /// the realized trip time. `None` at the path's last platform or when an
    /// event is missing.
    pub fn departure_trip(
        &self,
        instance: &Instance,
        train: TrainIdx,
        platform: PlatformIdx,
    ) -> Option<(crate::model::TrackIdx, Micros)> {
        let tr = instance.train(train);
        let pos = tr.path_position(platform)?;
        if pos + 1 >= tr.path_platforms.len() {
            return None;
        }
        let dep = self.departure(train, platform)?;
        let arr = self.arrival(train, tr.path_platforms[pos + 1])?;
        Some((tr.path_tracks[pos], arr - dep))
    }

    /// The track a train brakes along when arriving at `platform`, with the
    /// realized trip time. `None` at the path's first platform or when an
    /// event is missing.
    pub fn arrival_trip(
        &self,
        instance: &Instance,
        train: TrainIdx,
        platform: PlatformIdx,
    ) -> Option<(crate::model::TrackIdx, Micros)> {
        let tr = instance.train(train);
        let pos = tr.path_position(platform)?;
        if pos == 0 {
            return None;
        }
        let dep = self.departure(train, tr.path_platforms[pos - 1])?;
        let arr = self.arrival(train, platform)?;
        Some((tr.path_tracks[pos - 1], arr - dep))
    }

    pub fn n_events(&self) -> usize {
        self.arrival.len() + self.departure.len()
    }

    pub fn iter_arrivals(&self) -> impl Iterator<Item = (&(TrainIdx, PlatformIdx), &Micros)> {
        self.arrival.iter()
    }

    /// True when every path platform of every train has both events.
    pub fn covers(&self, instance: &Instance) -> bool {
        instance.trains.iter().enumerate().all(|(ti, train)| {
            let t = TrainIdx(ti as u32);
            train.path_platforms.iter().all(|&p| {
                self.arrival(t, p).is_some() && self.departure(t, p).is_some()
            })
        })
    }
}
