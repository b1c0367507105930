//! Static topology: platforms, tracks, crossing-overs.

use std::collections::BTreeMap;

use super::{PlatformIdx, TrackIdx};
use crate::model::instance::TurnaroundPair;

/// A platform. Every platform belongs to exactly one station and one line;
/// stations typically expose one platform per line that serves them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Platform {
    pub id: String,
    pub station_id: String,
    pub line_id: String,
}

/// A directed arc between two distinct platforms on the same line.
#[derive(Clone, Debug, PartialEq)]
pub struct Track {
    pub from: PlatformIdx,
    pub to: PlatformIdx,
    /// Meters, > 0.
    pub length: f64,
    /// Degrees, positive uphill in the `from → to` direction.
    pub grade: f64,
}

/// A directed arc joining two lines on which physical trains turn around.
/// The train is relabeled, so each turnaround names an (ending, starting)
/// train pair.
#[derive(Clone, Debug, PartialEq)]
pub struct CrossOver {
    pub from: PlatformIdx,
    pub to: PlatformIdx,
    pub turnaround_pairs: Vec<TurnaroundPair>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Network {
    pub platforms: Vec<Platform>,
    pub tracks: Vec<Track>,
    pub crossovers: Vec<CrossOver>,
}

impl Network {
    pub fn platform(&self, idx: PlatformIdx) -> &Platform {
        &self.platforms[idx.get()]
    }

    pub fn track(&self, idx: TrackIdx) -> &Track {
        &self.tracks[idx.get()]
    }

    pub fn platform_id(&self, idx: PlatformIdx) -> &str {
        &self.platforms[idx.get()].id
    }

    /// Lookup table from platform id to index.
    pub fn platform_index(&self) -> BTreeMap<&str, PlatformIdx> {
        self.platforms
            .iter()
            .enumerate()
            .map(|(i, p)| (p.id.as_str(), PlatformIdx(i as u32)))
            .collect()
    }

    /// Lookup table from (from, to) platform pair to track index.
    pub fn track_index(&self) -> BTreeMap<(PlatformIdx, PlatformIdx), TrackIdx> {
        self.tracks
            .iter()
            .enumerate()
            .map(|(i, t)| ((t.from, t.to), TrackIdx(i as u32)))
            .collect()
    }
}
