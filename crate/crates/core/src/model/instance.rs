//! A complete optimization instance: topology, trains, windows, relation sets.

use std::collections::BTreeMap;

use super::network::Network;
use super::{PlatformIdx, TrackIdx, TrainIdx};
use crate::time::{Micros, UncertainWindow};

/// One train service: an ordered pass over a line. A physical vehicle that
/// turns around continues as a different train.
#[derive(Clone, Debug, PartialEq)]
pub struct Train {
    pub id: String,
    /// Platforms visited in chronological order.
    pub path_platforms: Vec<PlatformIdx>,
    /// `path_tracks[k]` connects `path_platforms[k]` to `path_platforms[k+1]`.
    pub path_tracks: Vec<TrackIdx>,
    /// Window on total travel time: last arrival minus first departure.
    pub travel_window: UncertainWindow,
}

impl Train {
    pub fn first_platform(&self) -> PlatformIdx {
        self.path_platforms[0]
    }

    pub fn last_platform(&self) -> PlatformIdx {
        *self.path_platforms.last().expect("non-empty path")
    }

    /// Position of `platform` in this train's path, if visited.
    pub fn path_position(&self, platform: PlatformIdx) -> Option<usize> {
        self.path_platforms.iter().position(|&p| p == platform)
    }
}

/// An ordered turnaround on a crossing-over: train `from_train` ends at the
/// crossover's `from` platform and continues as `to_train` from its `to`
/// platform, within `window` between departure and arrival.
#[derive(Clone, Debug, PartialEq)]
pub struct TurnaroundPair {
    pub from_train: TrainIdx,
    pub to_train: TrainIdx,
    pub window: UncertainWindow,
}

/// Minimum-separation requirement between two trains that traverse the same
/// track consecutively, `first` before `second`.
#[derive(Clone, Debug, PartialEq)]
pub struct HeadwayPair {
    pub track: TrackIdx,
    pub first: TrainIdx,
    pub second: TrainIdx,
    /// Minimum departure separation at the track's origin platform.
    pub headway_from: Micros,
    /// Minimum departure separation at the track's destination platform.
    pub headway_to: Micros,
}

/// A passenger transfer requirement: train `arriving` reaches platform
/// `from_platform`, and train `departing` must leave `to_platform` within
/// `window` of that arrival.
#[derive(Clone, Debug, PartialEq)]
pub struct Connection {
    pub from_platform: PlatformIdx,
    pub to_platform: PlatformIdx,
    pub arriving: TrainIdx,
    pub departing: TrainIdx,
    pub window: UncertainWindow,
}

/// Rolling-stock and traction-system parameters used by the kinematics
/// oracle. One parameter set per instance (single stock class).
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PhysicsParams {
    /// Maximum acceleration, m/s², > 0.
    pub accel_max: f64,
    /// Maximum (most negative) deceleration, m/s², < 0.
    pub decel_max: f64,
    /// Electrical-to-kinetic conversion efficiency, (0, 1].
    pub eta_elec_to_kin: f64,
    /// Kinetic-to-regenerative conversion efficiency, (0, 1].
    pub eta_kin_to_regen: f64,
    /// Fraction of regenerated electricity lost in transmission, [0, 1).
    pub transmission_loss: f64,
    /// Train mass, kg.
    pub train_mass: f64,
    /// Davis running-resistance coefficients (A, B, C) in N, N·s/m, N·s²/m².
    pub davis_coeffs: (f64, f64, f64),
    /// Speed limit, m/s.
    pub speed_limit: f64,
}

impl PhysicsParams {
    /// Running resistance at speed `v` (m/s), in newtons.
    pub fn resistance(&self, v: f64) -> f64 {
        let (a, b, c) = self.davis_coeffs;
        a + b * v + c * v * v
    }
}

/// A full problem instance. Immutable after construction; safe to share
/// across workers.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub network: Network,
    pub trains: Vec<Train>,
    pub dwell_windows: BTreeMap<(TrainIdx, PlatformIdx), UncertainWindow>,
    pub trip_windows: BTreeMap<(TrainIdx, TrackIdx), UncertainWindow>,
    pub connections: Vec<Connection>,
    pub headways: Vec<HeadwayPair>,
    /// Platform pairs eligible for regenerative transfer, lexicographically
    /// ordered by platform id with `i < j`.
    pub regen_pairs: Vec<(PlatformIdx, PlatformIdx)>,
    /// Domain upper bound for all event times.
    pub horizon: Micros,
    /// Temporal-closeness radius for synchronization pairing.
    pub closeness_radius: Micros,
    pub physics: PhysicsParams,
    /// Segment length assumed when simulating crossing-over trips, m.
    pub crossover_length: f64,
}

impl Instance {
    pub fn train(&self, idx: TrainIdx) -> &Train {
        &self.trains[idx.get()]
    }

    pub fn train_id(&self, idx: TrainIdx) -> &str {
        &self.trains[idx.get()].id
    }

    /// The analytic horizon bound: longest path through the event-precedence
    /// graph with every propagation window stretched to its largest value
    /// (trip, dwell, and crossover maxima; headway minima chain successive
    /// trains). Connections are coupling constraints, not precedences — they
    /// only shrink the feasible set — so they do not enter the bound.
    /// `None` when the precedence graph is cyclic or a window is missing.
    pub fn computed_horizon(&self) -> Option<Micros> {
        // Two nodes per (train, path position): arrival then departure.
        let mut offsets = Vec::with_capacity(self.trains.len());
        let mut n_nodes = 0usize;
        for train in &self.trains {
            offsets.push(n_nodes);
            n_nodes += 2 * train.path_platforms.len();
        }
        let arr = |offsets: &[usize], t: TrainIdx, k: usize| offsets[t.get()] + 2 * k;
        let dep = |offsets: &[usize], t: TrainIdx, k: usize| offsets[t.get()] + 2 * k + 1;

        let mut edges: Vec<Vec<(usize, Micros)>> = vec![Vec::new(); n_nodes];
        let add = |edges: &mut Vec<Vec<(usize, Micros)>>, u: usize, v: usize, w: Micros| {
            edges[u].push((v, w));
        };

        for (ti, train) in self.trains.iter().enumerate() {
            let t = TrainIdx(ti as u32);
            for (k, &platform) in train.path_platforms.iter().enumerate() {
                let dwell = self.dwell_windows.get(&(t, platform))?;
                add(
                    &mut edges,
                    arr(&offsets, t, k),
                    dep(&offsets, t, k),
                    dwell.ub_interval.0,
                );
            }
            for (k, &track) in train.path_tracks.iter().enumerate() {
                let trip = self.trip_windows.get(&(t, track))?;
                add(
                    &mut edges,
                    dep(&offsets, t, k),
                    arr(&offsets, t, k + 1),
                    trip.ub_interval.0,
                );
            }
        }
        for crossover in &self.network.crossovers {
            for pair in &crossover.turnaround_pairs {
                let from_train = self.train(pair.from_train);
                let to_train = self.train(pair.to_train);
                let from_pos = from_train.path_position(crossover.from)?;
                let to_pos = to_train.path_position(crossover.to)?;
                add(
                    &mut edges,
                    dep(&offsets, pair.from_train, from_pos),
                    arr(&offsets, pair.to_train, to_pos),
                    pair.window.ub_interval.0,
                );
            }
        }
        for hw in &self.headways {
            let track = self.network.track(hw.track);
            let first = self.train(hw.first);
            let second = self.train(hw.second);
            let from_first = first.path_position(track.from)?;
            let from_second = second.path_position(track.from)?;
            let to_first = first.path_position(track.to)?;
            let to_second = second.path_position(track.to)?;
            add(
                &mut edges,
                dep(&offsets, hw.first, from_first),
                dep(&offsets, hw.second, from_second),
                hw.headway_from,
            );
            add(
                &mut edges,
                dep(&offsets, hw.first, to_first),
                dep(&offsets, hw.second, to_second),
                hw.headway_to,
            );
        }

        // Longest path via Kahn's algorithm; all sources start at zero.
        let mut indegree = vec![0usize; n_nodes];
        for outs in &edges {
            for &(v, _) in outs {
                indegree[v] += 1;
            }
        }
        let mut time = vec![Micros::ZERO; n_nodes];
        let mut queue: Vec<usize> = (0..n_nodes).filter(|&u| indegree[u] == 0).collect();
        let mut visited = 0usize;
        while let Some(u) = queue.pop() {
            visited += 1;
            for &(v, w) in &edges[u] {
                if time[u] + w > time[v] {
                    time[v] = time[u] + w;
                }
                indegree[v] -= 1;
                if indegree[v] == 0 {
                    queue.push(v);
                }
            }
        }
        if visited != n_nodes {
            return None; // cyclic precedence
        }
        time.into_iter().max()
    }
}
