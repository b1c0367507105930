//! Railway network, trains, time windows, and timetables.

mod audit;
mod instance;
mod network;
mod timetable;
mod validate;

pub use audit::{audit_timetable, AuditEntry, AuditError, AuditReport};
pub use instance::{Connection, HeadwayPair, Instance, PhysicsParams, Train, TurnaroundPair};
pub use network::{CrossOver, Network, Platform, Track};
pub use timetable::Timetable;
pub use validate::{validate_instance, Violation};

/// Index of a platform in [`Network::platforms`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PlatformIdx(pub u32);

/// Index of a track in [`Network::tracks`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TrackIdx(pub u32);

/// Index of a train in [`Instance::trains`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TrainIdx(pub u32);

impl PlatformIdx {
    pub fn get(self) -> usize {
        self.0 as usize
    }
}

impl TrackIdx {
    pub fn get(self) -> usize {
        self.0 as usize
    }
}

impl TrainIdx {
    pub fn get(self) -> usize {
        self.0 as usize
    }
}

/// Constraint families of the timetable model. `HypoRight`/`HypoLeft` tag the
/// hypograph rows that linearize the overlap terms; the rest are the
/// operational families shared by the audit and the LP builder.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ConstraintFamily {
    Track,
    Cross,
    Dwell,
    Connect,
    Headway,
    Travel,
    Domain,
    HypoRight,
    HypoLeft,
}

impl ConstraintFamily {
    pub const OPERATIONAL: [ConstraintFamily; 7] = [
        ConstraintFamily::Track,
        ConstraintFamily::Cross,
        ConstraintFamily::Dwell,
        ConstraintFamily::Connect,
        ConstraintFamily::Headway,
        ConstraintFamily::Travel,
        ConstraintFamily::Domain,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            ConstraintFamily::Track => "TRACK",
            ConstraintFamily::Cross => "CROSS",
            ConstraintFamily::Dwell => "DWELL",
            ConstraintFamily::Connect => "CONNECT",
            ConstraintFamily::Headway => "HEADWAY",
            ConstraintFamily::Travel => "TRAVEL",
            ConstraintFamily::Domain => "DOMAIN",
            ConstraintFamily::HypoRight => "HYPO_R",
            ConstraintFamily::HypoLeft => "HYPO_L",
        }
    }
}

impl std::fmt::Display for ConstraintFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.tag())
    }
}
