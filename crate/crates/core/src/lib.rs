//! Energy-aware metro timetable optimization.
//!
//! The toolkit models a metro network's operational constraints as a single
//! linear program whose objective is the predicted effective energy
//! consumption: affine surrogates map trip times to traction energy and
//! event overlap times to regenerative transfer, and hypograph rows make the
//! concave overlap terms linear. A built-in kinematics oracle generates the
//! surrogate training data and cross-validates the optimizer's predictions.
//!
//! Numeric kernels (fitting, kinematics, overlap evaluation) are generic
//! over the scalar type via [`scalar::Scalar`]; the pipeline instantiates
//! them at [`Real`]. Event times and windows are exact integer microseconds
//! ([`time::Micros`]) so feasibility audits are free of float comparisons.

pub mod fitting;
pub mod io;
pub mod kinematics;
pub mod lp;
pub mod model;
pub mod pairing;
pub mod report;
pub mod scalar;
pub mod scenario;
pub mod solver;
pub mod time;

pub use scalar::Scalar;
pub use time::{Micros, TimeWindow, UncertainWindow};

/// Scalar type used by the solver pipeline.
pub type Real = f64;

/// Concrete instantiations of the generic numeric types at [`Real`].
pub type AffineFit = fitting::AffineFit<Real>;
pub type FitBundle = fitting::FitBundle<Real>;
pub type SampleSet = fitting::SampleSet<Real>;
pub type SpeedProfile = kinematics::SpeedProfile<Real>;
pub type PowerProfile = kinematics::PowerProfile<Real>;
pub type PowerSegment = kinematics::PowerSegment<Real>;
pub type FwhmRect = kinematics::FwhmRect<Real>;
pub type TripSample = kinematics::TripSample<Real>;
