//! Event times and time windows.
//!
//! All times are integer microseconds from the start of the service period.
//! Instance files carry seconds as decimals; six decimal places scale
//! losslessly, so window arithmetic and feasibility audits are exact integer
//! comparisons with no float-equality traps.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::scalar::Scalar;

pub const MICROS_PER_SEC: i64 = 1_000_000;

/// A time instant or duration in integer microseconds.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Micros(pub i64);

impl Micros {
    pub const ZERO: Micros = Micros(0);

    pub fn from_secs(secs: i64) -> Micros {
        Micros(secs * MICROS_PER_SEC)
    }

    /// Rounds to the nearest microsecond. Exact for decimal inputs with at
    /// most six fractional digits, which is what the file formats emit.
    pub fn from_secs_f64(secs: f64) -> Micros {
        Micros((secs * MICROS_PER_SEC as f64).round() as i64)
    }

    pub fn as_secs_f64(self) -> f64 {
        self.0 as f64 / MICROS_PER_SEC as f64
    }

    pub fn as_scalar<S: Scalar>(self) -> S {
        S::from_f64_lossy(self.as_secs_f64())
    }

    pub fn abs(self) -> Micros {
        Micros(self.0.abs())
    }

    pub fn min(self, other: Micros) -> Micros {
        Micros(self.0.min(other.0))
    }

    pub fn max(self, other: Micros) -> Micros {
        Micros(self.0.max(other.0))
    }

    /// Midpoint, rounded toward negative infinity.
    pub fn midpoint(self, other: Micros) -> Micros {
        Micros((self.0 + other.0).div_euclid(2))
    }
}

impl fmt::Debug for Micros {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}s", self.as_secs_f64())
    }
}

impl fmt::Display for Micros {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_secs_f64())
    }
}

impl Add for Micros {
    type Output = Micros;
    fn add(self, rhs: Micros) -> Micros {
        Micros(self.0 + rhs.0)
    }
}

impl Sub for Micros {
    type Output = Micros;
    fn sub(self, rhs: Micros) -> Micros {
        Micros(self.0 - rhs.0)
    }
}

impl Neg for Micros {
    type Output = Micros;
    fn neg(self) -> Micros {
        Micros(-self.0)
    }
}

impl AddAssign for Micros {
    fn add_assign(&mut self, rhs: Micros) {
        self.0 += rhs.0;
    }
}

impl SubAssign for Micros {
    fn sub_assign(&mut self, rhs: Micros) {
        self.0 -= rhs.0;
    }
}

impl Mul<i64> for Micros {
    type Output = Micros;
    fn mul(self, rhs: i64) -> Micros {
        Micros(self.0 * rhs)
    }
}

impl Serialize for Micros {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_f64(self.as_secs_f64())
    }
}

impl<'de> Deserialize<'de> for Micros {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let secs = f64::deserialize(deserializer)?;
        if !secs.is_finite() {
            return Err(serde::de::Error::custom("time must be finite"));
        }
        Ok(Micros::from_secs_f64(secs))
    }
}

/// A closed time window `[lb, ub]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TimeWindow {
    pub lb: Micros,
    pub ub: Micros,
}

impl TimeWindow {
    pub fn new(lb: Micros, ub: Micros) -> TimeWindow {
        TimeWindow { lb, ub }
    }

    pub fn is_well_formed(&self) -> bool {
        self.lb <= self.ub
    }

    pub fn contains(&self, value: Micros) -> bool {
        self.lb <= value && value <= self.ub
    }

    pub fn width(&self) -> Micros {
        self.ub - self.lb
    }

    pub fn midpoint(&self) -> Micros {
        self.lb.midpoint(self.ub)
    }
}

/// A window whose bounds are themselves only known to lie in boxes:
/// `lb ∈ [lb_interval.0, lb_interval.1]` and `ub ∈ [ub_interval.0, ub_interval.1]`.
///
/// The robust counterpart keeps the constraint feasible for every realization
/// of the bounds, which tightens the window to `[lb_interval.1, ub_interval.0]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct UncertainWindow {
    pub lb_interval: (Micros, Micros),
    pub ub_interval: (Micros, Micros),
}

impl UncertainWindow {
    /// A window with no uncertainty in its bounds.
    pub fn exact(lb: Micros, ub: Micros) -> UncertainWindow {
        UncertainWindow {
            lb_interval: (lb, lb),
            ub_interval: (ub, ub),
        }
    }

    pub fn intervals_well_formed(&self) -> bool {
        self.lb_interval.0 <= self.lb_interval.1 && self.ub_interval.0 <= self.ub_interval.1
    }

    /// The tightened window that is feasible under every bound realization,
    /// or `None` when the worst-case bounds cross.
    pub fn robustified(&self) -> Option<TimeWindow> {
        let tw = TimeWindow::new(self.lb_interval.1, self.ub_interval.0);
        tw.is_well_formed().then_some(tw)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seconds_round_trip_is_lossless_at_micro_resolution() {
        for raw in [0.0, 2.5, 92.7, 30.000001, 86400.123456, -3.25] {
            let t = Micros::from_secs_f64(raw);
            assert_eq!(Micros::from_secs_f64(t.as_secs_f64()), t);
        }
        assert_eq!(Micros::from_secs_f64(92.7).0, 92_700_000);
    }

    #[test]
    fn robustified_window_uses_inner_bounds() {
        let w = UncertainWindow {
            lb_interval: (Micros::from_secs(28), Micros::from_secs(30)),
            ub_interval: (Micros::from_secs(34), Micros::from_secs(36)),
        };
        let tw = w.robustified().unwrap();
        assert_eq!(tw.lb, Micros::from_secs(30));
        assert_eq!(tw.ub, Micros::from_secs(34));
    }

    #[test]
    fn crossed_robust_window_is_empty() {
        let w = UncertainWindow {
            lb_interval: (Micros::from_secs(28), Micros::from_secs(35)),
            ub_interval: (Micros::from_secs(34), Micros::from_secs(36)),
        };
        assert!(w.robustified().is_none());
    }
}
