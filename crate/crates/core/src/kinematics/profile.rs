//! Four-phase speed profiles with prescribed trip time and distance.

use thiserror::Error;

use crate::model::{PhysicsParams, Track};
use crate::scalar::Scalar;

use super::GRAVITY;

#[derive(Debug, Error, PartialEq)]
pub enum KinematicsError {
    #[error("INFEASIBLE_TRIP_TIME: trip time {trip_time_s}s outside feasible range [{min_s}s, {max_s}s]")]
    InfeasibleTripTime {
        trip_time_s: f64,
        min_s: f64,
        max_s: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PhaseKind {
    Accelerate,
    Hold,
    Coast,
    Brake,
}

/// One contiguous phase: time span and boundary speeds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Phase<S> {
    pub kind: PhaseKind,
    pub start: S,
    pub end: S,
    pub v_start: S,
    pub v_end: S,
}

impl<S: Scalar> Phase<S> {
    pub fn duration(&self) -> S {
        self.end - self.start
    }
}

/// A speed profile over one track trip: contiguous phases from standstill to
/// standstill whose integrated distance equals the track length.
#[derive(Clone, Debug, PartialEq)]
pub struct SpeedProfile<S> {
    pub phases: Vec<Phase<S>>,
    pub trip_time: S,
    pub distance: S,
    /// Sampled (time, speed) pairs inside the coast phase; empty when the
    /// coast has zero length. Speeds elsewhere are piecewise linear.
    coast_curve: Vec<(S, S)>,
}

#[derive(Clone, Copy, Debug)]
pub struct ProfileOptions {
    /// Fraction of the slack beyond the minimum trip time spent coasting.
    pub coast_fraction: f64,
    /// Hard cap on accepted trip times, seconds.
    pub max_trip_s: f64,
}

impl Default for ProfileOptions {
    fn default() -> Self {
        ProfileOptions {
            coast_fraction: 0.0,
            max_trip_s: 3600.0,
        }
    }
}

/// Closed-form minimum feasible trip time for a track: bang-bang
/// accelerate/brake, with a speed-limited hold when the triangular peak
/// would exceed the limit.
pub fn minimum_trip_time(track: &Track, physics: &PhysicsParams) -> f64 {
    let a = physics.accel_max;
    let d = physics.decel_max.abs();
    let length = track.length;
    let v_peak = (2.0 * length * a * d / (a + d)).sqrt();
    if v_peak <= physics.speed_limit {
        v_peak * (1.0 / a + 1.0 / d)
    } else {
        let v = physics.speed_limit;
        length / v + v / 2.0 * (1.0 / a + 1.0 / d)
    }
}

pub fn build_speed_profile<S: Scalar>(
    track: &Track,
    trip_time_s: f64,
    physics: &PhysicsParams,
) -> Result<SpeedProfile<S>, KinematicsError> {
    build_speed_profile_with(track, trip_time_s, physics, &ProfileOptions::default())
}

/// Builds the accelerate / hold / coast / brake profile for the given trip
/// time. The cruise speed is found by bisection so the integrated distance
/// matches the track length; the coast length is a fixed fraction of the
/// slack beyond the minimum trip time.
pub fn build_speed_profile_with<S: Scalar>(
    track: &Track,
    trip_time_s: f64,
    physics: &PhysicsParams,
    options: &ProfileOptions,
) -> Result<SpeedProfile<S>, KinematicsError> {
    let t_min = minimum_trip_time(track, physics);
    if trip_time_s < t_min - 1e-9 || trip_time_s > options.max_trip_s {
        return Err(KinematicsError::InfeasibleTripTime {
            trip_time_s,
            min_s: t_min,
            max_s: options.max_trip_s,
        });
    }
    let trip_time_s = trip_time_s.max(t_min);

    let a = physics.accel_max;
    let d = physics.decel_max.abs();
    let length = track.length;
    let coast_t = options.coast_fraction.clamp(0.0, 1.0) * (trip_time_s - t_min);

    let v_cap = physics
        .speed_limit
        .min((2.0 * length * a * d / (a + d)).sqrt());

    // Distance covered at cruise speed v, minus the target length. Monotone
    // increasing in v over the feasible branch; +inf when the hold time would
    // be negative.
    let assemble = |v: f64| -> (f64, f64, f64, Vec<(f64, f64)>) {
        let t_acc = v / a;
        let d_acc = v * v / (2.0 * a);
        let (coast, v_end, d_coast) = integrate_coast(v, coast_t, track, physics);
        let t_brk = v_end / d;
        let d_brk = v_end * v_end / (2.0 * d);
        let t_hold = trip_time_s - t_acc - coast_t - t_brk;
        let d_hold = v * t_hold;
        (t_hold, d_acc + d_hold + d_coast + d_brk, v_end, coast)
    };
    let residual = |v: f64| -> f64 {
        let (t_hold, dist, _, _) = assemble(v);
        if t_hold < -1e-9 {
            f64::INFINITY
        } else {
            dist - length
        }
    };

    // At the exact minimum the residual is tangent to zero in the cruise
    // speed (double root), which defeats bisection; the time-optimal cruise
    // is the cap itself.
    let v_cruise = if trip_time_s <= t_min + 1e-9 {
        v_cap
    } else {
        let mut lo = 1e-6;
        let mut hi = v_cap;
        if residual(hi) < 0.0 {
            // Even the fastest admissible cruise cannot cover the distance
            // within the requested time.
            return Err(KinematicsError::InfeasibleTripTime {
                trip_time_s,
                min_s: t_min,
                max_s: options.max_trip_s,
            });
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if residual(mid) >= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo < 1e-12 * v_cap.max(1.0) {
                break;
            }
        }
        hi
    };
    let (t_hold, _, v_coast_end, coast) = assemble(v_cruise);
    let t_hold = t_hold.max(0.0);

    let t_acc = v_cruise / a;
    let t1 = t_acc;
    let t2 = t1 + t_hold;
    let t3 = t2 + coast_t;
    let t4 = trip_time_s;

    let s = S::from_f64_lossy;
    let phases = vec![
        Phase {
            kind: PhaseKind::Accelerate,
            start: s(0.0),
            end: s(t1),
            v_start: s(0.0),
            v_end: s(v_cruise),
        },
        Phase {
            kind: PhaseKind::Hold,
            start: s(t1),
            end: s(t2),
            v_start: s(v_cruise),
            v_end: s(v_cruise),
        },
        Phase {
            kind: PhaseKind::Coast,
            start: s(t2),
            end: s(t3),
            v_start: s(v_cruise),
            v_end: s(v_coast_end),
        },
        Phase {
            kind: PhaseKind::Brake,
            start: s(t3),
            end: s(t4),
            v_start: s(v_coast_end),
            v_end: s(0.0),
        },
    ];
    let coast_curve = coast
        .into_iter()
        .map(|(t, v)| (s(t2 + t), s(v)))
        .collect();

    Ok(SpeedProfile {
        phases,
        trip_time: s(trip_time_s),
        distance: s(length),
        coast_curve,
    })
}

/// RK4 integration of the coast phase: `dv/dt = -(R(v)/m + g sin θ)`.
/// Returns (curve relative to coast start, end speed, distance).
fn integrate_coast(
    v0: f64,
    duration: f64,
    track: &Track,
    physics: &PhysicsParams,
) -> (Vec<(f64, f64)>, f64, f64) {
    if duration <= 0.0 {
        return (Vec::new(), v0, 0.0);
    }
    let grade = (track.grade.to_radians()).sin();
    let decel = |v: f64| -(physics.resistance(v.max(0.0)) / physics.train_mass + GRAVITY * grade);
    let n = ((duration / 0.02).ceil() as usize).max(2);
    let h = duration / n as f64;
    let mut curve = Vec::with_capacity(n + 1);
    let mut v = v0;
    let mut dist = 0.0;
    curve.push((0.0, v));
    for i in 0..n {
        let k1 = decel(v);
        let k2 = decel(v + 0.5 * h * k1);
        let k3 = decel(v + 0.5 * h * k2);
        let k4 = decel(v + h * k3);
        let v_next = (v + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)).max(0.0);
        dist += 0.5 * h * (v + v_next);
        v = v_next;
        curve.push((h * (i + 1) as f64, v));
    }
    (curve, v, dist)
}

impl<S: Scalar> SpeedProfile<S> {
    pub fn phase_at(&self, t: S) -> &Phase<S> {
        for (k, phase) in self.phases.iter().enumerate() {
            if t < phase.end || k + 1 == self.phases.len() {
                return phase;
            }
        }
        self.phases.last().expect("profiles have phases")
    }

    pub fn speed_at(&self, t: S) -> S {
        let zero = S::zero();
        if t <= zero {
            return zero;
        }
        if t >= self.trip_time {
            return zero;
        }
        let phase = self.phase_at(t);
        match phase.kind {
            PhaseKind::Accelerate | PhaseKind::Brake | PhaseKind::Hold => {
                let dur = phase.duration();
                if dur <= zero {
                    return phase.v_start;
                }
                let frac = (t - phase.start) / dur;
                phase.v_start + (phase.v_end - phase.v_start) * frac
            }
            PhaseKind::Coast => self.coast_speed_at(t),
        }
    }

    fn coast_speed_at(&self, t: S) -> S {
        let curve = &self.coast_curve;
        if curve.is_empty() {
            return self.phases[2].v_start;
        }
        if t <= curve[0].0 {
            return curve[0].1;
        }
        if t >= curve[curve.len() - 1].0 {
            return curve[curve.len() - 1].1;
        }
        let mut lo = 0usize;
        let mut hi = curve.len() - 1;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if curve[mid].0 <= t {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let (t0, v0) = curve[lo];
        let (t1, v1) = curve[hi];
        if t1 <= t0 {
            return v0;
        }
        v0 + (v1 - v0) * (t - t0) / (t1 - t0)
    }

    /// Signed acceleration at time `t`, by phase.
    pub fn accel_at(&self, t: S) -> S {
        let phase = self.phase_at(t);
        let dur = phase.duration();
        if dur <= S::zero() {
            return S::zero();
        }
        match phase.kind {
            PhaseKind::Hold => S::zero(),
            _ => (phase.v_end - phase.v_start) / dur,
        }
    }

    pub fn brake_start(&self) -> S {
        self.phases[3].start
    }

    /// Trapezoidal re-integration of the speed curve, phase by phase, for
    /// distance-closure checks.
    pub fn integrate_distance(&self, step: S) -> S {
        let mut total = S::zero();
        for phase in &self.phases {
            let dur = phase.duration();
            if dur <= S::zero() {
                continue;
            }
            let n = (dur / step).ceil().to_f64_lossy().max(1.0) as usize;
            let h = dur / S::from_f64_lossy(n as f64);
            let mut prev = self.speed_at_inclusive(phase.start, phase);
            for i in 1..=n {
                let t = phase.start + h * S::from_f64_lossy(i as f64);
                let v = if i == n {
                    self.speed_at_inclusive(phase.end, phase)
                } else {
                    self.speed_at(t)
                };
                total += (prev + v) * h / S::from_f64_lossy(2.0);
                prev = v;
            }
        }
        total
    }

    /// Speed at a phase boundary, attributed to the given phase (boundary
    /// speeds are continuous, so this only matters for exactness at `t = 0`
    /// and `t = trip_time`).
    fn speed_at_inclusive(&self, t: S, phase: &Phase<S>) -> S {
        if t <= phase.start {
            phase.v_start
        } else if t >= phase.end {
            phase.v_end
        } else {
            self.speed_at(t)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flat_track(length: f64) -> Track {
        Track {
            from: crate::model::PlatformIdx(0),
            to: crate::model::PlatformIdx(1),
            length,
            grade: 0.0,
        }
    }

    fn physics() -> PhysicsParams {
        PhysicsParams {
            accel_max: 1.04,
            decel_max: -0.8,
            eta_elec_to_kin: 0.9,
            eta_kin_to_regen: 0.76,
            transmission_loss: 0.1,
            train_mass: 220_000.0,
            davis_coeffs: (2500.0, 40.0, 6.0),
            speed_limit: 22.2,
        }
    }

    #[test]
    fn time_optimal_profile_has_zero_hold_and_coast() {
        // Speed limit lifted so the time-optimal profile is purely
        // triangular; a binding limit would force a hold at the cap.
        let track = flat_track(1400.0);
        let mut ph = physics();
        ph.speed_limit = 100.0;
        let t_min = minimum_trip_time(&track, &ph);
        let profile: SpeedProfile<f64> = build_speed_profile(&track, t_min, &ph).unwrap();
        assert!(profile.phases[1].duration() < 1e-6);
        assert!(profile.phases[2].duration() < 1e-6);
        let closure = (profile.integrate_distance(0.05) - 1400.0).abs() / 1400.0;
        assert!(closure < 1e-6, "closure {closure}");
    }

    #[test]
    fn speed_limited_minimum_holds_at_the_cap() {
        let track = flat_track(1400.0);
        let ph = physics();
        let t_min = minimum_trip_time(&track, &ph);
        let profile: SpeedProfile<f64> = build_speed_profile(&track, t_min, &ph).unwrap();
        assert!(profile.phases[1].duration() > 1.0);
        assert!((profile.phases[1].v_start - ph.speed_limit).abs() < 1e-6);
    }

    #[test]
    fn minimum_matches_two_phase_closed_form_without_speed_limit() {
        // Short track so the triangular peak stays below the limit.
        let track = flat_track(300.0);
        let mut ph = physics();
        ph.speed_limit = 100.0;
        let a = ph.accel_max;
        let d = ph.decel_max.abs();
        let expected = (2.0 * 300.0 * (a + d) / (a * d)).sqrt();
        assert!((minimum_trip_time(&track, &ph) - expected).abs() < 1e-6);
        // And the builder reproduces the distance at that trip time.
        let profile: SpeedProfile<f64> = build_speed_profile(&track, expected, &ph).unwrap();
        assert!((profile.integrate_distance(0.02) - 300.0).abs() / 300.0 < 1e-6);
    }

    #[test]
    fn slack_trip_time_integrates_to_track_length() {
        let track = flat_track(1400.0);
        let ph = physics();
        let t = minimum_trip_time(&track, &ph) + 20.0;
        let profile: SpeedProfile<f64> = build_speed_profile(&track, t, &ph).unwrap();
        assert_eq!(profile.trip_time, t);
        let closure = (profile.integrate_distance(0.05) - 1400.0).abs() / 1400.0;
        assert!(closure < 1e-6, "closure {closure}");
        assert!(profile.phases[1].duration() > 1.0);
    }

    #[test]
    fn below_minimum_is_infeasible() {
        let track = flat_track(1400.0);
        let ph = physics();
        let t_min = minimum_trip_time(&track, &ph);
        let err = build_speed_profile::<f64>(&track, t_min - 1.0, &ph).unwrap_err();
        assert!(matches!(err, KinematicsError::InfeasibleTripTime { .. }));
    }

    #[test]
    fn coast_fraction_produces_a_coasting_phase() {
        let track = flat_track(1400.0);
        let ph = physics();
        let t = minimum_trip_time(&track, &ph) + 30.0;
        let options = ProfileOptions {
            coast_fraction: 0.5,
            ..ProfileOptions::default()
        };
        let profile: SpeedProfile<f64> =
            build_speed_profile_with(&track, t, &ph, &options).unwrap();
        assert!((profile.phases[2].duration() - 15.0).abs() < 1e-9);
        // Coasting sheds speed.
        assert!(profile.phases[2].v_end < profile.phases[2].v_start);
        let closure = (profile.integrate_distance(0.05) - 1400.0).abs() / 1400.0;
        assert!(closure < 1e-6, "closure {closure}");
    }
}
