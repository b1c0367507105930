//! Exact overlap-transfer integrals between braking and accelerating pulses.

use crate::scalar::Scalar;

use super::power::FwhmRect;
use super::samples::joules_to_kwh;

/// A nonnegative power pulse sampled at a fixed step on its own local time
/// axis (departure-relative for traction, arrival-relative for braking).
#[derive(Clone, Debug, PartialEq)]
pub struct PowerSegment<S> {
    pub start: S,
    pub step: S,
    pub values: Vec<S>,
}

impl<S: Scalar> PowerSegment<S> {
    pub fn end(&self) -> S {
        if self.values.is_empty() {
            self.start
        } else {
            self.start + self.step * S::from_f64_lossy((self.values.len() - 1) as f64)
        }
    }

    /// Linear interpolation, zero outside the support.
    pub fn value_at(&self, t: S) -> S {
        if self.values.is_empty() {
            return S::zero();
        }
        let rel = (t - self.start) / self.step;
        if rel < S::zero() {
            return S::zero();
        }
        let idx = rel.floor().to_f64_lossy() as usize;
        if idx + 1 >= self.values.len() {
            return if idx + 1 == self.values.len() && rel <= S::from_f64_lossy(idx as f64) {
                self.values[idx]
            } else {
                S::zero()
            };
        }
        let frac = rel - S::from_f64_lossy(idx as f64);
        self.values[idx] + (self.values[idx + 1] - self.values[idx]) * frac
    }
}

/// Energy transferred from a braking train to an accelerating one:
/// the integral of `min(regen available, traction demand)` over time, with
/// the braking train's arrival shifted `time_shift` seconds after the
/// accelerating train's departure. Both pulses already carry their
/// efficiency and loss scaling. Returns kWh.
pub fn exact_overlap_regen<S: Scalar>(
    brake: &PowerSegment<S>,
    accel: &PowerSegment<S>,
    time_shift: S,
) -> S {
    if brake.values.is_empty() || accel.values.is_empty() {
        return S::zero();
    }
    // The overlapped support on the accelerating train's axis.
    let lo = accel.start.max(brake.start + time_shift);
    let hi = accel.end().min(brake.end() + time_shift);
    if hi <= lo {
        return S::zero();
    }
    // Integrate on a grid that subdivides both sample grids so kinks of the
    // min() land within one refined cell.
    let step = accel.step.min(brake.step) / S::from_f64_lossy(2.0);
    let n = ((hi - lo) / step).ceil().to_f64_lossy().max(1.0) as usize;
    let h = (hi - lo) / S::from_f64_lossy(n as f64);
    let eval = |t: S| accel.value_at(t).min(brake.value_at(t - time_shift));
    let mut joules = S::zero();
    let mut prev = eval(lo);
    for i in 1..=n {
        let t = lo + h * S::from_f64_lossy(i as f64);
        let cur = eval(t);
        joules += (prev + cur) * h / S::from_f64_lossy(2.0);
        prev = cur;
    }
    joules_to_kwh(joules)
}

/// One sweep point for the regen surrogate fit: the FWHM-window overlap time
/// used as the LP feature, and the exact transferred energy at that shift.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransferSample<S> {
    pub overlap_s: S,
    pub transferred_kwh: S,
}

/// Sweeps the braking train's arrival over shifts and records, per shift,
/// the rectangle-overlap time against the exact transfer integral.
///
/// The accelerating rectangle is departure-relative and the braking one is
/// arrival-relative, so under shift `τ` the rectangles overlap by
/// `min(accel.end, τ + brake.end) - max(accel.start, τ + brake.start)`.
pub fn sweep_transfer_samples<S: Scalar>(
    brake: &PowerSegment<S>,
    accel: &PowerSegment<S>,
    accel_rect: &FwhmRect<S>,
    brake_rect: &FwhmRect<S>,
    shifts: &[S],
) -> Vec<TransferSample<S>> {
    shifts
        .iter()
        .map(|&shift| {
            let overlap = (accel_rect.end_offset_s).min(shift + brake_rect.end_offset_s)
                - (accel_rect.start_offset_s).max(shift + brake_rect.start_offset_s);
            TransferSample {
                overlap_s: overlap,
                transferred_kwh: exact_overlap_regen(brake, accel, shift),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn segment(start: f64, step: f64, values: &[f64]) -> PowerSegment<f64> {
        PowerSegment {
            start,
            step,
            values: values.to_vec(),
        }
    }

    #[test]
    fn disjoint_supports_transfer_nothing() {
        let a = segment(0.0, 0.1, &[1.0; 11]);
        let b = segment(-1.0, 0.1, &[1.0; 11]);
        // Brake support [-1, 0] shifted far left of accel support [0, 1].
        assert_eq!(exact_overlap_regen(&b, &a, -5.0), 0.0);
    }

    #[test]
    fn identical_rectangles_at_zero_gap_transfer_height_times_width() {
        // Rectangles of height 2 W over 4 s. Brake axis [-4, 0], accel [0, 4],
        // so shift +4 superposes them exactly.
        let a = segment(0.0, 0.1, &vec![2.0; 41]);
        let b = segment(-4.0, 0.1, &vec![2.0; 41]);
        let kwh = exact_overlap_regen(&b, &a, 4.0);
        let expected = joules_to_kwh(2.0 * 4.0);
        assert!((kwh - expected).abs() < 1e-15);
    }

    #[test]
    fn triangle_against_rectangle_matches_piecewise_integral() {
        // Rectangle height 1 on [0, 4]; triangle peaking at 2 at t = 2 with
        // unit slopes on [0, 4], superposed. min is 1 on [1, 3] and the
        // triangle elsewhere: integral = 1 + 2 + 1 = 4... computed piecewise:
        // ∫0..1 t dt + ∫1..3 1 dt + ∫3..4 (4-t) dt = 0.5 + 2 + 0.5 = 3.
        let rect = segment(0.0, 0.1, &vec![1.0; 41]);
        let tri: Vec<f64> = (0..=40)
            .map(|i| {
                let t = i as f64 * 0.1;
                if t <= 2.0 {
                    t
                } else {
                    4.0 - t
                }
            })
            .collect();
        let brake = PowerSegment {
            start: -4.0,
            step: 0.1,
            values: tri,
        };
        let kwh = exact_overlap_regen(&brake, &rect, 4.0);
        let expected: f64 = joules_to_kwh(3.0);
        assert!((kwh - expected).abs() < 1e-6 * expected);
    }

    #[test]
    fn interpolation_is_zero_outside_support() {
        let seg = segment(1.0, 0.5, &[1.0, 2.0, 1.0]);
        assert_eq!(seg.value_at(0.9), 0.0);
        assert_eq!(seg.value_at(2.1), 0.0);
        assert!((seg.value_at(1.25) - 1.5).abs() < 1e-12);
    }
}
