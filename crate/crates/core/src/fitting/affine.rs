//! Straight-line least squares, unconstrained and nonnegative.

use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Error, PartialEq)]
pub enum FitError {
    #[error("DEGENERATE_SAMPLES: need at least two samples with distinct x values")]
    DegenerateSamples,
    #[error("MISSING_SAMPLES: no oracle samples for {key}")]
    MissingSamples { key: String },
}

/// An affine surrogate `y ≈ slope·x + intercept` with its fit quality.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AffineFit<S> {
    pub slope: S,
    pub intercept: S,
    pub residual_rms: S,
    pub n_samples: usize,
}

impl<S: Scalar> AffineFit<S> {
    pub fn eval(&self, x: S) -> S {
        self.slope * x + self.intercept
    }
}

fn check_samples<S: Scalar>(samples: &[(S, S)]) -> Result<(), FitError> {
    if samples.len() < 2 {
        return Err(FitError::DegenerateSamples);
    }
    let x0 = samples[0].0;
    if samples.iter().all(|&(x, _)| x == x0) {
        return Err(FitError::DegenerateSamples);
    }
    Ok(())
}

fn rms<S: Scalar>(samples: &[(S, S)], slope: S, intercept: S) -> S {
    let n = S::from_f64_lossy(samples.len() as f64);
    let sse: S = samples
        .iter()
        .map(|&(x, y)| {
            let r = y - slope * x - intercept;
            r * r
        })
        .sum();
    (sse / n).sqrt()
}

/// Ordinary least squares on `(x, y)` samples via the normal equations in
/// centered form.
pub fn fit_affine<S: Scalar>(samples: &[(S, S)]) -> Result<AffineFit<S>, FitError> {
    check_samples(samples)?;
    let n = S::from_f64_lossy(samples.len() as f64);
    let mean_x = samples.iter().map(|&(x, _)| x).sum::<S>() / n;
    let mean_y = samples.iter().map(|&(_, y)| y).sum::<S>() / n;
    let mut sxx = S::zero();
    let mut sxy = S::zero();
    for &(x, y) in samples {
        sxx += (x - mean_x) * (x - mean_x);
        sxy += (x - mean_x) * (y - mean_y);
    }
    if sxx <= S::zero() {
        return Err(FitError::DegenerateSamples);
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    Ok(AffineFit {
        slope,
        intercept,
        residual_rms: rms(samples, slope, intercept),
        n_samples: samples.len(),
    })
}

/// Least squares constrained to `slope ≥ 0` and `intercept ≥ 0`, solved by
/// enumerating the active-constraint cases (free, slope pinned, intercept
/// pinned, both pinned) and keeping the feasible case with least error.
pub fn fit_affine_nonneg<S: Scalar>(samples: &[(S, S)]) -> Result<AffineFit<S>, FitError> {
    check_samples(samples)?;
    let n = S::from_f64_lossy(samples.len() as f64);
    let mean_y = samples.iter().map(|&(_, y)| y).sum::<S>() / n;
    let sum_xx: S = samples.iter().map(|&(x, _)| x * x).sum();
    let sum_xy: S = samples.iter().map(|&(x, y)| x * y).sum();

    let mut candidates: Vec<(S, S)> = Vec::with_capacity(4);
    if let Ok(free) = fit_affine(samples) {
        if free.slope >= S::zero() && free.intercept >= S::zero() {
            candidates.push((free.slope, free.intercept));
        }
    }
    if mean_y >= S::zero() {
        candidates.push((S::zero(), mean_y));
    }
    if sum_xx > S::zero() {
        let slope = sum_xy / sum_xx;
        if slope >= S::zero() {
            candidates.push((slope, S::zero()));
        }
    }
    candidates.push((S::zero(), S::zero()));

    let (slope, intercept) = candidates
        .into_iter()
        .min_by(|&(s1, b1), &(s2, b2)| {
            rms(samples, s1, b1)
                .partial_cmp(&rms(samples, s2, b2))
                .expect("finite residuals")
        })
        .expect("at least the all-zero candidate");
    Ok(AffineFit {
        slope,
        intercept,
        residual_rms: rms(samples, slope, intercept),
        n_samples: samples.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line_recovered_with_zero_residual() {
        let samples: [(f64, f64); 3] = [(100.0, 50.0), (110.0, 45.0), (120.0, 40.0)];
        let fit = fit_affine(&samples).unwrap();
        assert!((fit.slope + 0.5).abs() < 1e-12);
        assert!((fit.intercept - 100.0).abs() < 1e-10);
        assert!(fit.residual_rms < 1e-10);
    }

    #[test]
    fn constant_data_has_zero_slope() {
        let samples = [(0.0, 7.5), (1.0, 7.5)];
        let fit = fit_affine(&samples).unwrap();
        assert_eq!(fit.slope, 0.0);
        assert_eq!(fit.intercept, 7.5);
    }

    #[test]
    fn single_sample_is_degenerate() {
        assert_eq!(
            fit_affine(&[(1.0, 2.0)]).unwrap_err(),
            FitError::DegenerateSamples
        );
        assert_eq!(
            fit_affine(&[(1.0, 2.0), (1.0, 3.0)]).unwrap_err(),
            FitError::DegenerateSamples
        );
    }

    #[test]
    fn nonneg_on_positive_line_matches_unconstrained() {
        let samples: Vec<(f64, f64)> = (0..10).map(|i| (i as f64, 0.4 * i as f64 + 2.0)).collect();
        let fit = fit_affine_nonneg(&samples).unwrap();
        assert!((fit.slope - 0.4).abs() < 1e-12);
        assert!((fit.intercept - 2.0).abs() < 1e-12);
    }

    #[test]
    fn nonneg_on_decreasing_line_pins_slope_to_zero() {
        let samples: Vec<(f64, f64)> =
            (0..11).map(|i| (100.0 + 2.0 * i as f64, 100.0 - 0.5 * (100.0 + 2.0 * i as f64))).collect();
        let fit = fit_affine_nonneg(&samples).unwrap();
        assert_eq!(fit.slope, 0.0);
        let mean_y: f64 = samples.iter().map(|&(_, y)| y).sum::<f64>() / samples.len() as f64;
        assert!((fit.intercept - mean_y).abs() < 1e-12);
        assert!((mean_y - 45.0).abs() < 1e-12);
    }

    #[test]
    fn nonneg_with_negative_mean_pins_both_to_zero() {
        let samples = [(1.0, -5.0), (2.0, -6.0), (3.0, -7.0)];
        let fit = fit_affine_nonneg(&samples).unwrap();
        assert_eq!(fit.slope, 0.0);
        assert_eq!(fit.intercept, 0.0);
    }

    #[test]
    fn works_in_f32_too() {
        let samples: [(f32, f32); 3] = [(1.0, 3.0), (2.0, 5.0), (3.0, 7.0)];
        let fit = fit_affine(&samples).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-5);
        assert!((fit.intercept - 1.0).abs() < 1e-5);
    }
}
