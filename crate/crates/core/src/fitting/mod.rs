//! Affine surrogate fitting.
//!
//! Every surrogate in the model is a straight line fit by least squares:
//! consumed energy and phase boundaries against trip time, transferred
//! regenerative energy against overlap time (the latter with nonnegative
//! coefficients, solved by active-case enumeration).

mod affine;
mod bundle;

pub use affine::{fit_affine, fit_affine_nonneg, AffineFit, FitError};
pub use bundle::{fit_instance, generate_sample_set, FitBundle, PhaseFits, SampleError, SampleOptions, SampleSet};
