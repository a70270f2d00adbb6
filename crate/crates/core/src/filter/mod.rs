//! Cascaded-cavity filtering, detuning-scan convolution traces and spectrum
//! recovery.
//!
//! Each cavity is a Lorentzian window repeated every free spectral range.
//! A stack transmits the product of its members.

mod cavity;
mod recover;
mod spectrum;
mod sweep;

pub use cavity::{calibrate_stack, transmission, CavitySpec, FilterStack};
pub use recover::{
    convolve_spectrum, recover_spectrum, recover_with_kernel, stack_kernel, DEFAULT_WIENER_EPSILON,
};
pub use spectrum::{fwhm, pulse_spectrum, PulseShape, SpectrumGrid};
pub use sweep::{
    absolute_frequency, centered_stacks, convolution_sweep, coupling_frequency, local_maxima,
    ConvolutionTrace,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FilterError {
    #[error("{0} must be finite")]
    NonFinite(&'static str),
    #[error("{name} = {value} is outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },
    #[error("a filter stack needs at least one cavity")]
    EmptyStack,
    #[error("per-cavity width bisection did not converge in {0} iterations")]
    CalibrationDiverged(usize),
    #[error("convolution sweep is empty")]
    EmptySweep,
    #[error("spectrum grids differ: {0}")]
    GridMismatch(String),
    #[error("no half-maximum crossing on the {0} side of the peak")]
    NoHalfCrossing(&'static str),
    #[error("spectrum has a second lobe above half maximum")]
    MultiLobed,
    #[error("spectrum has no positive maximum")]
    Flat,
}

pub(crate) fn check_finite(name: &'static str, x: f64) -> Result<f64, FilterError> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(FilterError::NonFinite(name))
    }
}
