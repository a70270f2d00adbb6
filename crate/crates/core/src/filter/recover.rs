use num_complex::Complex64;
use rustfft::FftPlanner;

use super::{check_finite, FilterError, FilterStack, SpectrumGrid};

pub const DEFAULT_WIENER_EPSILON: f64 = 1e-3;

/// Stack window sampled at offsets from its center, on a grid with the
/// same length and spacing as `like` and zero offset at index `len / 2`.
pub fn stack_kernel(stack: &FilterStack, like: &SpectrumGrid) -> SpectrumGrid {
    let c = stack.center();
    SpectrumGrid::from_fn(like.len(), like.step(), 0.0, |d| stack.transmission(c + d))
        .expect("grid already validated")
}

fn fft(values: &[f64], inverse: bool) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft_in_place(&mut buf, inverse);
    buf
}

fn fft_in_place(buf: &mut [Complex64], inverse: bool) {
    let mut planner = FftPlanner::new();
    let plan = if inverse {
        planner.plan_fft_inverse(buf.len())
    } else {
        planner.plan_fft_forward(buf.len())
    };
    plan.process(buf);
}

/// Kernel spectrum with the zero-offset sample moved to index 0.
fn kernel_transform(kernel: &SpectrumGrid) -> Vec<Complex64> {
    let mut k = kernel.values().to_vec();
    k.rotate_left(kernel.len() / 2);
    fft(&k, false)
}

/// Circular scan of the window across `source`: out(ν) = Σ S(ν')·K(ν'−ν)·dν.
/// The window is symmetric, so this is also the convolution.
pub fn convolve_spectrum(source: &SpectrumGrid, stack: &FilterStack) -> SpectrumGrid {
    let n = source.len();
    if n == 0 {
        return source.clone();
    }
    let kernel = stack_kernel(stack, source);
    let kh = kernel_transform(&kernel);
    let mut buf = fft(source.values(), false);
    for (b, k) in buf.iter_mut().zip(&kh) {
        *b *= k;
    }
    fft_in_place(&mut buf, true);
    let scale = source.step() / n as f64;
    source
        .with_values(buf.iter().map(|c| c.re * scale).collect())
        .expect("same length")
}

/// Wiener deconvolution of a scan trace by a sampled window (zero offset at
/// index `len / 2`). Regularization is `epsilon` times the peak kernel power.
pub fn recover_with_kernel(
    trace: &SpectrumGrid,
    kernel: &SpectrumGrid,
    epsilon: f64,
) -> Result<SpectrumGrid, FilterError> {
    check_finite("epsilon", epsilon)?;
    if epsilon <= 0.0 {
        return Err(FilterError::OutOfRange { name: "epsilon", value: epsilon, range: "(0, ∞)" });
    }
    trace.check_same_spacing(kernel)?;
    let n = trace.len();
    if n == 0 {
        return Err(FilterError::GridMismatch("empty grid".into()));
    }
    let kh = kernel_transform(kernel);
    let pmax = kh.iter().map(|k| k.norm_sqr()).fold(0.0, f64::max);
    if pmax <= 0.0 {
        return Err(FilterError::Flat);
    }
    let reg = epsilon * pmax;
    let mut buf = fft(trace.values(), false);
    for (b, k) in buf.iter_mut().zip(&kh) {
        *b = *b * k.conj() / (k.norm_sqr() + reg);
    }
    fft_in_place(&mut buf, true);
    let scale = 1.0 / (n as f64 * trace.step());
    trace.with_values(buf.iter().map(|c| (c.re * scale).max(0.0)).collect())
}

/// Wiener deconvolution by the stack window sampled on the trace grid.
pub fn recover_spectrum(
    trace: &SpectrumGrid,
    stack: &FilterStack,
    epsilon: f64,
) -> Result<SpectrumGrid, FilterError> {
    recover_with_kernel(trace, &stack_kernel(stack, trace), epsilon)
}
