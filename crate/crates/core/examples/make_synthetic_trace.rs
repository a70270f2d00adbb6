//! Writes the synthetic detuning-scan trace used by the fig3 `recover` run:
//! a 590 MHz Gaussian line scanned by the calibrated signal stack over one
//! free spectral range, so adjacent orders do not alias into the scan.
//!
//! cargo run -p multifield --example make_synthetic_trace -- configs/fig3_synthetic_trace.csv

use std::io::Write;

use multifield::filter::{calibrate_stack, convolve_spectrum, SpectrumGrid};
use multifield::units::{ghz, mhz, to_ghz};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args().nth(1).unwrap_or_else(|| "fig3_synthetic_trace.csv".into());
    let width = mhz(590.0);
    let sigma = width / (8.0 * std::f64::consts::LN_2).sqrt();
    let (fsr, step) = (14.0, 0.125);
    let points = (fsr / step) as usize;
    let source = SpectrumGrid::from_fn(points, ghz(step), 0.0, |x| (-0.5 * (x / sigma).powi(2)).exp())?;
    let stack = calibrate_stack(2, mhz(380.0), 0.7, ghz(fsr), 0.0)?;
    let trace = convolve_spectrum(&source, &stack);
    let peak = trace.max();
    let mut out = std::io::BufWriter::new(std::fs::File::create(&path)?);
    writeln!(out, "# synthetic trace: 590 MHz Gaussian source, 2 x 380 MHz / 0.7 stack, FSR 14 GHz, one FSR span")?;
    writeln!(out, "freq_GHz,value")?;
    for (nu, v) in trace.frequencies().zip(trace.values()) {
        writeln!(out, "{},{}", multifield::cli::fmt_f64(to_ghz(nu)), multifield::cli::fmt_f64(v / peak))?;
    }
    out.flush()?;
    println!("wrote {} samples to {path}", trace.len());
    Ok(())
}
