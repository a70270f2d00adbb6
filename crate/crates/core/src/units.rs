//! Unit conversions between human units (GHz, MHz) and internal rad/ns.

use std::f64::consts::TAU;

/// Cesium 6S₁/₂ hyperfine splitting, 9.19 GHz.
pub const CS_GROUND_SPLITTING_GHZ: f64 = 9.19;

/// Converts an ordinary frequency in GHz to angular frequency in rad/ns.
#[inline]
pub fn ghz(f: f64) -> f64 {
    TAU * f
}

/// Converts an ordinary frequency in MHz to angular frequency in rad/ns.
#[inline]
pub fn mhz(f: f64) -> f64 {
    TAU * f * 1e-3
}

/// Converts an angular frequency in rad/ns to GHz.
#[inline]
pub fn to_ghz(w: f64) -> f64 {
    w / TAU
}

/// Converts an angular frequency in rad/ns to MHz.
#[inline]
pub fn to_mhz(w: f64) -> f64 {
    w / TAU * 1e3
}
