use super::{check_finite, FilterError};

/// One cavity: Lorentzian window of full width `fwhm` centered at `center`,
/// repeated every `fsr` (a single window when `fsr == 0`). All rad/ns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavitySpec {
    pub center: f64,
    pub fwhm: f64,
    pub fsr: f64,
    pub peak: f64,
}

impl CavitySpec {
    pub fn new(center: f64, fwhm: f64, fsr: f64, peak: f64) -> Result<Self, FilterError> {
        check_finite("center", center)?;
        check_finite("fwhm", fwhm)?;
        check_finite("fsr", fsr)?;
        check_finite("peak", peak)?;
        if fwhm <= 0.0 {
            return Err(FilterError::OutOfRange { name: "fwhm", value: fwhm, range: "(0, ∞)" });
        }
        if fsr < 0.0 {
            return Err(FilterError::OutOfRange { name: "fsr", value: fsr, range: "[0, ∞)" });
        }
        if fsr > 0.0 && fwhm >= fsr {
            return Err(FilterError::OutOfRange { name: "fwhm", value: fwhm, range: "(0, fsr)" });
        }
        if peak <= 0.0 || peak > 1.0 {
            return Err(FilterError::OutOfRange { name: "peak", value: peak, range: "(0, 1]" });
        }
        Ok(Self { center, fwhm, fsr, peak })
    }

    /// Detuning from the nearest window center.
    fn detuning(&self, nu: f64) -> f64 {
        let d = nu - self.center;
        if self.fsr > 0.0 {
            d - self.fsr * (d / self.fsr).round()
        } else {
            d
        }
    }

    pub fn transmission(&self, nu: f64) -> f64 {
        let x = 2.0 * self.detuning(nu) / self.fwhm;
        self.peak / (1.0 + x * x)
    }
}

/// An ordered cascade of cavities.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterStack {
    cavities: Vec<CavitySpec>,
}

impl FilterStack {
    pub fn new(cavities: Vec<CavitySpec>) -> Result<Self, FilterError> {
        if cavities.is_empty() {
            return Err(FilterError::EmptyStack);
        }
        Ok(Self { cavities })
    }

    pub fn cavities(&self) -> &[CavitySpec] {
        &self.cavities
    }

    /// Center of the first cavity; calibrated stacks share one center.
    pub fn center(&self) -> f64 {
        self.cavities[0].center
    }

    pub fn transmission(&self, nu: f64) -> f64 {
        self.cavities.iter().map(|c| c.transmission(nu)).product()
    }

    pub fn peak_transmission(&self) -> f64 {
        self.transmission(self.center())
    }

    /// Moves every cavity by the same amount so the stack is centered at `center`.
    pub fn recentered(&self, center: f64) -> Self {
        let shift = center - self.center();
        Self {
            cavities: self
                .cavities
                .iter()
                .map(|c| CavitySpec { center: c.center + shift, ..*c })
                .collect(),
        }
    }

    /// Full width at half of the peak transmission, found by bisection on
    /// each side of the center within half a free spectral range.
    pub fn measured_fwhm(&self) -> f64 {
        let center = self.center();
        let half = 0.5 * self.peak_transmission();
        let reach = self
            .cavities
            .iter()
            .filter(|c| c.fsr > 0.0)
            .map(|c| 0.5 * c.fsr)
            .fold(f64::INFINITY, f64::min)
            .min(1e3 * self.cavities.iter().map(|c| c.fwhm).fold(0.0, f64::max));
        let side = |sign: f64| {
            let (mut lo, mut hi) = (0.0, reach);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if self.transmission(center + sign * mid) > half {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            0.5 * (lo + hi)
        };
        side(1.0) + side(-1.0)
    }
}

pub fn transmission(stack: &FilterStack, nu: f64) -> f64 {
    stack.transmission(nu)
}

const MAX_BISECTION: usize = 200;

/// `n` identical cavities whose cascade has the requested total FWHM and
/// peak transmission.
pub fn calibrate_stack(
    n: usize,
    total_fwhm: f64,
    total_peak: f64,
    fsr: f64,
    center: f64,
) -> Result<FilterStack, FilterError> {
    check_finite("total_fwhm", total_fwhm)?;
    check_finite("total_peak", total_peak)?;
    check_finite("fsr", fsr)?;
    check_finite("center", center)?;
    if n == 0 {
        return Err(FilterError::EmptyStack);
    }
    if total_fwhm <= 0.0 {
        return Err(FilterError::OutOfRange { name: "total_fwhm", value: total_fwhm, range: "(0, ∞)" });
    }
    if total_peak <= 0.0 || total_peak > 1.0 {
        return Err(FilterError::OutOfRange { name: "total_peak", value: total_peak, range: "(0, 1]" });
    }
    if fsr < 0.0 || (fsr > 0.0 && total_fwhm >= 0.5 * fsr) {
        return Err(FilterError::OutOfRange { name: "fsr", value: fsr, range: "0 or > 2·total_fwhm" });
    }
    let peak = total_peak.powf(1.0 / n as f64);
    let build = |w: f64| FilterStack {
        cavities: vec![CavitySpec { center, fwhm: w, fsr, peak }; n],
    };
    // relative transmission at the target half width grows with the cavity width
    let excess = |w: f64| {
        let s = build(w);
        s.transmission(center + 0.5 * total_fwhm) / s.peak_transmission() - 0.5
    };
    let mut lo = 0.5 * total_fwhm;
    let mut hi = 1e3 * total_fwhm * n as f64;
    if fsr > 0.0 {
        hi = hi.min(fsr * (1.0 - 1e-12));
    }
    if excess(lo) > 0.0 || excess(hi) < 0.0 {
        return Err(FilterError::CalibrationDiverged(0));
    }
    for _ in 0..MAX_BISECTION {
        let mid = 0.5 * (lo + hi);
        if excess(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-14 * hi {
            return Ok(build(0.5 * (lo + hi)));
        }
    }
    Err(FilterError::CalibrationDiverged(MAX_BISECTION))
}
