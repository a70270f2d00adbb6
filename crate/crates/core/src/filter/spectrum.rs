use super::{check_finite, FilterError};

/// Samples on a uniform frequency grid (rad/ns).
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumGrid {
    start: f64,
    step: f64,
    values: Vec<f64>,
}

impl SpectrumGrid {
    pub fn new(start: f64, step: f64, values: Vec<f64>) -> Result<Self, FilterError> {
        check_finite("start", start)?;
        check_finite("step", step)?;
        if step <= 0.0 {
            return Err(FilterError::OutOfRange { name: "step", value: step, range: "(0, ∞)" });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(FilterError::NonFinite("values"));
        }
        Ok(Self { start, step, values })
    }

    /// `points` samples with index `points / 2` exactly at `center`.
    pub fn centered(points: usize, step: f64, center: f64) -> Result<Self, FilterError> {
        let start = center - (points / 2) as f64 * step;
        Self::new(start, step, vec![0.0; points])
    }

    /// Grid of `points` samples around `center`, filled from `f(frequency)`.
    pub fn from_fn(
        points: usize,
        step: f64,
        center: f64,
        f: impl Fn(f64) -> f64,
    ) -> Result<Self, FilterError> {
        let mut g = Self::centered(points, step, center)?;
        for i in 0..points {
            g.values[i] = f(g.frequency(i));
        }
        if g.values.iter().any(|v| !v.is_finite()) {
            return Err(FilterError::NonFinite("values"));
        }
        Ok(g)
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn frequency(&self, i: usize) -> f64 {
        self.start + i as f64 * self.step
    }

    pub fn frequencies(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(|i| self.frequency(i))
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Same grid, new samples.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self, FilterError> {
        if values.len() != self.len() {
            return Err(FilterError::GridMismatch(format!(
                "{} samples for a {}-point grid",
                values.len(),
                self.len()
            )));
        }
        Self::new(self.start, self.step, values)
    }

    pub fn map(&self, mut f: impl FnMut(f64) -> f64) -> Self {
        Self { values: self.values.iter().map(|&v| f(v)).collect(), ..self.clone() }
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Rectangle-rule integral.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.step
    }

    pub(crate) fn check_same_spacing(&self, other: &Self) -> Result<(), FilterError> {
        if self.len() != other.len() {
            return Err(FilterError::GridMismatch(format!(
                "{} vs {} points",
                self.len(),
                other.len()
            )));
        }
        if (self.step - other.step).abs() > 1e-9 * self.step {
            return Err(FilterError::GridMismatch(format!(
                "step {} vs {}",
                self.step, other.step
            )));
        }
        Ok(())
    }
}

/// Width at half of the global maximum, with linear interpolation between
/// the samples straddling each crossing.
pub fn fwhm(spectrum: &SpectrumGrid) -> Result<f64, FilterError> {
    let v = spectrum.values();
    let (imax, &vmax) = v
        .iter()
        .enumerate()
        .fold((0, &f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
    if v.is_empty() || vmax <= 0.0 {
        return Err(FilterError::Flat);
    }
    let half = 0.5 * vmax;
    let mut l = imax;
    while l > 0 && v[l - 1] >= half {
        l -= 1;
    }
    if l == 0 {
        return Err(FilterError::NoHalfCrossing("low"));
    }
    let mut r = imax;
    while r + 1 < v.len() && v[r + 1] >= half {
        r += 1;
    }
    if r + 1 == v.len() {
        return Err(FilterError::NoHalfCrossing("high"));
    }
    if v[..l].iter().chain(&v[r + 1..]).any(|&x| x >= half) {
        return Err(FilterError::MultiLobed);
    }
    // v[l-1] < half <= v[l], v[r] >= half > v[r+1]
    let xl = (l - 1) as f64 + (half - v[l - 1]) / (v[l] - v[l - 1]);
    let xr = r as f64 + (v[r] - half) / (v[r] - v[r + 1]);
    Ok((xr - xl) * spectrum.step())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PulseShape {
    Square,
    /// Gaussian field envelope whose intensity FWHM equals the duration.
    Gaussian,
}

impl std::str::FromStr for PulseShape {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "square" => Ok(Self::Square),
            "gaussian" => Ok(Self::Gaussian),
            _ => Err(format!("unknown pulse shape {s:?} (square, gaussian)")),
        }
    }
}

/// |∫E(t)e^{iωt}dt|² of the pulse envelope, sampled on `points` angular
/// frequencies spaced by `step` around zero.
pub fn pulse_spectrum(
    duration: f64,
    shape: PulseShape,
    points: usize,
    step: f64,
) -> Result<SpectrumGrid, FilterError> {
    check_finite("duration", duration)?;
    if duration <= 0.0 {
        return Err(FilterError::OutOfRange { name: "duration", value: duration, range: "(0, ∞)" });
    }
    let t = duration;
    match shape {
        PulseShape::Square => SpectrumGrid::from_fn(points, step, 0.0, |w| {
            let x = 0.5 * w * t;
            let sinc = if x.abs() < 1e-12 { 1.0 } else { x.sin() / x };
            (t * sinc).powi(2)
        }),
        PulseShape::Gaussian => {
            let a = 2.0 * std::f64::consts::LN_2 / (t * t);
            SpectrumGrid::from_fn(points, step, 0.0, |w| {
                std::f64::consts::PI / a * (-w * w / (2.0 * a)).exp()
            })
        }
    }
}
