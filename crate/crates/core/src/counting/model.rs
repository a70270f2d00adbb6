use super::CountingError;

/// Pair source and detection chain. Times in ns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceModel {
    /// Mean pair number per pulse.
    pub mu: f64,
    pub eta_s: f64,
    pub eta_i: f64,
    /// Background click probability per trial over the record window.
    pub noise_s: f64,
    pub noise_i: f64,
    /// Fraction of atoms prepared in |1⟩, in [0.5, 1].
    pub purity: f64,
    /// Mean exponential delay of the idler after its signal.
    pub cascade_lag: f64,
    /// Gaussian timing spread on every detection.
    pub jitter: f64,
    /// Signal emission times are uniform over [-w/2, w/2].
    pub emission_window: f64,
    /// Background clicks are uniform over this interval.
    pub record_window: (f64, f64),
    /// Independent thermal modes sharing the pair number.
    pub schmidt_modes: u32,
}

impl Default for SourceModel {
    fn default() -> Self {
        Self {
            mu: 0.01,
            eta_s: 0.055,
            eta_i: 0.055,
            noise_s: 0.0,
            noise_i: 0.0,
            purity: 1.0,
            cascade_lag: 0.0,
            jitter: 0.0,
            emission_window: 2.0,
            record_window: (-4.5, 4.5),
            schmidt_modes: 1,
        }
    }
}

impl SourceModel {
    /// Lossless, noiseless, pure source with the given pair mean.
    pub fn ideal(mu: f64) -> Self {
        Self { mu, eta_s: 1.0, eta_i: 1.0, ..Self::default() }
    }

    pub fn validated(self) -> Result<Self, CountingError> {
        let fields = [
            ("mu", self.mu),
            ("eta_s", self.eta_s),
            ("eta_i", self.eta_i),
            ("noise_s", self.noise_s),
            ("noise_i", self.noise_i),
            ("purity", self.purity),
            ("cascade_lag", self.cascade_lag),
            ("jitter", self.jitter),
            ("emission_window", self.emission_window),
            ("record_window.start", self.record_window.0),
            ("record_window.end", self.record_window.1),
        ];
        for (name, v) in fields {
            if !v.is_finite() {
                return Err(CountingError::NonFinite(name));
            }
        }
        let unit = |name, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(CountingError::OutOfRange { name, value: v, range: "[0, 1]" })
            }
        };
        unit("eta_s", self.eta_s)?;
        unit("eta_i", self.eta_i)?;
        unit("noise_s", self.noise_s)?;
        unit("noise_i", self.noise_i)?;
        let nonneg = |name, v: f64| {
            if v >= 0.0 {
                Ok(())
            } else {
                Err(CountingError::OutOfRange { name, value: v, range: "[0, ∞)" })
            }
        };
        nonneg("mu", self.mu)?;
        nonneg("cascade_lag", self.cascade_lag)?;
        nonneg("jitter", self.jitter)?;
        nonneg("emission_window", self.emission_window)?;
        if !(0.5..=1.0).contains(&self.purity) {
            return Err(CountingError::OutOfRange { name: "purity", value: self.purity, range: "[0.5, 1]" });
        }
        if self.record_window.1 <= self.record_window.0 {
            return Err(CountingError::OutOfRange {
                name: "record_window.end",
                value: self.record_window.1,
                range: "(record_window.start, ∞)",
            });
        }
        if self.schmidt_modes == 0 {
            return Err(CountingError::OutOfRange { name: "schmidt_modes", value: 0.0, range: "[1, ∞)" });
        }
        Ok(self)
    }

    /// Mean of the correlated pair source.
    pub fn correlated_mean(&self) -> f64 {
        self.mu * (2.0 * self.purity - 1.0)
    }

    /// Mean of each of the two independent single-arm sources.
    pub fn uncorrelated_mean(&self) -> f64 {
        self.mu * (1.0 - self.purity)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        assert!(SourceModel::default().validated().is_ok());
        assert!(SourceModel::ideal(0.01).validated().is_ok());
    }

    #[test]
    fn rejects_bad_fields() {
        let base = SourceModel::default();
        let bad = [
            SourceModel { mu: -1.0, ..base },
            SourceModel { eta_s: 1.5, ..base },
            SourceModel { noise_i: -0.1, ..base },
            SourceModel { purity: 0.4, ..base },
            SourceModel { cascade_lag: f64::NAN, ..base },
            SourceModel { record_window: (1.0, 1.0), ..base },
            SourceModel { schmidt_modes: 0, ..base },
        ];
        for m in bad {
            assert!(m.validated().is_err(), "{m:?}");
        }
    }

    #[test]
    fn source_split() {
        let m = SourceModel { mu: 0.2, purity: 0.9, ..SourceModel::default() };
        assert!((m.correlated_mean() - 0.16).abs() < 1e-15);
        assert!((m.uncorrelated_mean() - 0.02).abs() < 1e-15);
    }
}
