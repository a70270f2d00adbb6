use super::{FilterError, FilterStack};
use crate::emission::{EmissionSet, IDLER, SIGNAL};

/// Coupling-laser frequency in a lab frame whose origin is the |3⟩→|2⟩
/// transition. With `laser_tracking` the laser follows the scanned detuning,
/// otherwise it stays at `reference_delta23`.
pub fn coupling_frequency(delta23: f64, laser_tracking: bool, reference_delta23: f64) -> f64 {
    if laser_tracking {
        -delta23
    } else {
        -reference_delta23
    }
}

/// Lab-frame frequency of component `j` of `set`.
pub fn absolute_frequency(
    set: &EmissionSet,
    j: usize,
    laser_tracking: bool,
    reference_delta23: f64,
) -> f64 {
    coupling_frequency(set.delta23, laser_tracking, reference_delta23) + set.component(j).offset
}

/// Recenters the stacks on the signal and idler components of `reference`.
pub fn centered_stacks(
    reference: &EmissionSet,
    signal: &FilterStack,
    idler: &FilterStack,
) -> (FilterStack, FilterStack) {
    let d = reference.delta23;
    (
        signal.recentered(absolute_frequency(reference, SIGNAL, true, d)),
        idler.recentered(absolute_frequency(reference, IDLER, true, d)),
    )
}

/// Transmitted intensity per channel along a detuning scan.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvolutionTrace {
    pub delta23: Vec<f64>,
    pub signal: Vec<f64>,
    pub idler: Vec<f64>,
}

impl ConvolutionTrace {
    pub fn len(&self) -> usize {
        self.delta23.len()
    }

    pub fn is_empty(&self) -> bool {
        self.delta23.is_empty()
    }
}

/// trace(δ) = Σⱼ cⱼ|Dⱼ(δ)|²·T(ν_j(δ)) for each stack.
pub fn convolution_sweep(
    sweep: &[EmissionSet],
    signal_stack: &FilterStack,
    idler_stack: &FilterStack,
    laser_tracking: bool,
    reference_delta23: f64,
) -> Result<ConvolutionTrace, FilterError> {
    if sweep.is_empty() {
        return Err(FilterError::EmptySweep);
    }
    let through = |set: &EmissionSet, stack: &FilterStack| -> f64 {
        (1..=7)
            .map(|j| {
                set.intensity(j)
                    * stack.transmission(absolute_frequency(set, j, laser_tracking, reference_delta23))
            })
            .sum()
    };
    Ok(ConvolutionTrace {
        delta23: sweep.iter().map(|s| s.delta23).collect(),
        signal: sweep.iter().map(|s| through(s, signal_stack)).collect(),
        idler: sweep.iter().map(|s| through(s, idler_stack)).collect(),
    })
}

/// Interior strict local maxima (rising into the point, not rising after it)
/// above `threshold` times the global maximum.
pub fn local_maxima(values: &[f64], threshold: f64) -> Vec<usize> {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if values.len() < 3 || max <= 0.0 {
        return Vec::new();
    }
    (1..values.len() - 1)
        .filter(|&i| values[i] > values[i - 1] && values[i] >= values[i + 1])
        .filter(|&i| values[i] > threshold * max)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{DriveParams, LevelScheme};
    use crate::emission::{detuning_grid, detuning_sweep, CollectionFactors};
    use crate::filter::calibrate_stack;
    use crate::units::{ghz, mhz};

    fn stacks(reference: &EmissionSet) -> (FilterStack, FilterStack) {
        let s = calibrate_stack(2, mhz(380.0), 0.7, ghz(14.0), 0.0).unwrap();
        centered_stacks(reference, &s, &s)
    }

    fn sets(drive: &DriveParams, collection: &CollectionFactors, step: f64) -> Vec<EmissionSet> {
        let grid = detuning_grid(ghz(1.0), ghz(9.0), ghz(step), true).unwrap();
        detuning_sweep(&grid, &LevelScheme::cesium(ghz(4.0)).unwrap(), drive, collection)
            .into_iter()
            .map(|p| p.emission.unwrap())
            .collect()
    }

    #[test]
    fn stacks_pass_signal_and_idler_at_reference() {
        let drive = DriveParams::new(ghz(2.0), ghz(2.0), 2.0).unwrap();
        let c = CollectionFactors::default();
        let r = EmissionSet::compute(&LevelScheme::cesium(ghz(4.0)).unwrap(), &drive, &c).unwrap();
        let (s, i) = stacks(&r);
        assert!((s.transmission(absolute_frequency(&r, SIGNAL, true, r.delta23)) - 0.7).abs() < 1e-12);
        assert!((i.transmission(absolute_frequency(&r, IDLER, true, r.delta23)) - 0.7).abs() < 1e-12);
    }

    #[test]
    fn signal_peaks_at_reference_detuning() {
        let drive = DriveParams::new(ghz(2.0), ghz(2.0), 2.0).unwrap();
        let c = CollectionFactors::new([0.0, 1.0, 0.0, 0.0, 1.0, 1.0, 0.05]).unwrap();
        let sw = sets(&drive, &c, 0.02);
        let r = sw.iter().find(|s| s.delta23 == ghz(4.0)).unwrap();
        let (s, i) = stacks(r);
        let tr = convolution_sweep(&sw, &s, &i, true, ghz(4.0)).unwrap();
        let imax = (0..tr.len()).max_by(|&a, &b| tr.signal[a].total_cmp(&tr.signal[b])).unwrap();
        assert!((tr.delta23[imax] - ghz(4.0)).abs() < ghz(0.1));
        let jmax = (0..tr.len()).max_by(|&a, &b| tr.idler[a].total_cmp(&tr.idler[b])).unwrap();
        assert!((tr.delta23[jmax] - ghz(4.0)).abs() < ghz(0.1));
    }

    #[test]
    fn zero_drive_gives_zero_trace() {
        let drive = DriveParams::new(0.0, 0.0, 2.0).unwrap();
        let c = CollectionFactors::default();
        let sw = sets(&drive, &c, 0.5);
        let s = calibrate_stack(2, mhz(380.0), 0.7, ghz(14.0), 0.0).unwrap();
        let tr = convolution_sweep(&sw, &s, &s, true, ghz(4.0)).unwrap();
        assert!(tr.signal.iter().chain(&tr.idler).all(|&v| v == 0.0));
    }

    #[test]
    fn doubling_intensity_doubles_trace() {
        let drive = DriveParams::new(ghz(1.0), ghz(1.5), 2.0).unwrap();
        let c = CollectionFactors::default();
        let sw = sets(&drive, &c, 0.25);
        let doubled: Vec<EmissionSet> = sw
            .iter()
            .map(|s| {
                let mut d = *s;
                for comp in d.components.iter_mut() {
                    comp.amplitude *= std::f64::consts::SQRT_2;
                }
                d
            })
            .collect();
        let st = calibrate_stack(2, mhz(380.0), 0.7, ghz(14.0), ghz(-13.0)).unwrap();
        let a = convolution_sweep(&sw, &st, &st, true, ghz(4.0)).unwrap();
        let b = convolution_sweep(&doubled, &st, &st, true, ghz(4.0)).unwrap();
        for (x, y) in a.signal.iter().zip(&b.signal) {
            assert!((2.0 * x - y).abs() <= 1e-12 * y.abs().max(1e-300));
        }
    }

    #[test]
    fn fixed_laser_differs_from_tracking() {
        let drive = DriveParams::new(ghz(2.0), ghz(2.0), 2.0).unwrap();
        let c = CollectionFactors::default();
        let sw = sets(&drive, &c, 0.5);
        let r = sw.iter().find(|s| s.delta23 == ghz(4.0)).unwrap();
        let (s, i) = stacks(r);
        let a = convolution_sweep(&sw, &s, &i, true, ghz(4.0)).unwrap();
        let b = convolution_sweep(&sw, &s, &i, false, ghz(4.0)).unwrap();
        let k = sw.iter().position(|s| s.delta23 == ghz(4.0)).unwrap();
        assert!((a.signal[k] - b.signal[k]).abs() < 1e-12 * a.signal[k]);
        assert!(a.signal != b.signal);
    }

    #[test]
    fn empty_sweep_rejected() {
        let s = calibrate_stack(1, 1.0, 0.7, 0.0, 0.0).unwrap();
        assert_eq!(convolution_sweep(&[], &s, &s, true, 1.0), Err(FilterError::EmptySweep));
    }

    #[test]
    fn maxima_counting() {
        assert_eq!(local_maxima(&[0.0, 1.0, 0.0, 0.5, 0.0, 0.01, 0.0], 0.05), vec![1, 3]);
        assert!(local_maxima(&[1.0, 0.5, 0.2], 0.05).is_empty());
        assert!(local_maxima(&[0.0, 0.0, 0.0], 0.05).is_empty());
        assert_eq!(local_maxima(&[0.0, 1.0, 1.0, 0.0], 0.05), vec![1]);
    }
}
