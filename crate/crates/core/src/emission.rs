//! The seven interference emission components of the driven Λ system.
//!
//! The dipole expectation value ⟨ψ|ex|ψ⟩ oscillates at ω₀ plus the six
//! pairwise differences of the dressed eigenvalues, with relative amplitudes
//! Dⱼ built from the expansion coefficients G_mn. Components 2 and 6 are the
//! idler (anti-Stokes, ≈ +ω₃₁) and signal (Stokes, ≈ −ω₃₁) photons.

use rayon::prelude::*;

use crate::dynamics::{DressedSystem, DriveParams, DynamicsError, ExpansionCoefficients, LevelScheme};
use crate::units::ghz;

/// Coupling detunings shown in the emission figure, GHz.
pub const REFERENCE_DETUNINGS_GHZ: [f64; 4] = [1.62, 4.00, 6.40, 8.00];

/// Index of the idler component (1-based).
pub const IDLER: usize = 2;
/// Index of the signal component (1-based).
pub const SIGNAL: usize = 6;

/// Frequency offsets from ω₀ of components j = 1..7, in the same units as
/// the eigenvalues.
pub fn component_offsets(lambdas: [f64; 3]) -> [f64; 7] {
    let [l1, l2, l3] = lambdas;
    [l2 - l1, l3 - l1, l2 - l3, 0.0, l3 - l2, l1 - l3, l1 - l2]
}

/// Amplitudes D₁..D₇ from the expansion coefficients and the effective
/// dipoles d₁₂, d₃₂.
pub fn component_amplitudes(coeffs: &ExpansionCoefficients, d12: f64, d32: f64) -> [f64; 7] {
    let g = |m, n| coeffs.at(m, n);
    [
        d12 * g(1, 1) * g(2, 2) + d32 * g(3, 1) * g(2, 2),
        d12 * g(1, 1) * g(2, 3) + d32 * g(3, 1) * g(2, 3),
        d12 * g(1, 3) * g(2, 2) + d32 * g(3, 3) * g(2, 2),
        d12 * (g(1, 1) * g(2, 1) + g(1, 2) * g(2, 2) + g(1, 3) * g(2, 3))
            + d32 * (g(3, 1) * g(2, 1) + g(3, 2) * g(2, 2) + g(3, 3) * g(2, 3)),
        d12 * g(1, 2) * g(2, 3) + d32 * g(3, 2) * g(2, 3),
        d12 * g(1, 3) * g(2, 1) + d32 * g(3, 3) * g(2, 1),
        d12 * g(1, 2) * g(2, 1) + d32 * g(3, 2) * g(2, 1),
    ]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralComponent {
    /// 1..=7
    pub index: usize,
    /// rad/ns relative to ω₀
    pub offset: f64,
    pub amplitude: f64,
}

impl SpectralComponent {
    pub fn magnitude(&self) -> f64 {
        self.amplitude.abs()
    }
}

/// Per-component detection weights standing in for direction and
/// polarization selection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollectionFactors([f64; 7]);

impl Default for CollectionFactors {
    fn default() -> Self {
        Self([1.0; 7])
    }
}

impl CollectionFactors {
    pub fn new(factors: [f64; 7]) -> Result<Self, DynamicsError> {
        for &c in &factors {
            if !c.is_finite() || !(0.0..=1.0).contains(&c) {
                return Err(DynamicsError::OutOfRange {
                    name: "collection factor",
                    value: c,
                    range: "[0, 1]",
                });
            }
        }
        Ok(Self(factors))
    }

    /// Factor for component `j` (1-based).
    pub fn get(&self, j: usize) -> f64 {
        self.0[j - 1]
    }

    pub fn as_array(&self) -> [f64; 7] {
        self.0
    }
}

/// The seven components at one parameter point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmissionSet {
    pub components: [SpectralComponent; 7],
    /// max |Dⱼ|
    pub normalization: f64,
    /// max cⱼ|Dⱼ|²
    pub intensity_normalization: f64,
    pub collection: CollectionFactors,
    pub delta23: f64,
    pub omega12: f64,
    pub omega23: f64,
    pub gauge: f64,
}

impl EmissionSet {
    pub fn from_system(system: &DressedSystem, collection: &CollectionFactors) -> Self {
        let offsets = component_offsets(system.basis.lambdas);
        let amps = component_amplitudes(&system.coefficients, system.drive.d12, system.drive.d32);
        let components =
            std::array::from_fn(|i| SpectralComponent { index: i + 1, offset: offsets[i], amplitude: amps[i] });
        let normalization = amps.iter().fold(0.0f64, |a, d| a.max(d.abs()));
        let intensity_normalization = (1..=7)
            .map(|j| collection.get(j) * amps[j - 1].powi(2))
            .fold(0.0f64, f64::max);
        Self {
            components,
            normalization,
            intensity_normalization,
            collection: *collection,
            delta23: system.scheme.delta23(),
            omega12: system.drive.omega12,
            omega23: system.drive.omega23,
            gauge: system.scheme.gauge(),
        }
    }

    pub fn compute(
        scheme: &LevelScheme,
        drive: &DriveParams,
        collection: &CollectionFactors,
    ) -> Result<Self, DynamicsError> {
        Ok(Self::from_system(&DressedSystem::solve(scheme, drive)?, collection))
    }

    /// Component `j` (1-based).
    pub fn component(&self, j: usize) -> &SpectralComponent {
        &self.components[j - 1]
    }

    /// |Dⱼ| / max |D|; zero everywhere when the drive is off.
    pub fn normalized_magnitude(&self, j: usize) -> f64 {
        if self.normalization > 0.0 {
            self.component(j).magnitude() / self.normalization
        } else {
            0.0
        }
    }

    /// Detected intensity cⱼ|Dⱼ|² in arbitrary units.
    pub fn intensity(&self, j: usize) -> f64 {
        self.collection.get(j) * self.component(j).amplitude.powi(2)
    }

    pub fn normalized_intensity(&self, j: usize) -> f64 {
        if self.intensity_normalization > 0.0 {
            self.intensity(j) / self.intensity_normalization
        } else {
            0.0
        }
    }
}

/// Reference detunings in rad/ns.
pub fn reference_detunings() -> [f64; 4] {
    REFERENCE_DETUNINGS_GHZ.map(ghz)
}

/// Uniform detuning grid `start, start+step, ..., ≤ stop`, optionally merged
/// with the reference detunings. Points closer than 1e-6·step are merged,
/// keeping the reference value.
pub fn detuning_grid(
    start: f64,
    stop: f64,
    step: f64,
    include_reference: bool,
) -> Result<Vec<f64>, DynamicsError> {
    for (name, v) in [("grid start", start), ("grid stop", stop), ("grid step", step)] {
        if !v.is_finite() {
            return Err(DynamicsError::NonFinite(name));
        }
    }
    if start <= 0.0 {
        return Err(DynamicsError::OutOfRange { name: "grid start", value: start, range: "(0, ∞)" });
    }
    if stop < start {
        return Err(DynamicsError::OutOfRange { name: "grid stop", value: stop, range: "[start, ∞)" });
    }
    if step <= 0.0 {
        return Err(DynamicsError::OutOfRange { name: "grid step", value: step, range: "(0, ∞)" });
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    let mut grid: Vec<f64> = (0..=n).map(|i| start + step * i as f64).collect();
    if include_reference {
        let tol = 1e-6 * step;
        for r in reference_detunings() {
            match grid.iter_mut().find(|g| (**g - r).abs() < tol) {
                Some(g) => *g = r,
                None => grid.push(r),
            }
        }
        grid.sort_by(f64::total_cmp);
    }
    Ok(grid)
}

/// One point of a detuning sweep; a labeling failure stays local to its point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub delta23: f64,
    pub emission: Result<EmissionSet, DynamicsError>,
}

/// Solves the emission set at every coupling detuning of `grid`, keeping the
/// ground splitting and gauge of `template`. Output order matches the grid.
pub fn detuning_sweep(
    grid: &[f64],
    template: &LevelScheme,
    drive: &DriveParams,
    collection: &CollectionFactors,
) -> Vec<SweepPoint> {
    grid.par_iter()
        .map(|&delta23| SweepPoint {
            delta23,
            emission: template
                .with_delta23(delta23)
                .and_then(|scheme| EmissionSet::compute(&scheme, drive, collection)),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{amplitudes, DressedSystem};
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn set(d23: f64, o12: f64, o23: f64) -> EmissionSet {
        let scheme = LevelScheme::cesium(ghz(d23)).unwrap();
        let drive = DriveParams::new(ghz(o12), ghz(o23), 2.0).unwrap();
        EmissionSet::compute(&scheme, &drive, &CollectionFactors::default()).unwrap()
    }

    #[test]
    fn offsets_are_paired() {
        let o = component_offsets([-3.0, 1.5, 0.25]);
        assert_eq!(o[3], 0.0);
        for j in 0..3 {
            assert_eq!(o[j], -o[6 - j]);
        }
    }

    #[test]
    fn weak_coupling_offsets_sit_at_ground_splitting() {
        let e = set(4.0, 1e-4, 1e-4);
        assert!((e.component(SIGNAL).offset + ghz(9.19)).abs() < 1e-6);
        assert!((e.component(IDLER).offset - ghz(9.19)).abs() < 1e-6);
    }

    #[test]
    fn no_drive_no_dipole() {
        let e = set(4.0, 0.0, 0.0);
        assert!(e.components.iter().all(|c| c.amplitude == 0.0));
        assert_eq!(e.normalized_magnitude(1), 0.0);
        assert_eq!(e.normalized_intensity(1), 0.0);
    }

    #[test]
    fn two_level_reduction_leaves_triplet() {
        let e = set(4.0, 1.2, 0.0);
        for j in [2, 3, 5, 6] {
            assert_eq!(e.component(j).amplitude, 0.0, "D{j}");
        }
        for j in [1, 4, 7] {
            assert!(e.component(j).magnitude() > 1e-6, "D{j}");
        }
    }

    #[test]
    fn component_five_vanishes_relative_to_pair() {
        let e = set(4.0, 1.0, 1.0);
        let d5 = e.component(5).magnitude();
        assert!(d5 < 0.1 * e.component(2).magnitude());
        assert!(d5 < 0.1 * e.component(6).magnitude());
    }

    #[test]
    fn normalization_peaks_at_one() {
        let e = set(4.0, 1.0, 1.0);
        let max = (1..=7).map(|j| e.normalized_magnitude(j)).fold(0.0, f64::max);
        assert_eq!(max, 1.0);
        let maxi = (1..=7).map(|j| e.normalized_intensity(j)).fold(0.0, f64::max);
        assert_eq!(maxi, 1.0);
    }

    #[test]
    fn collection_factor_range() {
        assert!(CollectionFactors::new([1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.5]).is_err());
        assert!(CollectionFactors::new([0.0; 7]).is_ok());
    }

    #[test]
    fn grid_contains_reference_points() {
        let g = detuning_grid(ghz(1.0), ghz(9.0), ghz(0.02), true).unwrap();
        assert_eq!(g.len(), 401);
        for r in reference_detunings() {
            assert!(g.contains(&r));
        }
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        let plain = detuning_grid(ghz(4.0), ghz(4.0), ghz(1.0), false).unwrap();
        assert_eq!(plain, vec![ghz(4.0)]);
        assert!(detuning_grid(ghz(4.0), ghz(1.0), ghz(1.0), false).is_err());
        assert!(detuning_grid(ghz(1.0), ghz(4.0), 0.0, false).is_err());
    }

    #[test]
    fn single_point_sweep() {
        let scheme = LevelScheme::cesium(ghz(4.0)).unwrap();
        let drive = DriveParams::default();
        let cf = CollectionFactors::default();
        let sweep = detuning_sweep(&[ghz(4.0)], &scheme, &drive, &cf);
        assert_eq!(sweep.len(), 1);
        assert_eq!(sweep[0].emission.as_ref().unwrap(), &EmissionSet::compute(&scheme, &drive, &cf).unwrap());
    }

    #[test]
    fn component_one_among_largest_across_sweep() {
        let scheme = LevelScheme::cesium(ghz(4.0)).unwrap();
        let drive = DriveParams::default();
        let grid = detuning_grid(ghz(1.0), ghz(9.0), ghz(0.5), true).unwrap();
        for p in detuning_sweep(&grid, &scheme, &drive, &CollectionFactors::default()) {
            let e = p.emission.unwrap();
            let mut mags: Vec<f64> = (1..=7).map(|j| e.normalized_magnitude(j)).collect();
            mags.sort_by(|a, b| b.total_cmp(a));
            assert!(e.normalized_magnitude(1) >= mags[1]);
        }
    }

    /// Groups the nine products conj(cₘ)·c₂ by frequency label, independently
    /// of the closed-form table.
    fn brute_force_amplitudes(g: &ExpansionCoefficients, d12: f64, d32: f64) -> [f64; 7] {
        // (k, n) pairs: term G_1n G_2k oscillates at λ_k − λ_n
        let label = |k: usize, n: usize| -> usize {
            match (k, n) {
                (2, 1) => 0,
                (3, 1) => 1,
                (2, 3) => 2,
                (k, n) if k == n => 3,
                (3, 2) => 4,
                (1, 3) => 5,
                (1, 2) => 6,
                _ => unreachable!(),
            }
        };
        let mut out = [0.0; 7];
        for n in 1..=3 {
            for k in 1..=3 {
                out[label(k, n)] += d12 * g.at(1, n) * g.at(2, k) + d32 * g.at(3, n) * g.at(2, k);
            }
        }
        out
    }

    proptest! {
        #[test]
        fn amplitudes_match_brute_force_expansion(
            d23 in 0.5f64..9.0, o12 in 0.0f64..3.0, o23 in 0.0f64..3.0,
            d12 in 0.1f64..2.0, d32 in 0.1f64..2.0
        ) {
            let scheme = LevelScheme::cesium(ghz(d23)).unwrap();
            let drive = DriveParams::new(ghz(o12), ghz(o23), 2.0).unwrap().with_dipoles(d12, d32).unwrap();
            let sys = DressedSystem::solve(&scheme, &drive).unwrap();
            let fast = component_amplitudes(&sys.coefficients, d12, d32);
            let slow = brute_force_amplitudes(&sys.coefficients, d12, d32);
            for j in 0..7 {
                prop_assert!((fast[j] - slow[j]).abs() <= 1e-9 * (1.0 + slow[j].abs()));
            }
        }

        #[test]
        fn dipole_signal_matches_time_domain(
            d23 in 0.5f64..9.0, o12 in 0.1f64..3.0, o23 in 0.1f64..3.0, t in 0.0f64..2.0
        ) {
            // conj(a₁)·d₁₂·a₂ + conj(a₃)·d₃₂·a₂ in the rotating frame equals
            // Σⱼ Dⱼ exp(−i·offsetⱼ·t)
            let scheme = LevelScheme::cesium(ghz(d23)).unwrap();
            let drive = DriveParams::new(ghz(o12), ghz(o23), 2.0).unwrap();
            let sys = DressedSystem::solve(&scheme, &drive).unwrap();
            let a = amplitudes(&sys.basis, &sys.coefficients, t);
            let direct = a[0].conj() * a[1] + a[2].conj() * a[1];
            let e = EmissionSet::from_system(&sys, &CollectionFactors::default());
            let summed: Complex64 = e.components.iter()
                .map(|c| Complex64::from_polar(c.amplitude, -c.offset * t))
                .sum();
            prop_assert!((direct - summed).norm() < 1e-9);
        }
    }
}
