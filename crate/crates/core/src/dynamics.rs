//! Driven three-level Λ system under the rotating-wave approximation.
//!
//! The bare states are |1⟩ and |3⟩ (hyperfine ground states, |3⟩ above |1⟩
//! by `splitting_31`) and the excited state |2⟩. A single coupling field
//! with Rabi frequencies Ω₁₂ and Ω₂₃ couples both ground states to |2⟩. In
//! the rotating frame the slowly varying amplitudes obey `i dC/dt = M C` with
//!
//! ```text
//!     | -Δ₁    Ω₁₂/2    0    |
//! M = | Ω₁₂/2   Δ₂    Ω₂₃/2  |
//!     |  0     Ω₂₃/2   -Δ₃   |
//! ```
//!
//! Only the sums Δ₁+Δ₂ and Δ₂+Δ₃ are physical. The remaining freedom (the
//! "gauge") shifts `M` by a multiple of the identity and leaves every
//! observable untouched.

use nalgebra::{Matrix3, SymmetricEigen, Vector3};
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error("{0} must be finite")]
    NonFinite(&'static str),
    #[error("{name} = {value} is outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },
    #[error("degenerate eigenvector labeling: bare state |{0}⟩ is dominant in two dressed states")]
    DegenerateLabeling(usize),
    #[error("initial amplitude vector has norm {0}, expected 1")]
    InitialNotNormalized(f64),
    #[error("t = {t} ns lies outside the square pulse [0, {duration}] ns")]
    OutsidePulse { t: f64, duration: f64 },
    #[error("a population trace needs at least 2 time points, got {0}")]
    TooFewPoints(usize),
}

fn finite(name: &'static str, x: f64) -> Result<f64, DynamicsError> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(DynamicsError::NonFinite(name))
    }
}

/// The three rotating-frame detunings, rad/ns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Detunings {
    pub delta1: f64,
    pub delta2: f64,
    pub delta3: f64,
}

impl Detunings {
    pub fn as_array(&self) -> [f64; 3] {
        [self.delta1, self.delta2, self.delta3]
    }
}

/// Splits the coupling detuning `delta23 = Δ₂+Δ₃` into the three detunings,
/// with `Δ₂ = gauge·delta23` and `Δ₁+Δ₂ = delta23 + splitting_31`.
pub fn resolve_detunings(
    delta23: f64,
    splitting_31: f64,
    gauge: f64,
) -> Result<Detunings, DynamicsError> {
    finite("delta23", delta23)?;
    finite("splitting_31", splitting_31)?;
    finite("gauge", gauge)?;
    if delta23 <= 0.0 {
        return Err(DynamicsError::OutOfRange {
            name: "delta23",
            value: delta23,
            range: "(0, ∞)",
        });
    }
    if !(0.0..=1.0).contains(&gauge) {
        return Err(DynamicsError::OutOfRange {
            name: "gauge",
            value: gauge,
            range: "[0, 1]",
        });
    }
    let delta2 = gauge * delta23;
    Ok(Detunings {
        delta1: delta23 + splitting_31 - delta2,
        delta2,
        delta3: delta23 - delta2,
    })
}

/// Level structure and coupling detuning of the Λ system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelScheme {
    splitting_31: f64,
    delta23: f64,
    gauge: f64,
    detunings: Detunings,
}

impl LevelScheme {
    pub const DEFAULT_GAUGE: f64 = 0.5;

    pub fn new(splitting_31: f64, delta23: f64, gauge: f64) -> Result<Self, DynamicsError> {
        let detunings = resolve_detunings(delta23, splitting_31, gauge)?;
        Ok(Self {
            splitting_31,
            delta23,
            gauge,
            detunings,
        })
    }

    /// Cesium D2 line with the 9.19 GHz ground splitting and default gauge.
    pub fn cesium(delta23: f64) -> Result<Self, DynamicsError> {
        Self::new(
            crate::units::ghz(crate::units::CS_GROUND_SPLITTING_GHZ),
            delta23,
            Self::DEFAULT_GAUGE,
        )
    }

    pub fn with_delta23(&self, delta23: f64) -> Result<Self, DynamicsError> {
        Self::new(self.splitting_31, delta23, self.gauge)
    }

    pub fn with_gauge(&self, gauge: f64) -> Result<Self, DynamicsError> {
        Self::new(self.splitting_31, self.delta23, gauge)
    }

    pub fn splitting_31(&self) -> f64 {
        self.splitting_31
    }

    pub fn delta23(&self) -> f64 {
        self.delta23
    }

    pub fn gauge(&self) -> f64 {
        self.gauge
    }

    pub fn detunings(&self) -> Detunings {
        self.detunings
    }
}

/// Effective drive: Rabi frequencies (rad/ns), square-pulse length (ns) and
/// effective dipole magnitudes d₁₂, d₃₂.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveParams {
    pub omega12: f64,
    pub omega23: f64,
    pub pulse_duration: f64,
    pub d12: f64,
    pub d32: f64,
}

impl Default for DriveParams {
    fn default() -> Self {
        Self {
            omega12: crate::units::ghz(1.0),
            omega23: crate::units::ghz(1.0),
            pulse_duration: 2.0,
            d12: 1.0,
            d32: 1.0,
        }
    }
}

impl DriveParams {
    pub fn new(omega12: f64, omega23: f64, pulse_duration: f64) -> Result<Self, DynamicsError> {
        Self {
            omega12,
            omega23,
            pulse_duration,
            ..Self::default()
        }
        .validated()
    }

    pub fn with_dipoles(mut self, d12: f64, d32: f64) -> Result<Self, DynamicsError> {
        self.d12 = d12;
        self.d32 = d32;
        self.validated()
    }

    pub fn validated(self) -> Result<Self, DynamicsError> {
        finite("omega12", self.omega12)?;
        finite("omega23", self.omega23)?;
        finite("pulse_duration", self.pulse_duration)?;
        finite("d12", self.d12)?;
        finite("d32", self.d32)?;
        for (name, value) in [("omega12", self.omega12), ("omega23", self.omega23)] {
            if value < 0.0 {
                return Err(DynamicsError::OutOfRange {
                    name,
                    value,
                    range: "[0, ∞)",
                });
            }
        }
        if self.pulse_duration <= 0.0 {
            return Err(DynamicsError::OutOfRange {
                name: "pulse_duration",
                value: self.pulse_duration,
                range: "(0, ∞)",
            });
        }
        Ok(self)
    }
}

/// Real symmetric 3×3 RWA matrix, rad/ns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InteractionMatrix(Matrix3<f64>);

impl InteractionMatrix {
    /// Wraps an arbitrary matrix after checking symmetry. Used for testing
    /// the eigen-solver on matrices that do not come from a level scheme.
    pub fn from_symmetric(m: Matrix3<f64>) -> Result<Self, DynamicsError> {
        if m.iter().any(|x| !x.is_finite()) {
            return Err(DynamicsError::NonFinite("matrix"));
        }
        let scale = m.norm().max(f64::MIN_POSITIVE);
        if (m - m.transpose()).norm() > 1e-14 * scale {
            return Err(DynamicsError::OutOfRange {
                name: "matrix asymmetry",
                value: (m - m.transpose()).norm(),
                range: "≈ 0",
            });
        }
        Ok(Self(m))
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.0[(row, col)]
    }
}

pub fn build_interaction_matrix(
    detunings: &Detunings,
    omega12: f64,
    omega23: f64,
) -> Result<InteractionMatrix, DynamicsError> {
    let Detunings {
        delta1,
        delta2,
        delta3,
    } = *detunings;
    finite("delta1", delta1)?;
    finite("delta2", delta2)?;
    finite("delta3", delta3)?;
    finite("omega12", omega12)?;
    finite("omega23", omega23)?;
    let (a, b) = (0.5 * omega12, 0.5 * omega23);
    Ok(InteractionMatrix(Matrix3::new(
        -delta1, a, 0.0, //
        a, delta2, b, //
        0.0, b, -delta3,
    )))
}

/// Unlabeled eigen-decomposition: eigenvalues ascending, eigenvectors as
/// matching columns.
pub fn symmetric_eigen(m: &InteractionMatrix) -> ([f64; 3], Matrix3<f64>) {
    let eig = SymmetricEigen::new(m.0);
    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.map(|i| eig.eigenvalues[i]);
    let vectors = Matrix3::from_columns(&order.map(|i| eig.eigenvectors.column(i).into_owned()));
    (values, vectors)
}

/// Dressed states labeled by the bare state they reduce to as Ω → 0.
///
/// Column `n` of `eigvecs` is (fₙ, gₙ, hₙ); its component along bare state
/// `n` is the largest in magnitude and positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DressedBasis {
    pub lambdas: [f64; 3],
    pub eigvecs: Matrix3<f64>,
}

impl DressedBasis {
    pub fn eigvec(&self, n: usize) -> Vector3<f64> {
        self.eigvecs.column(n).into_owned()
    }

    /// V·diag(λ)·Vᵀ.
    pub fn reconstruct(&self) -> Matrix3<f64> {
        self.eigvecs * Matrix3::from_diagonal(&Vector3::from(self.lambdas)) * self.eigvecs.transpose()
    }
}

const TIE_TOLERANCE: f64 = 1e-9;

pub fn dressed_basis(m: &InteractionMatrix) -> Result<DressedBasis, DynamicsError> {
    let (values, vectors) = symmetric_eigen(m);
    let mut slot: [Option<usize>; 3] = [None; 3];
    // values are ascending, so ties go to the lower eigenvalue first
    for k in 0..3 {
        let v = vectors.column(k);
        let dominant = v.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
        let pick = (0..3)
            .filter(|&b| v[b].abs() >= dominant * (1.0 - TIE_TOLERANCE))
            .find(|&b| slot[b].is_none());
        match pick {
            Some(b) => slot[b] = Some(k),
            None => {
                let b = (0..3)
                    .max_by(|&i, &j| v[i].abs().total_cmp(&v[j].abs()))
                    .unwrap_or(0);
                return Err(DynamicsError::DegenerateLabeling(b + 1));
            }
        }
    }
    let mut lambdas = [0.0; 3];
    let mut eigvecs = Matrix3::zeros();
    for (n, k) in slot.iter().enumerate() {
        let k = k.expect("three eigenvectors fill three slots");
        let mut v = vectors.column(k).into_owned();
        if v[n] < 0.0 {
            v = -v;
        }
        lambdas[n] = values[k];
        eigvecs.set_column(n, &v);
    }
    Ok(DressedBasis { lambdas, eigvecs })
}

/// Expansion coefficients of an initial state in the dressed basis.
///
/// `g[(m, n)] = qₙ·(vₙ)ₘ`, so that `aₘ(t) = Σₙ G_mn exp(−iλₙt)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpansionCoefficients {
    pub q: [f64; 3],
    pub g: Matrix3<f64>,
}

impl ExpansionCoefficients {
    /// 1-based accessor matching the G_mn notation.
    pub fn at(&self, m: usize, n: usize) -> f64 {
        self.g[(m - 1, n - 1)]
    }
}

pub fn expansion_coefficients(
    basis: &DressedBasis,
    initial: [f64; 3],
) -> Result<ExpansionCoefficients, DynamicsError> {
    let init = Vector3::from(initial);
    if init.iter().any(|x| !x.is_finite()) {
        return Err(DynamicsError::NonFinite("initial"));
    }
    let norm = init.norm();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(DynamicsError::InitialNotNormalized(norm));
    }
    // orthonormal basis: V⁻¹ = Vᵀ
    let q = basis.eigvecs.transpose() * init;
    debug_assert!((basis.eigvecs * q - init).norm() < 1e-9);
    let g = basis.eigvecs * Matrix3::from_diagonal(&q);
    Ok(ExpansionCoefficients {
        q: [q[0], q[1], q[2]],
        g,
    })
}

/// Complex amplitudes aₘ(t) = Σₙ G_mn exp(−iλₙt).
pub fn amplitudes(basis: &DressedBasis, coeffs: &ExpansionCoefficients, t: f64) -> [Complex64; 3] {
    let phases = basis.lambdas.map(|l| Complex64::from_polar(1.0, -l * t));
    std::array::from_fn(|m| (0..3).map(|n| phases[n] * coeffs.g[(m, n)]).sum())
}

/// Bare-state populations |Cₙ(t)|² = |aₙ(t)|².
pub fn populations(basis: &DressedBasis, coeffs: &ExpansionCoefficients, t: f64) -> [f64; 3] {
    amplitudes(basis, coeffs, t).map(|a| a.norm_sqr())
}

/// AC-Stark shift sₙ = (−1)ⁿλₙ − Δₙ of each bare state.
pub fn ac_stark_shifts(basis: &DressedBasis, detunings: &Detunings) -> [f64; 3] {
    let d = detunings.as_array();
    std::array::from_fn(|i| {
        let sign = if i % 2 == 0 { -1.0 } else { 1.0 };
        sign * basis.lambdas[i] - d[i]
    })
}

/// Populations sampled on a uniform grid over the pulse.
#[derive(Debug, Clone, PartialEq)]
pub struct PopulationTrace {
    pub times: Vec<f64>,
    pub populations: Vec<[f64; 3]>,
}

impl PopulationTrace {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// A solved level scheme + drive: matrix, labeled dressed basis and expansion
/// coefficients for a given initial state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DressedSystem {
    pub scheme: LevelScheme,
    pub drive: DriveParams,
    pub matrix: InteractionMatrix,
    pub basis: DressedBasis,
    pub coefficients: ExpansionCoefficients,
}

impl DressedSystem {
    /// Solves with every atom initially in |1⟩.
    pub fn solve(scheme: &LevelScheme, drive: &DriveParams) -> Result<Self, DynamicsError> {
        Self::solve_from(scheme, drive, [1.0, 0.0, 0.0])
    }

    pub fn solve_from(
        scheme: &LevelScheme,
        drive: &DriveParams,
        initial: [f64; 3],
    ) -> Result<Self, DynamicsError> {
        let drive = drive.validated()?;
        let matrix = build_interaction_matrix(&scheme.detunings(), drive.omega12, drive.omega23)?;
        let basis = dressed_basis(&matrix)?;
        let coefficients = expansion_coefficients(&basis, initial)?;
        Ok(Self {
            scheme: *scheme,
            drive,
            matrix,
            basis,
            coefficients,
        })
    }

    pub fn stark_shifts(&self) -> [f64; 3] {
        ac_stark_shifts(&self.basis, &self.scheme.detunings())
    }

    pub fn populations(&self, t: f64) -> Result<[f64; 3], DynamicsError> {
        let duration = self.drive.pulse_duration;
        if !(0.0..=duration).contains(&t) {
            return Err(DynamicsError::OutsidePulse { t, duration });
        }
        Ok(populations(&self.basis, &self.coefficients, t))
    }

    /// `points` uniformly spaced samples on [0, pulse_duration], both ends
    /// included.
    pub fn population_trace(&self, points: usize) -> Result<PopulationTrace, DynamicsError> {
        if points < 2 {
            return Err(DynamicsError::TooFewPoints(points));
        }
        let duration = self.drive.pulse_duration;
        let times: Vec<f64> = (0..points)
            .map(|i| duration * i as f64 / (points - 1) as f64)
            .collect();
        let populations = times
            .iter()
            .map(|&t| populations(&self.basis, &self.coefficients, t))
            .collect();
        Ok(PopulationTrace { times, populations })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::ghz;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn cs(delta23_ghz: f64) -> LevelScheme {
        LevelScheme::cesium(ghz(delta23_ghz)).unwrap()
    }

    #[test]
    fn detunings_at_default_gauge() {
        let d = resolve_detunings(ghz(4.0), ghz(9.19), 0.5).unwrap();
        assert_relative_eq!(d.delta2, ghz(2.0), max_relative = 1e-14);
        assert_relative_eq!(d.delta3, ghz(2.0), max_relative = 1e-14);
        assert_relative_eq!(d.delta1, ghz(11.19), max_relative = 1e-14);
    }

    #[test]
    fn detunings_at_gauge_zero() {
        let d = resolve_detunings(ghz(4.0), ghz(9.19), 0.0).unwrap();
        assert_eq!(d.delta2, 0.0);
        assert_eq!(d.delta3, ghz(4.0));
        assert_eq!(d.delta1, ghz(4.0) + ghz(9.19));
    }

    #[test]
    fn detuning_validation() {
        assert!(matches!(
            resolve_detunings(f64::NAN, 1.0, 0.5),
            Err(DynamicsError::NonFinite("delta23"))
        ));
        assert!(resolve_detunings(1.0, f64::INFINITY, 0.5).is_err());
        assert!(resolve_detunings(-1.0, 1.0, 0.5).is_err());
        assert!(resolve_detunings(1.0, 1.0, 1.5).is_err());
    }

    #[test]
    fn uncoupled_matrix_is_diagonal() {
        let d = cs(4.0).detunings();
        let m = build_interaction_matrix(&d, 0.0, 0.0).unwrap();
        let basis = dressed_basis(&m).unwrap();
        assert_eq!(basis.lambdas, [-d.delta1, d.delta2, -d.delta3]);
        assert_eq!(basis.eigvecs, Matrix3::identity());
    }

    #[test]
    fn matrix_layout() {
        let d = Detunings {
            delta1: 1.0,
            delta2: 2.0,
            delta3: 3.0,
        };
        let m = build_interaction_matrix(&d, 4.0, 6.0).unwrap();
        assert_eq!(m.get(0, 0), -1.0);
        assert_eq!(m.get(1, 1), 2.0);
        assert_eq!(m.get(2, 2), -3.0);
        assert_eq!(m.get(0, 1), 2.0);
        assert_eq!(m.get(1, 2), 3.0);
        assert_eq!(m.get(0, 2), 0.0);
        assert_eq!(m.get(2, 0), 0.0);
        assert_eq!(m.matrix(), &m.matrix().transpose());
    }

    #[test]
    fn resonant_two_level_block() {
        let d = Detunings {
            delta1: 0.0,
            delta2: 0.0,
            delta3: 5.0,
        };
        let m = build_interaction_matrix(&d, 2.0, 0.0).unwrap();
        let basis = dressed_basis(&m).unwrap();
        assert_relative_eq!(basis.lambdas[0], -1.0, epsilon = 1e-12);
        assert_relative_eq!(basis.lambdas[1], 1.0, epsilon = 1e-12);
        assert_relative_eq!(basis.lambdas[2], -5.0, epsilon = 1e-12);
    }

    #[test]
    fn closed_form_when_state_three_decoupled() {
        let d = cs(4.0).detunings();
        let om = ghz(1.3);
        let m = build_interaction_matrix(&d, om, 0.0).unwrap();
        let basis = dressed_basis(&m).unwrap();
        let root = ((d.delta1 + d.delta2).powi(2) + om * om).sqrt();
        assert_relative_eq!(basis.lambdas[0], 0.5 * (d.delta2 - d.delta1 - root), max_relative = 1e-12);
        assert_relative_eq!(basis.lambdas[1], 0.5 * (d.delta2 - d.delta1 + root), max_relative = 1e-12);
        assert_relative_eq!(basis.lambdas[2], -d.delta3, max_relative = 1e-12);
    }

    #[test]
    fn labeling_conflict_is_reported() {
        // two eigenvectors dominated by bare state 2
        let m = Matrix3::new(0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0);
        let m = InteractionMatrix::from_symmetric(m).unwrap();
        assert!(matches!(
            dressed_basis(&m),
            Err(DynamicsError::DegenerateLabeling(_))
        ));
    }

    #[test]
    fn asymmetric_matrix_rejected() {
        let m = Matrix3::new(0.0, 1.0, 0.0, 2.0, 0.0, 0.0, 0.0, 0.0, 0.0);
        assert!(InteractionMatrix::from_symmetric(m).is_err());
    }

    #[test]
    fn expansion_without_drive() {
        let sys = DressedSystem::solve(&cs(4.0), &DriveParams::new(0.0, 0.0, 2.0).unwrap()).unwrap();
        let mut expected = Matrix3::zeros();
        expected[(0, 0)] = 1.0;
        assert_eq!(sys.coefficients.g, expected);
    }

    #[test]
    fn expansion_rejects_unnormalized_initial() {
        let sys = DressedSystem::solve(&cs(4.0), &DriveParams::default()).unwrap();
        assert!(matches!(
            expansion_coefficients(&sys.basis, [1.0, 1.0, 0.0]),
            Err(DynamicsError::InitialNotNormalized(_))
        ));
    }

    #[test]
    fn third_column_vanishes_when_decoupled() {
        let drive = DriveParams::new(ghz(1.5), 0.0, 2.0).unwrap();
        let sys = DressedSystem::solve(&cs(4.0), &drive).unwrap();
        for m in 0..3 {
            assert_eq!(sys.coefficients.g[(m, 2)], 0.0);
        }
        for p in sys.population_trace(50).unwrap().populations {
            assert!(p[2].abs() < 1e-24);
        }
    }

    #[test]
    fn rabi_oscillation() {
        let om = 3.0;
        let d = Detunings {
            delta1: 0.0,
            delta2: 0.0,
            delta3: 4.0,
        };
        let m = build_interaction_matrix(&d, om, 0.0).unwrap();
        let basis = dressed_basis(&m).unwrap();
        let coeffs = expansion_coefficients(&basis, [1.0, 0.0, 0.0]).unwrap();
        for i in 0..=40 {
            let t = 0.05 * i as f64;
            let p = populations(&basis, &coeffs, t);
            assert!((p[1] - (0.5 * om * t).sin().powi(2)).abs() < 1e-12);
        }
    }

    #[test]
    fn populations_start_in_ground_state() {
        let sys = DressedSystem::solve(&cs(4.0), &DriveParams::default()).unwrap();
        let p = sys.populations(0.0).unwrap();
        assert!((p[0] - 1.0).abs() < 1e-12 && p[1].abs() < 1e-12 && p[2].abs() < 1e-12);
    }

    #[test]
    fn populations_outside_pulse_rejected() {
        let sys = DressedSystem::solve(&cs(4.0), &DriveParams::default()).unwrap();
        assert!(matches!(
            sys.populations(2.5),
            Err(DynamicsError::OutsidePulse { .. })
        ));
        assert!(sys.populations(-0.1).is_err());
        assert!(sys.population_trace(1).is_err());
    }

    #[test]
    fn stark_shifts_vanish_without_drive() {
        let sys = DressedSystem::solve(&cs(4.0), &DriveParams::new(0.0, 0.0, 2.0).unwrap()).unwrap();
        assert_eq!(sys.stark_shifts(), [0.0, 0.0, 0.0]);
    }

    #[test]
    fn stark_shifts_order_of_hundred_megahertz() {
        let sys = DressedSystem::solve(&cs(4.0), &DriveParams::default()).unwrap();
        let largest = sys.stark_shifts().iter().fold(0.0f64, |a, s| a.max(s.abs()));
        // a 2π·1 GHz drive at 2π·4 GHz detuning
        assert!(largest > crate::units::mhz(10.0) && largest < crate::units::mhz(1000.0));
    }

    #[test]
    fn stark_shifts_gauge_invariant() {
        let drive = DriveParams::default();
        let a = DressedSystem::solve(&cs(4.0), &drive).unwrap().stark_shifts();
        let b = DressedSystem::solve(&cs(4.0).with_gauge(0.1).unwrap(), &drive)
            .unwrap()
            .stark_shifts();
        for i in 0..3 {
            assert!((a[i] - b[i]).abs() < 1e-9 * ghz(10.0));
        }
    }

    proptest! {
        #[test]
        fn reconstruction_and_orthonormality(
            d23 in 0.5f64..10.0, g in 0.0f64..=1.0, o12 in 0.0f64..3.0, o23 in 0.0f64..3.0
        ) {
            let scheme = LevelScheme::cesium(ghz(d23)).unwrap().with_gauge(g).unwrap();
            let drive = DriveParams::new(ghz(o12), ghz(o23), 2.0).unwrap();
            let sys = DressedSystem::solve(&scheme, &drive).unwrap();
            let m = sys.matrix.matrix();
            prop_assert!((sys.basis.reconstruct() - m).norm() <= 1e-10 * m.norm());
            let v = sys.basis.eigvecs;
            prop_assert!((v.transpose() * v - Matrix3::identity()).norm() < 1e-10);
            let rows = sys.coefficients.g.column_sum();
            prop_assert!((rows[0] - 1.0).abs() < 1e-10);
            prop_assert!(rows[1].abs() < 1e-10 && rows[2].abs() < 1e-10);
        }

        #[test]
        fn labeling_continuous_under_small_perturbation(
            d23 in 0.5f64..10.0, o12 in 0.0f64..3.0, o23 in 0.0f64..3.0, eps in -1e-6f64..1e-6
        ) {
            let d = LevelScheme::cesium(ghz(d23)).unwrap().detunings();
            let base = build_interaction_matrix(&d, ghz(o12), ghz(o23)).unwrap();
            let mut shifted = *base.matrix();
            shifted[(0, 1)] += eps;
            shifted[(1, 0)] += eps;
            shifted[(2, 2)] -= eps;
            let a = dressed_basis(&base).unwrap();
            let b = dressed_basis(&InteractionMatrix::from_symmetric(shifted).unwrap()).unwrap();
            for n in 0..3 {
                prop_assert!((a.lambdas[n] - b.lambdas[n]).abs() < 1e-5);
                prop_assert!((a.eigvec(n) - b.eigvec(n)).norm() < 1e-4);
            }
        }
    }
}
