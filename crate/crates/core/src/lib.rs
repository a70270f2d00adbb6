//! Light-matter multi-field interference in a driven Λ-type three-level atom.
//!
//! The crate is split along the measurement chain:
//!
//! * [`dynamics`]: RWA interaction matrix, dressed basis, expansion
//!   coefficients, square-pulse populations and AC-Stark shifts.
//! * [`emission`]: the seven interference emission components (offsets and
//!   amplitudes) and detuning sweeps.
//! * [`filter`]: cascaded-cavity transmission, detuning-scan convolution
//!   traces, Wiener spectrum recovery and bandwidth extraction.
//! * [`counting`]: Monte Carlo photon-pair source, click-detector counting,
//!   g² estimators, Cauchy-Schwarz test, tradeoff and gate-delay scans.
//! * [`cli`]: the `multifield` command-line front end and its JSON config.
//!
//! Internally all angular frequencies are in rad/ns and times in ns, with
//! ħ = 1. Use [`units`] to convert from GHz.

pub mod cli;
pub mod config;
pub mod counting;
pub mod dynamics;
pub mod emission;
pub mod filter;
pub mod units;

pub use dynamics::{
    ac_stark_shifts, build_interaction_matrix, dressed_basis, expansion_coefficients,
    resolve_detunings, Detunings, DressedBasis, DriveParams, DressedSystem, DynamicsError,
    ExpansionCoefficients, InteractionMatrix, LevelScheme, PopulationTrace,
};
pub use emission::{
    component_amplitudes, component_offsets, detuning_sweep, CollectionFactors, EmissionSet,
    SpectralComponent,
};
pub use filter::{calibrate_stack, CavitySpec, FilterError, FilterStack, SpectrumGrid};
pub use counting::{CorrelationEstimate, CountSummary, CountingError, EventStream, SourceModel};
