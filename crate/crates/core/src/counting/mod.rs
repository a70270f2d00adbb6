//! Monte Carlo photon-pair source, click-detector counting and correlation
//! estimators.

mod estimate;
mod events;
mod model;
mod scan;
mod simulate;

pub use estimate::{
    cs_test, g2_auto, g2_cross, heralding_efficiency, summarize, CorrelationEstimate, CountSummary,
    CsResult, GateConfig,
};
pub use events::{read_events_csv, write_events_csv, Channel, DetectionEvent, EventStream, TrialRecord};
pub use model::SourceModel;
pub use scan::{
    gate_delay_scan, tradeoff_sweep, EnergyMapping, GateScanPoint, ScannedGate, TradeoffPoint,
};
pub use simulate::{simulate_trials, thermal_sample, trial_rng};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CountingError {
    #[error("{name} = {value} is outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },
    #[error("{0} must be finite")]
    NonFinite(&'static str),
    #[error("estimate undefined: {0}")]
    Undefined(&'static str),
    #[error("event file line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("event file: {0}")]
    Io(String),
}
