//! JSON run configuration in human units (GHz, MHz, ns, pJ).
//!
//! Every section is optional; a subcommand reports the first section it
//! needs but cannot find. Unknown keys are rejected.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

use crate::counting::{EnergyMapping, GateConfig, ScannedGate, SourceModel};
use crate::dynamics::{DriveParams, LevelScheme};
use crate::emission::CollectionFactors;
use crate::filter::{calibrate_stack, FilterStack, PulseShape};
use crate::units::{ghz, mhz, CS_GROUND_SPLITTING_GHZ};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("config key `{key}`: {message}")]
    Invalid { key: String, message: String },
    #[error("config has no `{0}` section")]
    Missing(&'static str),
}

fn invalid(key: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid { key: key.to_string(), message: message.into() }
}

fn finite(key: &str, v: f64) -> Result<f64, ConfigError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(invalid(key, "must be finite"))
    }
}

fn positive(key: &str, v: f64) -> Result<f64, ConfigError> {
    if finite(key, v)? > 0.0 {
        Ok(v)
    } else {
        Err(invalid(key, format!("must be > 0, got {v}")))
    }
}

fn non_negative(key: &str, v: f64) -> Result<f64, ConfigError> {
    if finite(key, v)? >= 0.0 {
        Ok(v)
    } else {
        Err(invalid(key, format!("must be >= 0, got {v}")))
    }
}

fn unit_interval(key: &str, v: f64) -> Result<f64, ConfigError> {
    if (0.0..=1.0).contains(&finite(key, v)?) {
        Ok(v)
    } else {
        Err(invalid(key, format!("must lie in [0, 1], got {v}")))
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct LevelConfig {
    pub splitting_31_ghz: f64,
    pub delta23_ghz: f64,
    pub gauge: f64,
}

impl Default for LevelConfig {
    fn default() -> Self {
        Self { splitting_31_ghz: CS_GROUND_SPLITTING_GHZ, delta23_ghz: 4.0, gauge: LevelScheme::DEFAULT_GAUGE }
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct DriveConfig {
    pub omega12_ghz: f64,
    pub omega23_ghz: f64,
    pub pulse_duration_ns: f64,
    pub d12: f64,
    pub d32: f64,
}

impl Default for DriveConfig {
    fn default() -> Self {
        Self { omega12_ghz: 1.0, omega23_ghz: 1.0, pulse_duration_ns: 2.0, d12: 1.0, d32: 1.0 }
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub start_ghz: f64,
    pub stop_ghz: f64,
    pub step_ghz: f64,
    pub include_reference: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self { start_ghz: 1.0, stop_ghz: 9.0, step_ghz: 0.02, include_reference: true }
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct TimeGridConfig {
    pub points: usize,
}

impl Default for TimeGridConfig {
    fn default() -> Self {
        Self { points: 201 }
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct FrequencyGridConfig {
    pub points: usize,
    pub step_ghz: f64,
}

impl Default for FrequencyGridConfig {
    fn default() -> Self {
        Self { points: 512, step_ghz: 0.125 }
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct StackConfig {
    pub cavities: usize,
    pub total_fwhm_mhz: f64,
    pub total_peak: f64,
    /// 0 for a single window.
    pub fsr_ghz: f64,
    /// Lab-frame center; omitted means centered on the matching component
    /// at the reference detuning.
    pub center_ghz: Option<f64>,
}

impl Default for StackConfig {
    fn default() -> Self {
        Self { cavities: 2, total_fwhm_mhz: 380.0, total_peak: 0.7, fsr_ghz: 0.0, center_ghz: None }
    }
}

impl StackConfig {
    pub fn build(&self, key: &str) -> Result<FilterStack, ConfigError> {
        if self.cavities == 0 {
            return Err(invalid(&format!("{key}.cavities"), "must be >= 1"));
        }
        positive(&format!("{key}.total_fwhm_mhz"), self.total_fwhm_mhz)?;
        let peak = positive(&format!("{key}.total_peak"), self.total_peak)?;
        if peak > 1.0 {
            return Err(invalid(&format!("{key}.total_peak"), format!("must be <= 1, got {peak}")));
        }
        let fsr = non_negative(&format!("{key}.fsr_ghz"), self.fsr_ghz)?;
        if fsr > 0.0 && fsr * 1e3 <= 2.0 * self.total_fwhm_mhz {
            return Err(invalid(&format!("{key}.fsr_ghz"), "must be 0 or exceed twice the total FWHM"));
        }
        let center = finite(&format!("{key}.center_ghz"), self.center_ghz.unwrap_or(0.0))?;
        calibrate_stack(self.cavities, mhz(self.total_fwhm_mhz), peak, ghz(fsr), ghz(center))
            .map_err(|e| invalid(key, e.to_string()))
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct FilterConfig {
    pub signal: StackConfig,
    pub idler: StackConfig,
    pub laser_tracking: bool,
    pub reference_delta23_ghz: f64,
    pub wiener_epsilon: f64,
    pub pulse_shape: String,
}

impl Default for FilterConfig {
    fn default() -> Self {
        Self {
            signal: StackConfig::default(),
            idler: StackConfig::default(),
            laser_tracking: true,
            reference_delta23_ghz: 4.0,
            wiener_epsilon: crate::filter::DEFAULT_WIENER_EPSILON,
            pulse_shape: "square".into(),
        }
    }
}

impl FilterConfig {
    pub fn pulse_shape(&self) -> Result<PulseShape, ConfigError> {
        self.pulse_shape.parse().map_err(|e: String| invalid("filter.pulse_shape", e))
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RecoverConfig {
    /// CSV of `freq_GHz,value`, relative to the config file.
    pub trace: PathBuf,
    #[serde(default = "default_recover_stack")]
    pub stack: String,
}

fn default_recover_stack() -> String {
    "signal".into()
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct SourceConfig {
    pub mu: f64,
    pub eta_s: f64,
    pub eta_i: f64,
    pub noise_s: f64,
    pub noise_i: f64,
    pub purity: f64,
    pub cascade_lag_ns: f64,
    pub jitter_ns: f64,
    pub emission_window_ns: f64,
    pub record_window_ns: [f64; 2],
    pub schmidt_modes: u32,
}

impl Default for SourceConfig {
    fn default() -> Self {
        let m = SourceModel::default();
        Self {
            mu: m.mu,
            eta_s: m.eta_s,
            eta_i: m.eta_i,
            noise_s: m.noise_s,
            noise_i: m.noise_i,
            purity: m.purity,
            cascade_lag_ns: m.cascade_lag,
            jitter_ns: m.jitter,
            emission_window_ns: m.emission_window,
            record_window_ns: [m.record_window.0, m.record_window.1],
            schmidt_modes: m.schmidt_modes,
        }
    }
}

impl SourceConfig {
    pub fn build(&self) -> Result<SourceModel, ConfigError> {
        non_negative("source.mu", self.mu)?;
        unit_interval("source.eta_s", self.eta_s)?;
        unit_interval("source.eta_i", self.eta_i)?;
        unit_interval("source.noise_s", self.noise_s)?;
        unit_interval("source.noise_i", self.noise_i)?;
        if !(0.5..=1.0).contains(&finite("source.purity", self.purity)?) {
            return Err(invalid("source.purity", format!("must lie in [0.5, 1], got {}", self.purity)));
        }
        non_negative("source.cascade_lag_ns", self.cascade_lag_ns)?;
        non_negative("source.jitter_ns", self.jitter_ns)?;
        non_negative("source.emission_window_ns", self.emission_window_ns)?;
        let [lo, hi] = self.record_window_ns;
        finite("source.record_window_ns", lo)?;
        finite("source.record_window_ns", hi)?;
        if hi <= lo {
            return Err(invalid("source.record_window_ns", "end must exceed start"));
        }
        if self.schmidt_modes == 0 {
            return Err(invalid("source.schmidt_modes", "must be >= 1"));
        }
        SourceModel {
            mu: self.mu,
            eta_s: self.eta_s,
            eta_i: self.eta_i,
            noise_s: self.noise_s,
            noise_i: self.noise_i,
            purity: self.purity,
            cascade_lag: self.cascade_lag_ns,
            jitter: self.jitter_ns,
            emission_window: self.emission_window_ns,
            record_window: (lo, hi),
            schmidt_modes: self.schmidt_modes,
        }
        .validated()
        .map_err(|e| invalid("source", e.to_string()))
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct GateSpec {
    pub width_ns: f64,
    pub delay_ns: f64,
}

impl Default for GateSpec {
    fn default() -> Self {
        Self { width_ns: 9.0, delay_ns: 0.0 }
    }
}

impl GateSpec {
    fn build(&self, key: &str) -> Result<GateConfig, ConfigError> {
        positive(&format!("{key}.width_ns"), self.width_ns)?;
        finite(&format!("{key}.delay_ns"), self.delay_ns)?;
        GateConfig::new(self.width_ns, self.delay_ns).map_err(|e| invalid(key, e.to_string()))
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq, Default)]
#[serde(deny_unknown_fields, default)]
pub struct GatesConfig {
    pub signal: GateSpec,
    pub idler: GateSpec,
}

impl GatesConfig {
    pub fn build(&self) -> Result<(GateConfig, GateConfig), ConfigError> {
        Ok((self.signal.build("gates.signal")?, self.idler.build("gates.idler")?))
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct TradeoffConfig {
    pub energies_pj: Vec<f64>,
    pub kappa_per_pj: f64,
    #[serde(default = "default_omega")]
    pub omega_ref_ghz: f64,
    #[serde(default = "default_energy")]
    pub reference_energy_pj: f64,
}

fn default_omega() -> f64 {
    1.0
}

fn default_energy() -> f64 {
    95.0
}

impl TradeoffConfig {
    pub fn build(&self) -> Result<(Vec<f64>, EnergyMapping), ConfigError> {
        if self.energies_pj.is_empty() {
            return Err(invalid("tradeoff.energies_pj", "must not be empty"));
        }
        for &e in &self.energies_pj {
            non_negative("tradeoff.energies_pj", e)?;
        }
        non_negative("tradeoff.kappa_per_pj", self.kappa_per_pj)?;
        non_negative("tradeoff.omega_ref_ghz", self.omega_ref_ghz)?;
        positive("tradeoff.reference_energy_pj", self.reference_energy_pj)?;
        let mapping = EnergyMapping {
            kappa: self.kappa_per_pj,
            omega_ref: ghz(self.omega_ref_ghz),
            reference_energy: self.reference_energy_pj,
        };
        Ok((self.energies_pj.clone(), mapping))
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GateScanConfig {
    #[serde(default = "default_scan_width")]
    pub width_ns: f64,
    #[serde(default = "default_scanned")]
    pub scanned: String,
    pub delays_ns: Vec<f64>,
}

fn default_scan_width() -> f64 {
    1.0
}

fn default_scanned() -> String {
    "gate2".into()
}

impl GateScanConfig {
    pub fn build(&self) -> Result<(f64, ScannedGate, Vec<f64>), ConfigError> {
        positive("gate_scan.width_ns", self.width_ns)?;
        let scanned = self.scanned.parse().map_err(|e: String| invalid("gate_scan.scanned", e))?;
        if self.delays_ns.is_empty() {
            return Err(invalid("gate_scan.delays_ns", "must not be empty"));
        }
        for &d in &self.delays_ns {
            finite("gate_scan.delays_ns", d)?;
        }
        Ok((self.width_ns, scanned, self.delays_ns.clone()))
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub scenario: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_out")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub level: LevelConfig,
    #[serde(default)]
    pub drive: DriveConfig,
    #[serde(default = "default_collection")]
    pub collection: [f64; 7],
    #[serde(default)]
    pub sweep: SweepConfig,
    #[serde(default)]
    pub time_grid: TimeGridConfig,
    #[serde(default)]
    pub frequency_grid: FrequencyGridConfig,
    pub filter: Option<FilterConfig>,
    pub recover: Option<RecoverConfig>,
    pub source: Option<SourceConfig>,
    #[serde(default = "default_trials")]
    pub trials: u64,
    #[serde(default)]
    pub gates: GatesConfig,
    pub tradeoff: Option<TradeoffConfig>,
    pub gate_scan: Option<GateScanConfig>,
    /// Directory of the file the config was read from.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

fn default_collection() -> [f64; 7] {
    [1.0; 7]
}

fn default_trials() -> u64 {
    100_000
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: Self = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            ConfigError::Invalid { key: path, message: e.into_inner().to_string() }
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads and validates; returns the raw bytes for hashing as well.
    pub fn load(path: &Path) -> Result<(Self, Vec<u8>), ConfigError> {
        let bytes = std::fs::read(path)
            .map_err(|e| ConfigError::Io { path: path.display().to_string(), message: e.to_string() })?;
        let text = std::str::from_utf8(&bytes).map_err(|e| invalid(".", format!("not UTF-8: {e}")))?;
        let mut cfg = Self::from_json(text)?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok((cfg, bytes))
    }

    /// Checks every section present, before any computation.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.scenario.is_empty()
            || !self.scenario.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
        {
            return Err(invalid("scenario", "must be non-empty [A-Za-z0-9_-]"));
        }
        self.level_scheme()?;
        self.drive_params()?;
        self.collection_factors()?;
        self.detuning_range()?;
        if self.time_grid.points < 2 {
            return Err(invalid("time_grid.points", "must be >= 2"));
        }
        if self.frequency_grid.points < 8 {
            return Err(invalid("frequency_grid.points", "must be >= 8"));
        }
        positive("frequency_grid.step_ghz", self.frequency_grid.step_ghz)?;
        if let Some(f) = &self.filter {
            f.signal.build("filter.signal")?;
            f.idler.build("filter.idler")?;
            positive("filter.reference_delta23_ghz", f.reference_delta23_ghz)?;
            positive("filter.wiener_epsilon", f.wiener_epsilon)?;
            f.pulse_shape()?;
        }
        if let Some(r) = &self.recover {
            if !matches!(r.stack.as_str(), "signal" | "idler") {
                return Err(invalid("recover.stack", "must be \"signal\" or \"idler\""));
            }
        }
        if let Some(s) = &self.source {
            s.build()?;
        }
        if self.trials == 0 {
            return Err(invalid("trials", "must be >= 1"));
        }
        self.gates.build()?;
        if let Some(t) = &self.tradeoff {
            t.build()?;
        }
        if let Some(g) = &self.gate_scan {
            g.build()?;
        }
        Ok(())
    }

    pub fn level_scheme(&self) -> Result<LevelScheme, ConfigError> {
        let l = &self.level;
        non_negative("level.splitting_31_ghz", l.splitting_31_ghz)?;
        positive("level.delta23_ghz", l.delta23_ghz)?;
        unit_interval("level.gauge", l.gauge)?;
        LevelScheme::new(ghz(l.splitting_31_ghz), ghz(l.delta23_ghz), l.gauge)
            .map_err(|e| invalid("level", e.to_string()))
    }

    pub fn drive_params(&self) -> Result<DriveParams, ConfigError> {
        let d = &self.drive;
        non_negative("drive.omega12_ghz", d.omega12_ghz)?;
        non_negative("drive.omega23_ghz", d.omega23_ghz)?;
        positive("drive.pulse_duration_ns", d.pulse_duration_ns)?;
        finite("drive.d12", d.d12)?;
        finite("drive.d32", d.d32)?;
        DriveParams::new(ghz(d.omega12_ghz), ghz(d.omega23_ghz), d.pulse_duration_ns)
            .and_then(|p| p.with_dipoles(d.d12, d.d32))
            .map_err(|e| invalid("drive", e.to_string()))
    }

    pub fn collection_factors(&self) -> Result<CollectionFactors, ConfigError> {
        for &c in &self.collection {
            unit_interval("collection", c)?;
        }
        CollectionFactors::new(self.collection).map_err(|e| invalid("collection", e.to_string()))
    }

    /// (start, stop, step) in rad/ns.
    pub fn detuning_range(&self) -> Result<(f64, f64, f64), ConfigError> {
        let s = &self.sweep;
        positive("sweep.start_ghz", s.start_ghz)?;
        positive("sweep.step_ghz", s.step_ghz)?;
        if finite("sweep.stop_ghz", s.stop_ghz)? < s.start_ghz {
            return Err(invalid("sweep.stop_ghz", "must be >= sweep.start_ghz"));
        }
        Ok((ghz(s.start_ghz), ghz(s.stop_ghz), ghz(s.step_ghz)))
    }

    pub fn filter(&self) -> Result<&FilterConfig, ConfigError> {
        self.filter.as_ref().ok_or(ConfigError::Missing("filter"))
    }

    pub fn recover(&self) -> Result<&RecoverConfig, ConfigError> {
        self.recover.as_ref().ok_or(ConfigError::Missing("recover"))
    }

    pub fn source_model(&self) -> Result<SourceModel, ConfigError> {
        self.source.as_ref().ok_or(ConfigError::Missing("source"))?.build()
    }

    pub fn tradeoff(&self) -> Result<&TradeoffConfig, ConfigError> {
        self.tradeoff.as_ref().ok_or(ConfigError::Missing("tradeoff"))
    }

    pub fn gate_scan(&self) -> Result<&GateScanConfig, ConfigError> {
        self.gate_scan.as_ref().ok_or(ConfigError::Missing("gate_scan"))
    }

    /// Path of the recover trace, resolved against the config directory.
    pub fn trace_path(&self) -> Result<PathBuf, ConfigError> {
        let r = self.recover()?;
        Ok(if r.trace.is_absolute() { r.trace.clone() } else { self.base_dir.join(&r.trace) })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_uses_defaults() {
        let c = RunConfig::from_json(r#"{"scenario": "x"}"#).unwrap();
        assert_eq!(c.level, LevelConfig::default());
        assert!(c.filter.is_none());
        assert!(matches!(c.source_model(), Err(ConfigError::Missing("source"))));
    }

    #[test]
    fn unknown_key_is_named() {
        let e = RunConfig::from_json(r#"{"scenario": "x", "drive": {"omega12_ghz": 1, "omgea23_ghz": 1}}"#)
            .unwrap_err();
        let msg = e.to_string();
        assert!(msg.contains("omgea23_ghz"), "{msg}");
        assert!(msg.contains("drive"), "{msg}");
    }

    #[test]
    fn invalid_values_name_their_key() {
        let cases = [
            (r#"{"scenario": "x", "level": {"gauge": 2}}"#, "level.gauge"),
            (r#"{"scenario": "x", "drive": {"pulse_duration_ns": 0}}"#, "drive.pulse_duration_ns"),
            (r#"{"scenario": "x", "source": {"purity": 0.2}}"#, "source.purity"),
            (r#"{"scenario": "x", "filter": {"signal": {"total_peak": 1.5}}}"#, "filter.signal.total_peak"),
            (r#"{"scenario": "x", "sweep": {"start_ghz": 5, "stop_ghz": 1}}"#, "sweep.stop_ghz"),
            (r#"{"scenario": "x", "collection": [1, 1, 1, 1, 1, 1, 2]}"#, "collection"),
            (r#"{"scenario": "x", "trials": 0}"#, "trials"),
            (r#"{"scenario": "a b"}"#, "scenario"),
            (r#"{"scenario": "x", "gate_scan": {"scanned": "gate3", "delays_ns": [0]}}"#, "gate_scan.scanned"),
        ];
        for (json, key) in cases {
            let msg = RunConfig::from_json(json).unwrap_err().to_string();
            assert!(msg.contains(key), "{json}: {msg}");
        }
    }

    #[test]
    fn type_errors_carry_path() {
        let msg = RunConfig::from_json(r#"{"scenario": "x", "source": {"mu": "lots"}}"#).unwrap_err().to_string();
        assert!(msg.contains("source.mu"), "{msg}");
    }
}
