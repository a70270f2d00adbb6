use super::{
    g2_cross, heralding_efficiency, simulate_trials, summarize, Channel, CorrelationEstimate,
    CountSummary, CountingError, EventStream, GateConfig, SourceModel,
};

/// Pulse energy to source parameters: mu = κ·E, Ω = Ω_ref·√(E/E_ref).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyMapping {
    /// Pairs per pulse per pJ.
    pub kappa: f64,
    /// Rabi frequency (rad/ns) at `reference_energy`.
    pub omega_ref: f64,
    /// pJ
    pub reference_energy: f64,
}

impl EnergyMapping {
    pub fn validated(self) -> Result<Self, CountingError> {
        for (name, v) in [("kappa", self.kappa), ("omega_ref", self.omega_ref), ("reference_energy", self.reference_energy)] {
            if !v.is_finite() {
                return Err(CountingError::NonFinite(name));
            }
        }
        if self.kappa < 0.0 {
            return Err(CountingError::OutOfRange { name: "kappa", value: self.kappa, range: "[0, ∞)" });
        }
        if self.reference_energy <= 0.0 {
            return Err(CountingError::OutOfRange {
                name: "reference_energy",
                value: self.reference_energy,
                range: "(0, ∞)",
            });
        }
        Ok(self)
    }

    pub fn mu(&self, energy: f64) -> f64 {
        self.kappa * energy
    }

    pub fn omega(&self, energy: f64) -> f64 {
        self.omega_ref * (energy / self.reference_energy).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TradeoffPoint {
    /// pJ
    pub energy: f64,
    pub mu: f64,
    pub omega: f64,
    /// Detected pair probability over eta_s·eta_i.
    pub excitation: f64,
    pub summary: CountSummary,
    pub g2_si: Result<CorrelationEstimate, CountingError>,
    /// p_SI/p_S
    pub herald_by_signal: Option<f64>,
    /// p_SI/p_I
    pub herald_by_idler: Option<f64>,
}

/// Runs the source at each pulse energy. Point `k` uses seed `seed + k`.
pub fn tradeoff_sweep(
    energies: &[f64],
    mapping: &EnergyMapping,
    template: &SourceModel,
    gate_s: &GateConfig,
    gate_i: &GateConfig,
    n_trials: u64,
    seed: u64,
) -> Result<Vec<TradeoffPoint>, CountingError> {
    let mapping = mapping.validated()?;
    energies
        .iter()
        .enumerate()
        .map(|(k, &energy)| {
            if !(energy.is_finite() && energy >= 0.0) {
                return Err(CountingError::OutOfRange { name: "energy", value: energy, range: "[0, ∞)" });
            }
            let model = SourceModel { mu: mapping.mu(energy), ..*template };
            let events = simulate_trials(&model, n_trials, seed.wrapping_add(k as u64))?;
            let summary = summarize(&events, gate_s, gate_i);
            let eta2 = model.eta_s * model.eta_i;
            Ok(TradeoffPoint {
                energy,
                mu: model.mu,
                omega: mapping.omega(energy),
                excitation: if eta2 > 0.0 { summary.p_si() / eta2 } else { 0.0 },
                summary,
                g2_si: g2_cross(&summary),
                herald_by_signal: heralding_efficiency(&summary, Channel::S).ok(),
                herald_by_idler: heralding_efficiency(&summary, Channel::I).ok(),
            })
        })
        .collect()
}

/// Which gate moves during a delay scan. Gate 1 collects the signal and
/// gate 2 the idler.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScannedGate {
    Gate1,
    Gate2,
}

impl std::str::FromStr for ScannedGate {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "gate1" => Ok(Self::Gate1),
            "gate2" => Ok(Self::Gate2),
            _ => Err(format!("unknown gate {s:?} (gate1, gate2)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GateScanPoint {
    /// Delay of the scanned gate, ns.
    pub delay: f64,
    pub summary: CountSummary,
    pub g2_si: Result<CorrelationEstimate, CountingError>,
}

/// g_SI versus the delay of one gate while the other stays centered at 0.
/// A positive gate-2 delay means the signal gate leads.
pub fn gate_delay_scan(
    events: &EventStream,
    width: f64,
    scanned: ScannedGate,
    delays: &[f64],
) -> Result<Vec<GateScanPoint>, CountingError> {
    let fixed = GateConfig::new(width, 0.0)?;
    delays
        .iter()
        .map(|&delay| {
            let moving = GateConfig::new(width, delay)?;
            let (gs, gi) = match scanned {
                ScannedGate::Gate1 => (moving, fixed),
                ScannedGate::Gate2 => (fixed, moving),
            };
            let summary = summarize(events, &gs, &gi);
            Ok(GateScanPoint { delay, summary, g2_si: g2_cross(&summary) })
        })
        .collect()
}
