use rand::Rng;

use super::{simulate::trial_rng, Channel, CountingError, EventStream};

/// Integration gate: clicks in [delay − width/2, delay + width/2) count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateConfig {
    pub width: f64,
    pub delay: f64,
}

impl GateConfig {
    pub fn new(width: f64, delay: f64) -> Result<Self, CountingError> {
        if !width.is_finite() {
            return Err(CountingError::NonFinite("gate width"));
        }
        if !delay.is_finite() {
            return Err(CountingError::NonFinite("gate delay"));
        }
        if width <= 0.0 {
            return Err(CountingError::OutOfRange { name: "gate width", value: width, range: "(0, ∞)" });
        }
        Ok(Self { width, delay })
    }

    pub fn contains(&self, t: f64) -> bool {
        let h = 0.5 * self.width;
        t >= self.delay - h && t < self.delay + h
    }

    pub fn shifted(&self, by: f64) -> Self {
        Self { delay: self.delay + by, ..*self }
    }
}

/// Click counts over a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CountSummary {
    pub n_trials: u64,
    pub n_s: u64,
    pub n_i: u64,
    pub n_si: u64,
}

impl CountSummary {
    fn p(&self, n: u64) -> f64 {
        if self.n_trials == 0 {
            0.0
        } else {
            n as f64 / self.n_trials as f64
        }
    }

    pub fn p_s(&self) -> f64 {
        self.p(self.n_s)
    }

    pub fn p_i(&self) -> f64 {
        self.p(self.n_i)
    }

    pub fn p_si(&self) -> f64 {
        self.p(self.n_si)
    }
}

/// Each channel clicks at most once per trial; a coincidence needs both
/// channels inside their gates in the same trial.
pub fn summarize(events: &EventStream, gate_s: &GateConfig, gate_i: &GateConfig) -> CountSummary {
    let mut s = CountSummary { n_trials: events.n_trials, ..Default::default() };
    for trial in events.by_trial() {
        let cs = trial.iter().any(|e| e.channel == Channel::S && gate_s.contains(e.time));
        let ci = trial.iter().any(|e| e.channel == Channel::I && gate_i.contains(e.time));
        s.n_s += cs as u64;
        s.n_i += ci as u64;
        s.n_si += (cs && ci) as u64;
    }
    s
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationEstimate {
    pub value: f64,
    pub sigma: f64,
}

/// g = n_ab·n/(n_a·n_b), with independent √N errors on the three counts.
fn ratio_estimate(n: u64, n_a: u64, n_b: u64, n_ab: u64) -> Result<CorrelationEstimate, CountingError> {
    if n_a == 0 || n_b == 0 {
        return Err(CountingError::Undefined("a channel has no clicks"));
    }
    let (n, a, b, ab) = (n as f64, n_a as f64, n_b as f64, n_ab as f64);
    let k = n / (a * b);
    let value = ab * k;
    let sigma = (k * k * ab + value * value / a + value * value / b).sqrt();
    Ok(CorrelationEstimate { value, sigma })
}

pub fn g2_cross(summary: &CountSummary) -> Result<CorrelationEstimate, CountingError> {
    ratio_estimate(summary.n_trials, summary.n_s, summary.n_i, summary.n_si)
}

/// Splits the channel on a balanced beam splitter (each in-gate photon goes
/// to sub-detector a or b with probability ½) and returns p_ab/(p_a·p_b).
pub fn g2_auto(
    events: &EventStream,
    channel: Channel,
    gate: &GateConfig,
    splitter_seed: u64,
) -> Result<CorrelationEstimate, CountingError> {
    let (mut na, mut nb, mut nab) = (0, 0, 0);
    for trial in events.by_trial() {
        let mut rng = trial_rng(splitter_seed, trial[0].trial);
        let (mut a, mut b) = (false, false);
        for _ in trial.iter().filter(|e| e.channel == channel && gate.contains(e.time)) {
            if rng.random::<bool>() {
                a = true;
            } else {
                b = true;
            }
        }
        na += a as u64;
        nb += b as u64;
        nab += (a && b) as u64;
    }
    ratio_estimate(events.n_trials, na, nb, nab)
}

/// Outcome of the classical bound (g_SI)² ≤ g_SS·g_II.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CsResult {
    pub violated: bool,
    /// g_SI² − g_SS·g_II
    pub margin: f64,
    pub sigma_margin: f64,
    /// margin / sigma_margin
    pub sigma_count: f64,
}

pub fn cs_test(g_si: &CorrelationEstimate, g_ss: &CorrelationEstimate, g_ii: &CorrelationEstimate) -> CsResult {
    let margin = g_si.value.powi(2) - g_ss.value * g_ii.value;
    let sigma_margin = ((2.0 * g_si.value * g_si.sigma).powi(2)
        + (g_ii.value * g_ss.sigma).powi(2)
        + (g_ss.value * g_ii.sigma).powi(2))
    .sqrt();
    let sigma_count = if sigma_margin > 0.0 {
        margin / sigma_margin
    } else if margin == 0.0 {
        0.0
    } else {
        margin.signum() * f64::INFINITY
    };
    CsResult { violated: margin > 0.0, margin, sigma_margin, sigma_count }
}

/// p_SI / p_herald: chance the partner clicks given a herald click.
pub fn heralding_efficiency(summary: &CountSummary, herald: Channel) -> Result<f64, CountingError> {
    let n = match herald {
        Channel::S => summary.n_s,
        Channel::I => summary.n_i,
    };
    if n == 0 {
        return Err(CountingError::Undefined("herald channel has no clicks"));
    }
    Ok(summary.n_si as f64 / n as f64)
}
