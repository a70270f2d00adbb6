use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Geometric, Normal};
use rayon::prelude::*;

use super::{Channel, CountingError, DetectionEvent, EventStream, SourceModel};

const CHUNK: u64 = 4096;

/// Independent generator for one trial: stream `trial` of the seeded key.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Bose-Einstein photon number with the given mean, summed over `modes`
/// equally populated modes.
pub fn thermal_sample<R: Rng + ?Sized>(mean: f64, modes: u32, rng: &mut R) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    let per_mode = mean / modes as f64;
    let geo = Geometric::new(1.0 / (1.0 + per_mode)).expect("p in (0, 1]");
    (0..modes).map(|_| geo.sample(rng)).sum()
}

struct Samplers {
    lag: Option<Exp<f64>>,
    jitter: Option<Normal<f64>>,
}

impl Samplers {
    fn new(m: &SourceModel) -> Self {
        Self {
            lag: (m.cascade_lag > 0.0).then(|| Exp::new(1.0 / m.cascade_lag).expect("positive rate")),
            jitter: (m.jitter > 0.0).then(|| Normal::new(0.0, m.jitter).expect("positive sigma")),
        }
    }
}

fn emission_time(m: &SourceModel, rng: &mut ChaCha8Rng) -> f64 {
    if m.emission_window > 0.0 {
        m.emission_window * (rng.random::<f64>() - 0.5)
    } else {
        0.0
    }
}

fn run_trial(m: &SourceModel, s: &Samplers, trial: u64, rng: &mut ChaCha8Rng, out: &mut Vec<DetectionEvent>) {
    let start = out.len();
    let mut push = |channel, time: f64, rng: &mut ChaCha8Rng| {
        let t = match &s.jitter {
            Some(j) => time + j.sample(rng),
            None => time,
        };
        out.push(DetectionEvent { trial, channel, time: t });
    };
    let idler_delay = |rng: &mut ChaCha8Rng| s.lag.as_ref().map_or(0.0, |e| e.sample(rng));

    let pairs = thermal_sample(m.correlated_mean(), m.schmidt_modes, rng);
    for _ in 0..pairs {
        let ts = emission_time(m, rng);
        let ti = ts + idler_delay(rng);
        if rng.random::<f64>() < m.eta_s {
            push(Channel::S, ts, rng);
        }
        if rng.random::<f64>() < m.eta_i {
            push(Channel::I, ti, rng);
        }
    }
    let uncorrelated = m.uncorrelated_mean();
    if uncorrelated > 0.0 {
        for _ in 0..thermal_sample(uncorrelated, m.schmidt_modes, rng) {
            let ts = emission_time(m, rng);
            if rng.random::<f64>() < m.eta_s {
                push(Channel::S, ts, rng);
            }
        }
        for _ in 0..thermal_sample(uncorrelated, m.schmidt_modes, rng) {
            let ti = emission_time(m, rng) + idler_delay(rng);
            if rng.random::<f64>() < m.eta_i {
                push(Channel::I, ti, rng);
            }
        }
    }
    let (lo, hi) = m.record_window;
    for (channel, p) in [(Channel::S, m.noise_s), (Channel::I, m.noise_i)] {
        if p > 0.0 && rng.random::<f64>() < p {
            let t = lo + (hi - lo) * rng.random::<f64>();
            push(channel, t, rng);
        }
    }
    out[start..].sort_by(|a, b| a.time.total_cmp(&b.time).then(a.channel.cmp(&b.channel)));
}

/// Simulates `n_trials` pulses. Each trial draws from its own generator, so
/// the result does not depend on how trials are spread over threads.
pub fn simulate_trials(model: &SourceModel, n_trials: u64, seed: u64) -> Result<EventStream, CountingError> {
    let m = model.validated()?;
    if n_trials == 0 {
        return Err(CountingError::OutOfRange { name: "trials", value: 0.0, range: "[1, ∞)" });
    }
    let samplers = Samplers::new(&m);
    let base = ChaCha8Rng::seed_from_u64(seed);
    let chunks: Vec<Vec<DetectionEvent>> = (0..n_trials.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut out = Vec::new();
            for trial in c * CHUNK..((c + 1) * CHUNK).min(n_trials) {
                let mut rng = base.clone();
                rng.set_stream(trial);
                run_trial(&m, &samplers, trial, &mut rng, &mut out);
            }
            out
        })
        .collect();
    Ok(EventStream { n_trials, events: chunks.concat() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_mean_zero_noise_is_empty() {
        let m = SourceModel { mu: 0.0, ..SourceModel::default() };
        assert!(simulate_trials(&m, 10_000, 1).unwrap().events.is_empty());
    }

    #[test]
    fn deterministic_and_thread_independent() {
        let m = SourceModel { mu: 0.3, noise_s: 0.01, jitter: 0.2, cascade_lag: 1.0, ..SourceModel::ideal(0.3) };
        let a = simulate_trials(&m, 20_000, 9).unwrap();
        let b = simulate_trials(&m, 20_000, 9).unwrap();
        assert_eq!(a, b);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let c = pool.install(|| simulate_trials(&m, 20_000, 9).unwrap());
        assert_eq!(a, c);
        assert_ne!(a, simulate_trials(&m, 20_000, 10).unwrap());
    }

    #[test]
    fn trial_generator_matches_stream() {
        let mut a = trial_rng(5, 17);
        let mut b = ChaCha8Rng::seed_from_u64(5);
        b.set_stream(17);
        assert_eq!(a.random::<u64>(), b.random::<u64>());
    }

    #[test]
    fn thermal_mean_and_variance() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 200_000;
        let xs: Vec<f64> = (0..n).map(|_| thermal_sample(0.5, 1, &mut rng) as f64).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
        assert!((mean - 0.5).abs() < 0.01);
        // ⟨n²⟩ − ⟨n⟩² = μ² + μ
        assert!((var - 0.75).abs() < 0.03);
        let ys: Vec<f64> = (0..n).map(|_| thermal_sample(0.5, 4, &mut rng) as f64).collect();
        let mean = ys.iter().sum::<f64>() / n as f64;
        let var = ys.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
        assert!((var - (0.25 / 4.0 + 0.5)).abs() < 0.02);
    }

    #[test]
    fn noise_clicks_stay_in_record_window() {
        let m = SourceModel { mu: 0.0, noise_s: 0.5, noise_i: 0.5, record_window: (-10.0, 10.0), ..SourceModel::default() };
        let ev = simulate_trials(&m, 10_000, 2).unwrap();
        assert!(ev.events.iter().all(|e| (-10.0..10.0).contains(&e.time)));
        let frac = ev.count(Channel::S) as f64 / 10_000.0;
        assert!((frac - 0.5).abs() < 0.03);
    }

    #[test]
    fn idler_follows_signal_with_lag() {
        let m = SourceModel { cascade_lag: 2.0, emission_window: 0.0, ..SourceModel::ideal(0.05) };
        let ev = simulate_trials(&m, 100_000, 4).unwrap();
        let mut sum = 0.0;
        let mut n = 0;
        for t in ev.by_trial() {
            if t.len() == 2 {
                let s = t.iter().find(|e| e.channel == Channel::S).map(|e| e.time);
                let i = t.iter().find(|e| e.channel == Channel::I).map(|e| e.time);
                if let (Some(s), Some(i)) = (s, i) {
                    assert!(i >= s);
                    sum += i - s;
                    n += 1;
                }
            }
        }
        assert!((sum / n as f64 - 2.0).abs() < 0.1);
    }
}
