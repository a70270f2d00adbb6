use multifield::counting::{
    cs_test, g2_auto, g2_cross, simulate_trials, summarize, Channel, GateConfig, SourceModel,
};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn counts_are_consistent(
        mu in 0.0f64..0.5, eta_s in 0.0f64..1.0, eta_i in 0.0f64..1.0,
        noise in 0.0f64..0.2, purity in 0.5f64..1.0, lag in 0.0f64..3.0,
        width in 0.5f64..9.0, delay in -3.0f64..3.0, seed in any::<u64>()
    ) {
        let m = SourceModel { mu, eta_s, eta_i, noise_s: noise, noise_i: noise, purity,
            cascade_lag: lag, jitter: 0.2, ..SourceModel::default() };
        let ev = simulate_trials(&m, 5000, seed).unwrap();
        let s = summarize(&ev, &GateConfig::new(width, 0.0).unwrap(), &GateConfig::new(width, delay).unwrap());
        prop_assert!(s.n_si <= s.n_s.min(s.n_i));
        prop_assert!(s.n_s.max(s.n_i) <= s.n_trials);
        for p in [s.p_s(), s.p_i(), s.p_si()] {
            prop_assert!((0.0..=1.0).contains(&p));
        }
        if let Ok(g) = g2_cross(&s) {
            prop_assert!(g.value >= 0.0 && g.sigma >= 0.0);
        }
        prop_assert_eq!(ev.clone(), simulate_trials(&m, 5000, seed).unwrap());
    }
}

#[test]
fn independent_sources_respect_classical_bound() {
    // purity 0.5 leaves only the two independent thermal arms
    let m = SourceModel { purity: 0.5, ..SourceModel::ideal(0.2) };
    let ev = simulate_trials(&m, 1_000_000, 21).unwrap();
    let gate = GateConfig::new(100.0, 0.0).unwrap();
    let gsi = g2_cross(&summarize(&ev, &gate, &gate)).unwrap();
    assert!((gsi.value - 1.0).abs() < 3.0 * gsi.sigma, "{gsi:?}");
    let gss = g2_auto(&ev, Channel::S, &gate, 1).unwrap();
    let gii = g2_auto(&ev, Channel::I, &gate, 2).unwrap();
    assert!(!cs_test(&gsi, &gss, &gii).violated);
}

#[test]
fn ideal_cross_correlation_matches_click_limit() {
    // click detectors give 1 + 1/μ; the number-basis value 2 + 1/μ differs by 1
    for (mu, seed) in [(0.05, 1u64), (0.2, 2)] {
        let ev = simulate_trials(&SourceModel::ideal(mu), 1_000_000, seed).unwrap();
        let gate = GateConfig::new(100.0, 0.0).unwrap();
        let g = g2_cross(&summarize(&ev, &gate, &gate)).unwrap();
        let click = 1.0 + 1.0 / mu;
        assert!((g.value - click).abs() < 3.0 * g.sigma, "mu {mu}: {g:?}");
    }
}
