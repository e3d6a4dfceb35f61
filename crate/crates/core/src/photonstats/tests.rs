use super::*;
use crate::efficiency::{internal_efficiency, klyshko};

fn lossless() -> ChannelModel {
    ChannelModel::new(1.0, 1.0, 1.0, 1.0).unwrap()
}

#[test]
fn distributions_are_normalized() {
    for modes in [1, 3] {
        let s = SourceModel::with_default_truncation(0.15, modes).unwrap();
        let pn = s.pair_distribution();
        assert!((pn.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(pn.iter().all(|&p| p >= 0.0));
        let d = fock_exact(&s, &ChannelModel::new(0.3, 0.4, 0.755, 0.9).unwrap()).unwrap();
        assert!((d.total() - 1.0).abs() < 1e-10);
        assert!(d.outcomes.iter().all(|&p| p >= 0.0));
    }
}

#[test]
fn truncation_is_checked() {
    assert!(matches!(
        SourceModel::with_default_truncation(5.0, 1),
        Err(Error::TruncationInsufficient { truncation: 10, .. })
    ));
    let s = SourceModel::auto(5.0, 1).unwrap();
    assert!(s.truncation() > 10 && s.tail_per_mode() < TAIL_LIMIT);
    assert!(SourceModel::new(-0.1, 1, 10).is_err());
    assert!(SourceModel::new(0.1, 0, 10).is_err());
    assert!(ChannelModel::new(1.1, 1.0, 1.0, 1.0).is_err());
}

#[test]
fn vacuum_never_clicks() {
    let s = SourceModel::with_default_truncation(0.0, 1).unwrap();
    let c = click_probabilities(&s, &lossless(), Method::FockExact).unwrap();
    assert_eq!((c.p_h, c.p_cc, c.p_1, c.p_2, c.p_cc12), (0.0, 0.0, 0.0, 0.0, 0.0));
    let mc = click_probabilities(&s, &lossless(), Method::MonteCarlo { seed: 3, trials: 10_000 }).unwrap();
    assert_eq!(mc.p_h, 0.0);
}

#[test]
fn weak_lossless_source_is_a_single_photon() {
    let s = SourceModel::with_default_truncation(1e-4, 1).unwrap();
    let c = click_probabilities(&s, &lossless(), Method::FockExact).unwrap();
    assert!((c.p_cc / c.p_h - 1.0).abs() < 1e-12);
    let g = heralded_g2(&s, &lossless(), Method::FockExact).unwrap();
    assert!(g.value < 1e-3, "{}", g.value);
}

#[test]
fn unheralded_thermal_light_bunches() {
    let s = SourceModel::with_default_truncation(0.01, 1).unwrap();
    let ch = lossless();
    let exact = g2(&s, &ch, Method::FockExact, Conditioning::Unheralded).unwrap();
    // Click detectors slightly saturate: P(1∧2)/(P(1)P(2)) = 2(1+a)/(1+2a) with a = μ/2.
    assert!((exact.value - 2.0 * 1.005 / 1.01).abs() < 1e-10, "{}", exact.value);
    let mc = g2(&s, &ch, Method::MonteCarlo { seed: 11, trials: 1_000_000 }, Conditioning::Unheralded).unwrap();
    assert!((mc.value - 2.0).abs() < 3.0 * mc.std_error, "{} ± {}", mc.value, mc.std_error);
}

#[test]
fn loss_composes() {
    let s = SourceModel::with_default_truncation(0.2, 2).unwrap();
    let a = fock_exact(&s, &ChannelModel::new(0.5, 0.6, 0.7, 0.8).unwrap()).unwrap();
    let b = fock_exact(&s, &ChannelModel::new(0.5, 0.6 * 0.7 * 0.8, 1.0, 1.0).unwrap()).unwrap();
    for (x, y) in a.outcomes.iter().zip(b.outcomes) {
        assert!((x - y).abs() < 1e-12);
    }
}

#[test]
fn g2_increases_with_pair_number() {
    let ch = ChannelModel::new(0.2, 0.2, 0.755, 1.0).unwrap();
    let values: Vec<f64> = [0.001, 0.01, 0.05, 0.1, 0.15, 0.2]
        .iter()
        .map(|&mu| heralded_g2(&SourceModel::auto(mu, 1).unwrap(), &ch, Method::FockExact).unwrap().value)
        .collect();
    assert!(values.windows(2).all(|w| w[1] > w[0]), "{values:?}");
}

#[test]
fn fitted_source_reproduces_target() {
    let ch = ChannelModel::new(0.2, 0.2, 1.0, 1.0).unwrap();
    let s = fit_mean_pairs_for_g2(0.32, 1, &ch).unwrap();
    let g = heralded_g2(&s, &ch, Method::FockExact).unwrap();
    assert!((g.value - 0.32).abs() < 1e-9);
    assert!(fit_mean_pairs_for_g2(2.5, 1, &ch).is_err());
}

#[test]
fn conversion_changes_click_g2_only_weakly() {
    // With threshold detectors the heralded g² depends on the signal-arm
    // transmission, because a click saturates at one photon. The dependence
    // is far below the ±0.01 measurement resolution but not zero.
    let ch = ChannelModel::new(0.2, 0.2, 1.0, 1.0).unwrap();
    let s = fit_mean_pairs_for_g2(0.32, 1, &ch).unwrap();
    let r = g2_conversion_invariance(&s, &ch, &[0.1, 0.5, 0.755, 1.0], Method::FockExact).unwrap();
    let spread = r.max_spread();
    assert!(spread > 1e-6 && spread < 0.01, "{spread}");
    assert!(g2_conversion_invariance(&s, &ch, &[0.0], Method::FockExact).is_err());

    let s3 = fit_mean_pairs_for_g2(0.32, 3, &ch).unwrap();
    let r3 = g2_conversion_invariance(&s3, &ch, &[0.1, 0.5, 0.755, 1.0], Method::FockExact).unwrap();
    assert!(r3.max_spread() < 0.01);
}

#[test]
fn monte_carlo_matches_exact() {
    let ch = ChannelModel::new(0.3, 0.5, 0.755, 0.9).unwrap();
    for (k, mu) in [0.02, 0.1, 0.2].into_iter().enumerate() {
        let s = SourceModel::auto(mu, 1 + k).unwrap();
        let exact = fock_exact(&s, &ch).unwrap();
        let n = 1_000_000u64;
        let mc = monte_carlo(&s, &ch, 100 + k as u64, n).unwrap();
        for (p, q) in exact.outcomes.iter().zip(mc.outcomes) {
            let se = (p * (1.0 - p) / n as f64).sqrt();
            assert!((p - q).abs() < 3.0 * se + 1e-12, "{p} vs {q}");
        }
    }
}

#[test]
fn monte_carlo_is_thread_count_independent() {
    let s = SourceModel::with_default_truncation(0.1, 2).unwrap();
    let ch = ChannelModel::new(0.3, 0.5, 0.755, 0.9).unwrap();
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| monte_carlo(&s, &ch, 42, 300_001).unwrap())
    };
    let a = run(1);
    assert_eq!(a, run(4));
    assert_eq!(a, run(3));
    assert_ne!(a, monte_carlo(&s, &ch, 43, 300_001).unwrap());
}

#[test]
fn too_few_heralds_is_an_error() {
    let s = SourceModel::with_default_truncation(0.001, 1).unwrap();
    let ch = ChannelModel::new(0.1, 0.5, 1.0, 1.0).unwrap();
    let r = heralded_g2(&s, &ch, Method::MonteCarlo { seed: 1, trials: 1000 });
    assert!(matches!(r, Err(Error::MonteCarloUnderflow { required: 100, .. })));
}

#[test]
fn klyshko_recovers_planted_transmission() {
    let s = SourceModel::with_default_truncation(0.01, 1).unwrap();
    let t = 0.3;
    let ch = ChannelModel::new(1.0, t, 1.0, 1.0).unwrap();
    let stats = click_probabilities(&s, &ch, Method::MonteCarlo { seed: 5, trials: 1_000_000 }).unwrap();
    let est = klyshko(&stats).unwrap();
    assert!((est.value - t).abs() < 3.0 * est.std_error, "{} ± {}", est.value, est.std_error);
}

#[test]
fn depletion_synthesis_recovers_internal_efficiency() {
    let s = SourceModel::with_default_truncation(0.02, 1).unwrap();
    let converter = ChannelModel::new(1.0, 0.4, 0.755, 1.0).unwrap();
    let open = converter.unconverted_port(0.5).unwrap();
    let blocked = converter.with_conversion_efficiency(1.0).unwrap();
    let blocked = ChannelModel { signal_transmission_after: 0.5, ..blocked };
    let n = 1_000_000;
    let ko = klyshko(&click_probabilities(&s, &open, Method::MonteCarlo { seed: 7, trials: n }).unwrap()).unwrap();
    let kb = klyshko(&click_probabilities(&s, &blocked, Method::MonteCarlo { seed: 8, trials: n }).unwrap()).unwrap();
    let eta = internal_efficiency(ko.value, kb.value).unwrap().value;
    let sigma = (ko.std_error / kb.value).hypot(ko.value * kb.std_error / (kb.value * kb.value));
    assert!((eta - 0.755).abs() < 3.0 * sigma, "{eta} ± {sigma}");
}
