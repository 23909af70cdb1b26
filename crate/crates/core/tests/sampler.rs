mod common;

use common::*;
use ergm_core::sampler::Chain;
use ergm_core::seed::rng_from_seed;
use ergm_core::*;
use proptest::prelude::*;

#[test]
fn edges_only_mean_matches_binomial() {
    let theta0 = (0.2f64).ln();
    let cfg = SamplerConfig {
        burn_in: 10,
        interval: 1,
        draws: 500,
        seed: 11,
        init: Init::Empty,
    };
    let draws = sample_stats(&ErgmModel::edges_only(theta0), &Network::empty(16), &cfg).unwrap();
    let xs: Vec<f64> = draws.iter().map(|s| s[0]).collect();
    let (mean, se) = batch_means(&xs, 20);
    assert!((mean - 20.0).abs() <= 3.0 * se, "mean {mean}, se {se}");
}

#[test]
fn chain_matches_exact_distribution() {
    let terms = parse_model_terms("edges + triangle").unwrap();
    let tv = chain_tv(&terms, &[-0.4, 0.7], 4, 400_000, 3);
    assert!(tv < 0.02, "{tv}");
    let terms = parse_model_terms("edges + kstar(2)").unwrap();
    let tv = chain_tv(&terms, &[0.3, -0.35], 4, 400_000, 4);
    assert!(tv < 0.02, "{tv}");
}

#[test]
fn fixed_seed_is_reproducible() {
    let net = florentine_marriage();
    let model = ErgmModel::new(parse_model_terms("edges + triangle").unwrap(), vec![-1.5, 0.2]).unwrap();
    let cfg = SamplerConfig {
        seed: 99,
        init: Init::Observed,
        ..SamplerConfig::default()
    };
    let a = sample(&model, &net, &cfg).unwrap();
    let b = sample(&model, &net, &cfg).unwrap();
    assert_eq!(a.stats, b.stats);
    assert_eq!(a.networks, b.networks);
    let c = sample(&model, &net, &SamplerConfig { seed: 100, ..cfg }).unwrap();
    assert_ne!(a.stats, c.stats);
}

#[test]
fn rejects_bad_schedules() {
    let model = ErgmModel::edges_only(0.0);
    let net = Network::empty(5);
    for cfg in [
        SamplerConfig { interval: 0, ..SamplerConfig::default() },
        SamplerConfig { draws: 0, ..SamplerConfig::default() },
        SamplerConfig { init: Init::Bernoulli(1.5), ..SamplerConfig::default() },
    ] {
        assert!(sample(&model, &net, &cfg).is_err());
    }
    let bad = ErgmModel::new(vec![TermSpec::edges()], vec![f64::NAN]);
    assert!(bad.is_err() || sample(&bad.unwrap(), &net, &SamplerConfig::default()).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn running_statistics_track_the_state(seed in any::<u64>(), n in 2usize..12, t0 in -2.0f64..1.0, t1 in -0.5f64..0.3) {
        let terms = parse_model_terms("edges + gwesp,decay=0.5 + degcrossprod").unwrap();
        let model = ErgmModel::new(terms.clone(), vec![t0, t1, 0.05]).unwrap();
        let mut chain = Chain::new(&model, Network::empty(n), rng_from_seed(seed)).unwrap();
        for _ in 0..5 {
            chain.sweeps(1);
            let recount = stat_vector(chain.state(), &terms).unwrap();
            for (a, b) in chain.stats().iter().zip(&recount) {
                prop_assert!(close(*a, *b, 1e-9), "{a} vs {b}");
            }
        }
    }

    #[test]
    fn draw_count_and_node_set_are_preserved(seed in any::<u64>(), n in 2usize..10, draws in 1usize..20) {
        let cfg = SamplerConfig { burn_in: 1, interval: 1, draws, seed, init: Init::Bernoulli(0.3) };
        let s = sample_nodes(&ErgmModel::edges_only(-0.5), n, &cfg).unwrap();
        prop_assert_eq!(s.networks.len(), draws);
        prop_assert_eq!(s.stats.len(), draws);
        for (g, st) in s.networks.iter().zip(&s.stats) {
            prop_assert_eq!(g.node_count(), n);
            prop_assert_eq!(g.edge_count() as f64, st[0]);
        }
    }
}
