mod common;

use common::oracle::ExactDistribution;
use common::*;
use ergm_core::estimation::ExactTable;
use ergm_core::*;
use proptest::prelude::*;
use rand::Rng;

fn endogenous_catalogue() -> Vec<TermSpec> {
    term_catalogue().into_iter().filter(|t| !t.family.is_exogenous() && t.family != Family::Edges).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn exact_normaliser_matches_enumeration(seed in any::<u64>(), n in 2usize..6) {
        let mut r = rng(seed);
        let net = random_network(n, 0.5, &mut r);
        let cat = endogenous_catalogue();
        let terms = vec![TermSpec::edges(), cat[r.random_range(0..cat.len())].clone()];
        let table = ExactTable::build(&net, &terms).unwrap();
        let oracle = ExactDistribution::new(&net, &terms);
        prop_assert_eq!(table.counts.iter().sum::<f64>(), oracle.graphs.len() as f64);
        for _ in 0..5 {
            let theta = [r.random_range(-2.0..2.0), r.random_range(-1.0..1.0)];
            prop_assert!(close(table.log_psi(&theta), oracle.log_psi(&theta), 1e-10));
        }
    }

    #[test]
    fn exact_mle_solves_the_moment_equations(seed in any::<u64>(), n in 5usize..7, which in 0usize..3) {
        let net = random_network(n, 0.45, &mut rng(seed));
        let other = ["kstar(2)", "triangle", "esp(1)"][which];
        let terms = parse_model_terms(&format!("edges + {other}")).unwrap();
        let fit = fit_exact(&net, &terms).unwrap();
        let observed = stat_vector(&net, &terms).unwrap();
        if fit.is_finite() {
            let mean = ExactDistribution::new(&net, &terms).mean(&fit.theta_hat);
            let g = mean.iter().zip(&observed).map(|(m, o)| (m - o).powi(2)).sum::<f64>().sqrt();
            prop_assert!(g <= 1e-8, "gradient {}", g);
        } else {
            // without a finite maximiser the fit either hit the boundary rule
            // or ran off past the divergence threshold
            prop_assert_eq!(fit.aic, f64::INFINITY);
        }
    }

    #[test]
    fn boundary_rule_is_shared_by_all_fitters(seed in any::<u64>(), n in 4usize..7) {
        // a tree has no triangles, so the triangle coefficient goes to −∞
        let mut r = rng(seed);
        let edges: Vec<(usize, usize)> = (1..n).map(|v| (r.random_range(0..v), v)).collect();
        let net = Network::from_edge_list(n, &edges).unwrap();
        let terms = parse_model_terms("edges + triangle").unwrap();
        for fit in [fit_exact(&net, &terms).unwrap(), fit_mple(&net, &terms).unwrap(), fit_mcmle(&net, &terms, &McmleConfig::default(), 1).unwrap()] {
            prop_assert_eq!(&fit.diverged[1], &Divergence::NegInf);
            prop_assert!(fit.has_neg_inf());
            prop_assert_eq!(relative_aic_change(10.0, fit.aic).unwrap(), FAILED_FIT_B);
        }
    }
}

#[test]
fn enumerated_three_node_probabilities() {
    let base = Network::empty(3);
    let uniform = ExactDistribution::new(&base, &[TermSpec::edges()]).probabilities(&[0.0]);
    assert_eq!(uniform.len(), 8);
    assert!(uniform.iter().all(|p| (p - 0.125).abs() < 1e-15));
    let terms = parse_model_terms("edges + triangle").unwrap();
    let p = ExactDistribution::new(&base, &terms).probabilities(&[0.0, 2f64.ln()]);
    assert!((p[7] - 2.0 / 9.0).abs() < 1e-14);
    assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
}

#[test]
fn null_fit_on_florentine_marriage() {
    let fit = fit_null(&florentine_marriage()).unwrap();
    let p: f64 = 20.0 / 120.0;
    let ll = 20.0 * p.ln() + 100.0 * (1.0 - p).ln();
    assert!((fit.loglik - ll).abs() < 1e-12);
    assert!((fit.aic - 110.135).abs() < 1e-3, "{}", fit.aic);
}

#[test]
fn pseudo_likelihood_is_exact_without_dependence() {
    let terms = parse_model_terms("edges + nodematch,attr=g + nodecov,attr=x").unwrap();
    let mut r = rng(17);
    let (mple, exact) = loop {
        let net = with_covariates(random_network(6, 0.4, &mut r), &mut r);
        let exact = fit_exact(&net, &terms).unwrap();
        if exact.is_finite() {
            break (fit_mple(&net, &terms).unwrap(), exact);
        }
    };
    for (a, b) in mple.theta_hat.iter().zip(&exact.theta_hat) {
        assert!((a - b).abs() < 1e-7, "{a} vs {b}");
    }
    assert!(close(mple.loglik, exact.loglik, 1e-9));
}

#[test]
fn mcmle_is_reproducible_and_near_exact() {
    let net = Network::from_edge_list(6, &[(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (4, 5), (1, 4), (0, 5), (0, 3)]).unwrap();
    let terms = parse_model_terms("edges + kstar(2)").unwrap();
    let cfg = McmleConfig::default();
    let a = fit_mcmle(&net, &terms, &cfg, 5).unwrap();
    let b = fit_mcmle(&net, &terms, &cfg, 5).unwrap();
    assert_eq!(format!("{a:?}"), format!("{b:?}"));
    let exact = fit_exact(&net, &terms).unwrap();
    for (x, y) in a.theta_hat.iter().zip(&exact.theta_hat) {
        assert!((x - y).abs() < 0.1, "{:?} vs {:?}", a.theta_hat, exact.theta_hat);
    }
    assert!(((a.aic - exact.aic) / exact.aic).abs() < 0.02);
}

#[test]
fn relative_aic_change_sign() {
    assert!(relative_aic_change(110.0, 100.0).unwrap() > 0.0);
    assert!(relative_aic_change(110.0, 120.0).unwrap() < 0.0);
    assert_eq!(relative_aic_change(110.0, f64::NAN).unwrap(), FAILED_FIT_B);
    assert!(relative_aic_change(0.0, 1.0).is_err());
}

#[test]
fn fit_results_round_trip_through_json() {
    let net = florentine_marriage();
    let terms = parse_model_terms("edges + triangle").unwrap();
    for fit in [fit_mple(&net, &terms).unwrap(), fit_mple(&Network::from_edge_list(4, &[(0, 1)]).unwrap(), &terms).unwrap()] {
        let text = serde_json::to_string(&fit).unwrap();
        let back: FitResult = serde_json::from_str(&text).unwrap();
        assert_eq!(serde_json::to_string(&back).unwrap(), text);
    }
}
