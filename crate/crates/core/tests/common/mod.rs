#![allow(dead_code)]

pub mod oracle;

use std::path::PathBuf;

use ergm_core::io::parse_edge_list;
use ergm_core::sampler::Chain;
use ergm_core::seed::rng_from_seed;
use ergm_core::{Attribute, ErgmModel, Family, Network, TermSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use oracle::ExactDistribution;

pub fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

pub fn load(name: &str) -> Network {
    let text = std::fs::read_to_string(data_path(name)).unwrap();
    parse_edge_list(&text).unwrap()
}

pub fn florentine_marriage() -> Network {
    load("florentine_marriage.edgelist")
}

pub fn florentine_business() -> Network {
    load("florentine_business.edgelist")
}

pub fn random_network(n: usize, p: f64, rng: &mut ChaCha8Rng) -> Network {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random::<f64>() < p {
                edges.push((i, j));
            }
        }
    }
    Network::from_edge_list(n, &edges).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// One term per family and a spread of `k` / decay values; exogenous terms
/// refer to the attributes added by [`with_covariates`].
pub fn term_catalogue() -> Vec<TermSpec> {
    let mut v = vec![
        TermSpec::edges(),
        TermSpec::plain(Family::Triangle),
        TermSpec::plain(Family::Isolates),
        TermSpec::plain(Family::Sociality),
        TermSpec::plain(Family::DegCrossProd),
        TermSpec::plain(Family::DegreePopularity),
        TermSpec::exogenous(Family::NodeCov, "x"),
        TermSpec::exogenous(Family::AbsDiff, "x"),
        TermSpec::exogenous(Family::NodeMatch, "g"),
    ];
    for k in 2..=4 {
        v.push(TermSpec::kstar(k));
    }
    for family in [Family::Dsp, Family::Esp, Family::Nsp] {
        for k in 0..=3 {
            v.push(TermSpec::with_k(family, k));
        }
    }
    for family in [Family::GwEsp, Family::GwDsp, Family::GwNsp, Family::GwDegree] {
        for decay in [0.0, 0.5, 1.3] {
            v.push(TermSpec::with_decay(family, decay));
        }
    }
    v
}

pub fn with_covariates(mut net: Network, rng: &mut ChaCha8Rng) -> Network {
    let n = net.node_count();
    let x = (0..n).map(|_| (rng.random::<f64>() * 10.0).round() / 4.0).collect();
    let g = (0..n).map(|_| ["a", "b", "c"][rng.random_range(0..3)].to_string()).collect();
    net.set_attribute("x", Attribute::Numeric(x)).unwrap();
    net.set_attribute("g", Attribute::Categorical(g)).unwrap();
    net
}

/// Relative tolerance check used for real-valued statistics.
pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

/// Index of `net` in the oracle's bitmask enumeration.
pub fn graph_index(net: &Network) -> usize {
    let n = net.node_count();
    let mut bit = 0;
    let mut index = 0;
    for i in 0..n {
        for j in i + 1..n {
            if net.has_edge(i, j) {
                index |= 1 << bit;
            }
            bit += 1;
        }
    }
    index
}

pub fn chain_tv(terms: &[TermSpec], theta: &[f64], n: usize, steps: usize, seed: u64) -> f64 {
    let base = Network::empty(n);
    let exact = ExactDistribution::new(&base, terms).probabilities(theta);
    let model = ErgmModel::new(terms.to_vec(), theta.to_vec()).unwrap();
    let mut chain = Chain::new(&model, base, rng_from_seed(seed)).unwrap();
    chain.sweeps(50);
    let mut visits = vec![0usize; exact.len()];
    for _ in 0..steps {
        chain.step();
        visits[graph_index(chain.state())] += 1;
    }
    0.5 * visits
        .iter()
        .zip(&exact)
        .map(|(&v, p)| (v as f64 / steps as f64 - p).abs())
        .sum::<f64>()
}

/// Mean and Monte-Carlo standard error from non-overlapping batch means,
/// which absorbs the autocorrelation between successive sweeps.
pub fn batch_means(xs: &[f64], batches: usize) -> (f64, f64) {
    let size = xs.len() / batches;
    let means: Vec<f64> = xs.chunks_exact(size).map(|c| c.iter().sum::<f64>() / size as f64).collect();
    let mean = means.iter().sum::<f64>() / means.len() as f64;
    let var = means.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / (means.len() - 1) as f64;
    (mean, (var / means.len() as f64).sqrt())
}
