//! Benchmark fixtures shared by the criterion targets.

use ergm_core::io::parse_edge_list;
use ergm_core::{sample_nodes, ErgmModel, Init, Network, SamplerConfig};

pub fn florentine() -> Network {
    parse_edge_list(include_str!("../../../data/florentine_marriage.edgelist")).expect("vendored network parses")
}

/// A Bernoulli graph on `n` nodes with expected density `p`.
pub fn bernoulli(n: usize, p: f64, seed: u64) -> Network {
    let model = ErgmModel::edges_only((p / (1.0 - p)).ln());
    let cfg = SamplerConfig {
        burn_in: 4,
        interval: 1,
        draws: 1,
        seed,
        init: Init::Bernoulli(p),
    };
    sample_nodes(&model, n, &cfg).expect("valid schedule").networks.pop().unwrap()
}
