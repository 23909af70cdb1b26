//! Random-scan Gibbs sampler over dyads.
//!
//! Each step picks one of the `C(N,2)` dyads uniformly and sets it present
//! with probability `logistic(θ·Δ)`, where `Δ` is the addition change-score
//! vector of that dyad given the rest of the graph. A sweep is `C(N,2)` steps.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{ErgmError, Result};
use crate::graph::Network;
use crate::model::{dot, ErgmModel};
use crate::seed::rng_from_seed;
use crate::stats::{add_delta, stat_vector};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Init {
    Empty,
    Observed,
    Bernoulli(f64),
}

/// Chain schedule. `burn_in` and `interval` are counted in sweeps.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub burn_in: u64,
    pub interval: u64,
    pub draws: usize,
    pub seed: u64,
    pub init: Init,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            burn_in: 20,
            interval: 2,
            draws: 100,
            seed: 0,
            init: Init::Empty,
        }
    }
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.interval < 1 {
            return Err(ErgmError::InvalidConfig("interval must be at least 1".into()));
        }
        if self.draws < 1 {
            return Err(ErgmError::InvalidConfig("draws must be at least 1".into()));
        }
        if let Init::Bernoulli(p) = self.init {
            if !(0.0..=1.0).contains(&p) {
                return Err(ErgmError::InvalidConfig(format!("bernoulli init p={p} outside [0,1]")));
            }
        }
        Ok(())
    }
}

#[inline]
pub fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Uniformly random unordered pair `(i, j)` with `i < j`. Needs `n ≥ 2`.
#[inline]
pub fn random_dyad<R: Rng>(n: usize, rng: &mut R) -> (usize, usize) {
    let a = rng.random_range(0..n);
    let mut b = rng.random_range(0..n - 1);
    if b >= a {
        b += 1;
    }
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// One Gibbs update of dyad `{i, j}`. Writes the addition change scores into
/// `delta` and returns `(was_present, is_present)`.
pub fn step<R: Rng>(
    model: &ErgmModel,
    state: &mut Network,
    i: usize,
    j: usize,
    delta: &mut [f64],
    rng: &mut R,
) -> (bool, bool) {
    let was = state.has_edge(i, j);
    if was {
        state.set_dyad(i, j, false);
    }
    for (d, t) in delta.iter_mut().zip(model.terms()) {
        *d = add_delta(state, t, i, j);
    }
    let p = logistic(dot(model.theta(), delta));
    let now = rng.random::<f64>() < p;
    if now {
        state.set_dyad(i, j, true);
    }
    (was, now)
}

/// A single Markov chain with its running statistic vector.
pub struct Chain<'m> {
    model: &'m ErgmModel,
    state: Network,
    stats: Vec<f64>,
    delta: Vec<f64>,
    rng: ChaCha8Rng,
}

impl<'m> Chain<'m> {
    pub fn new(model: &'m ErgmModel, start: Network, rng: ChaCha8Rng) -> Result<Self> {
        model.check_finite()?;
        model.check_network(&start)?;
        let stats = stat_vector(&start, model.terms())?;
        Ok(Chain {
            model,
            state: start,
            stats,
            delta: vec![0.0; model.len()],
            rng,
        })
    }

    pub fn state(&self) -> &Network {
        &self.state
    }

    pub fn stats(&self) -> &[f64] {
        &self.stats
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn step(&mut self) {
        let n = self.state.node_count();
        if n < 2 {
            return;
        }
        let (i, j) = random_dyad(n, &mut self.rng);
        let (was, now) = step(self.model, &mut self.state, i, j, &mut self.delta, &mut self.rng);
        if was != now {
            let sign = if now { 1.0 } else { -1.0 };
            for (s, d) in self.stats.iter_mut().zip(&self.delta) {
                *s += sign * d;
            }
        }
    }

    pub fn sweeps(&mut self, count: u64) {
        let steps = count * self.state.dyad_count() as u64;
        for _ in 0..steps {
            self.step();
        }
    }
}

fn start_state(base: &Network, init: Init, rng: &mut ChaCha8Rng) -> Network {
    match init {
        Init::Observed => base.clone(),
        Init::Empty => base.cleared(),
        Init::Bernoulli(p) => {
            let mut net = base.cleared();
            let n = net.node_count();
            for i in 0..n {
                for j in i + 1..n {
                    if rng.random::<f64>() < p {
                        net.set_dyad(i, j, true);
                    }
                }
            }
            net
        }
    }
}

/// Runs the schedule in `cfg`, calling `on_draw` with each retained state and
/// its statistic vector.
pub fn run_chain<F>(model: &ErgmModel, base: &Network, cfg: &SamplerConfig, mut on_draw: F) -> Result<()>
where
    F: FnMut(&Network, &[f64]),
{
    cfg.validate()?;
    let mut rng = rng_from_seed(cfg.seed);
    let start = start_state(base, cfg.init, &mut rng);
    let mut chain = Chain::new(model, start, rng)?;
    chain.sweeps(cfg.burn_in);
    for _ in 0..cfg.draws {
        chain.sweeps(cfg.interval);
        on_draw(chain.state(), chain.stats());
    }
    Ok(())
}

pub struct Sample {
    pub networks: Vec<Network>,
    pub stats: Vec<Vec<f64>>,
}

/// Draws `cfg.draws` networks on the node set of `base`.
pub fn sample(model: &ErgmModel, base: &Network, cfg: &SamplerConfig) -> Result<Sample> {
    let mut networks = Vec::with_capacity(cfg.draws);
    let mut stats = Vec::with_capacity(cfg.draws);
    run_chain(model, base, cfg, |net, s| {
        networks.push(net.clone());
        stats.push(s.to_vec());
    })?;
    Ok(Sample { networks, stats })
}

/// Like [`sample`] on an unlabelled node set of size `n`.
pub fn sample_nodes(model: &ErgmModel, n: usize, cfg: &SamplerConfig) -> Result<Sample> {
    sample(model, &Network::empty(n), cfg)
}

/// Statistic vectors only.
pub fn sample_stats(model: &ErgmModel, base: &Network, cfg: &SamplerConfig) -> Result<Vec<Vec<f64>>> {
    let mut stats = Vec::with_capacity(cfg.draws);
    run_chain(model, base, cfg, |_, s| stats.push(s.to_vec()))?;
    Ok(stats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::terms::parse_model_terms;

    #[test]
    fn logistic_is_stable() {
        assert_eq!(logistic(0.0), 0.5);
        assert!(logistic(-800.0) >= 0.0);
        assert!((logistic(800.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_theta_visits_are_fair_coins() {
        let model = ErgmModel::edges_only(0.0);
        let mut net = Network::empty(2);
        let mut rng = rng_from_seed(3);
        let mut delta = [0.0];
        let trials = 20_000;
        let hits = (0..trials)
            .filter(|_| step(&model, &mut net, 0, 1, &mut delta, &mut rng).1)
            .count();
        let p = hits as f64 / trials as f64;
        assert!((p - 0.5).abs() < 4.0 * (0.25f64 / trials as f64).sqrt(), "{p}");
    }

    #[test]
    fn saturated_negative_theta_empties_graph() {
        let model = ErgmModel::edges_only(-30.0);
        let cfg = SamplerConfig {
            burn_in: 5,
            interval: 1,
            draws: 5,
            seed: 1,
            init: Init::Bernoulli(0.9),
        };
        let s = sample_nodes(&model, 12, &cfg).unwrap();
        assert!(s.networks.iter().all(|n| n.edge_count() == 0));
    }

    #[test]
    fn seeds_are_deterministic() {
        let terms = parse_model_terms("edges + triangle + gwesp").unwrap();
        let model = ErgmModel::new(terms, vec![-1.0, 0.2, 0.1]).unwrap();
        let cfg = SamplerConfig {
            draws: 10,
            seed: 99,
            ..Default::default()
        };
        let a = sample_nodes(&model, 10, &cfg).unwrap();
        let b = sample_nodes(&model, 10, &cfg).unwrap();
        assert_eq!(a.networks, b.networks);
        assert_eq!(a.stats, b.stats);
    }

    #[test]
    fn running_stats_match_recount() {
        let terms = parse_model_terms("edges + kstar(2) + esp(1) + gwdsp + degcrossprod + isolates").unwrap();
        let model = ErgmModel::new(terms.clone(), vec![-1.0, 0.05, 0.2, -0.1, 0.03, 0.2]).unwrap();
        let cfg = SamplerConfig {
            draws: 20,
            seed: 5,
            ..Default::default()
        };
        run_chain(&model, &Network::empty(9), &cfg, |net, s| {
            let exact = stat_vector(net, &terms).unwrap();
            for (a, b) in s.iter().zip(&exact) {
                assert!((a - b).abs() < 1e-9, "{a} vs {b}");
            }
        })
        .unwrap();
    }

    #[test]
    fn rejects_non_finite_theta_and_bad_config() {
        let model = ErgmModel::edges_only(f64::NEG_INFINITY);
        assert!(matches!(
            sample_nodes(&model, 4, &SamplerConfig::default()),
            Err(ErgmError::NonFiniteTheta { .. })
        ));
        let cfg = SamplerConfig {
            interval: 0,
            ..Default::default()
        };
        assert!(sample_nodes(&ErgmModel::edges_only(0.0), 4, &cfg).is_err());
    }
}
