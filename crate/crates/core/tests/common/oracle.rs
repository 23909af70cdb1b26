//! Brute-force reference implementations. Nothing here calls the statistic
//! code under test; everything is recounted from the adjacency relation.

use ergm_core::{Attribute, Family, Motif, Network, TermSpec};

pub fn adjacency(net: &Network) -> Vec<Vec<bool>> {
    let n = net.node_count();
    (0..n).map(|i| (0..n).map(|j| i != j && net.has_edge(i, j)).collect()).collect()
}

fn dyads(n: usize) -> Vec<(usize, usize)> {
    let mut v = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            v.push((i, j));
        }
    }
    v
}

/// Every simple graph on `n` labelled nodes, in bitmask order over dyads.
pub fn enumerate_graphs(n: usize) -> Vec<Network> {
    let d = dyads(n);
    (0u64..1 << d.len())
        .map(|mask| {
            let edges: Vec<(usize, usize)> = d
                .iter()
                .enumerate()
                .filter(|(b, _)| mask >> b & 1 == 1)
                .map(|(_, &e)| e)
                .collect();
            Network::from_edge_list(n, &edges).unwrap()
        })
        .collect()
}

fn choose(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    // product form, independent of the library helper
    let mut num = 1u128;
    let mut den = 1u128;
    for i in 0..k {
        num *= (n - i) as u128;
        den *= (i + 1) as u128;
    }
    (num / den) as f64
}

fn gw(decay: f64, k: usize) -> f64 {
    let r = 1.0 - (-decay).exp();
    decay.exp() * (1.0 - r.powi(k as i32))
}

fn numeric(net: &Network, term: &TermSpec, i: usize) -> f64 {
    match net.attribute(term.attr_name.as_deref().unwrap()).unwrap() {
        Attribute::Numeric(v) => v[i],
        Attribute::Categorical(_) => panic!("numeric attribute expected"),
    }
}

fn same(net: &Network, term: &TermSpec, i: usize, j: usize) -> bool {
    match net.attribute(term.attr_name.as_deref().unwrap()).unwrap() {
        Attribute::Numeric(v) => v[i] == v[j],
        Attribute::Categorical(v) => v[i] == v[j],
    }
}

/// Recomputes a statistic from the definition of its family.
pub fn naive_stat(net: &Network, term: &TermSpec) -> f64 {
    let a = adjacency(net);
    let n = a.len();
    let deg: Vec<usize> = a.iter().map(|r| r.iter().filter(|&&x| x).count()).collect();
    let edges: Vec<(usize, usize)> = dyads(n).into_iter().filter(|&(i, j)| a[i][j]).collect();
    let shared = |i: usize, j: usize| (0..n).filter(|&w| a[i][w] && a[j][w]).count();
    let k = term.k.map(|k| k as usize);
    match term.family {
        Family::Edges => edges.len() as f64,
        Family::KStar => deg.iter().map(|&d| choose(d, k.unwrap())).sum(),
        Family::Triangle => {
            let mut t = 0;
            for x in 0..n {
                for y in x + 1..n {
                    for z in y + 1..n {
                        if a[x][y] && a[y][z] && a[x][z] {
                            t += 1;
                        }
                    }
                }
            }
            t as f64
        }
        Family::Isolates => deg.iter().filter(|&&d| d == 0).count() as f64,
        Family::Sociality => deg[1..].iter().sum::<usize>() as f64,
        Family::DegCrossProd => {
            if edges.is_empty() {
                0.0
            } else {
                edges.iter().map(|&(i, j)| (deg[i] * deg[j]) as f64).sum::<f64>() / edges.len() as f64
            }
        }
        Family::DegreePopularity => deg.iter().map(|&d| (d as f64).powf(1.5)).sum(),
        Family::GwDegree => deg.iter().map(|&d| gw(term.decay.unwrap(), d)).sum(),
        Family::Dsp | Family::Esp | Family::Nsp | Family::GwDsp | Family::GwEsp | Family::GwNsp => {
            let mut total = 0.0;
            for (i, j) in dyads(n) {
                let s = shared(i, j);
                let e = a[i][j];
                total += match term.family {
                    Family::Dsp => (s == k.unwrap()) as u8 as f64,
                    Family::Esp => (e && s == k.unwrap()) as u8 as f64,
                    Family::Nsp => (!e && s == k.unwrap()) as u8 as f64,
                    Family::GwDsp if s > 0 => gw(term.decay.unwrap(), s),
                    Family::GwEsp if e && s > 0 => gw(term.decay.unwrap(), s),
                    Family::GwNsp if !e && s > 0 => gw(term.decay.unwrap(), s),
                    _ => 0.0,
                };
            }
            total
        }
        Family::NodeCov => edges.iter().map(|&(i, j)| numeric(net, term, i) + numeric(net, term, j)).sum(),
        Family::NodeMatch => edges.iter().filter(|&&(i, j)| same(net, term, i, j)).count() as f64,
        Family::AbsDiff => edges
            .iter()
            .map(|&(i, j)| (numeric(net, term, i) - numeric(net, term, j)).abs())
            .sum(),
    }
}

/// Number of vertex maps from the motif into `net` that send edges to edges.
pub fn naive_hom_count(motif: Motif, net: &Network) -> u64 {
    let a = adjacency(net);
    let n = a.len();
    let mut count = 0;
    match motif {
        Motif::Edge => {
            for x in 0..n {
                for y in 0..n {
                    count += a[x][y] as u64;
                }
            }
        }
        Motif::TwoStarPath => {
            for x in 0..n {
                for y in 0..n {
                    for z in 0..n {
                        count += (a[x][y] && a[y][z]) as u64;
                    }
                }
            }
        }
        Motif::Triangle => {
            for x in 0..n {
                for y in 0..n {
                    for z in 0..n {
                        count += (a[x][y] && a[y][z] && a[z][x]) as u64;
                    }
                }
            }
        }
    }
    count
}

/// Exact ERGM over all graphs on the node set of `base`.
pub struct ExactDistribution {
    pub graphs: Vec<Network>,
    pub stats: Vec<Vec<f64>>,
}

impl ExactDistribution {
    pub fn new(base: &Network, terms: &[TermSpec]) -> Self {
        let graphs = enumerate_graphs(base.node_count());
        let stats = graphs
            .iter()
            .map(|g| terms.iter().map(|t| naive_stat(g, t)).collect())
            .collect();
        ExactDistribution { graphs, stats }
    }

    fn log_weights(&self, theta: &[f64]) -> Vec<f64> {
        self.stats
            .iter()
            .map(|s| s.iter().zip(theta).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn log_psi(&self, theta: &[f64]) -> f64 {
        let w = self.log_weights(theta);
        let m = w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        m + w.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
    }

    pub fn probabilities(&self, theta: &[f64]) -> Vec<f64> {
        let lp = self.log_psi(theta);
        self.log_weights(theta).iter().map(|w| (w - lp).exp()).collect()
    }

    pub fn mean(&self, theta: &[f64]) -> Vec<f64> {
        let p = self.probabilities(theta);
        let mut m = vec![0.0; theta.len()];
        for (s, pi) in self.stats.iter().zip(p) {
            for (a, b) in m.iter_mut().zip(s) {
                *a += pi * b;
            }
        }
        m
    }

    pub fn loglik(&self, theta: &[f64], observed: &[f64]) -> f64 {
        observed.iter().zip(theta).map(|(a, b)| a * b).sum::<f64>() - self.log_psi(theta)
    }
}
