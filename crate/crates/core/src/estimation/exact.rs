//! Exact likelihood by enumerating all `2^C(N,2)` graphs.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};

use super::linalg::{log_sum_exp, pseudo_solve};
use super::{Divergence, FitMethod, FitResult, Fitter, DIVERGENCE_THRESHOLD};
use crate::error::{ErgmError, Result};
use crate::graph::Network;
use crate::model::dot;
use crate::stats::{add_delta, check_term, stat_vector};
use crate::terms::TermSpec;

pub const EXACT_MAX_NODES: usize = 7;
const GRADIENT_TOL: f64 = 1e-10;

/// Distinct statistic vectors over the whole graph space, with multiplicities.
#[derive(Clone, Debug)]
pub struct ExactTable {
    pub stats: Vec<Vec<f64>>,
    pub counts: Vec<f64>,
}

impl ExactTable {
    /// Walks the graph space in Gray-code order so consecutive graphs differ
    /// by one dyad and statistics update through change scores.
    pub fn build(base: &Network, terms: &[TermSpec]) -> Result<Self> {
        let n = base.node_count();
        if n > EXACT_MAX_NODES {
            return Err(ErgmError::TooLarge {
                n,
                max: EXACT_MAX_NODES,
            });
        }
        for t in terms {
            check_term(base, t)?;
        }
        let dyads: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .collect();
        let mut net = base.cleared();
        let mut stats = stat_vector(&net, terms)?;
        let mut index: HashMap<Vec<u64>, usize> = HashMap::new();
        let mut table = ExactTable {
            stats: Vec::new(),
            counts: Vec::new(),
        };
        let mut record = |s: &[f64], table: &mut ExactTable| {
            let key: Vec<u64> = s.iter().map(|v| v.to_bits()).collect();
            let r = *index.entry(key).or_insert_with(|| {
                table.stats.push(s.to_vec());
                table.counts.push(0.0);
                table.stats.len() - 1
            });
            table.counts[r] += 1.0;
        };
        record(&stats, &mut table);
        let total: u64 = 1 << dyads.len();
        for k in 1..total {
            let (i, j) = dyads[k.trailing_zeros() as usize];
            if net.has_edge(i, j) {
                net.set_dyad(i, j, false);
                for (s, t) in stats.iter_mut().zip(terms) {
                    *s -= add_delta(&net, t, i, j);
                }
            } else {
                for (s, t) in stats.iter_mut().zip(terms) {
                    *s += add_delta(&net, t, i, j);
                }
                net.set_dyad(i, j, true);
            }
            record(&stats, &mut table);
        }
        Ok(table)
    }

    pub fn log_psi(&self, theta: &[f64]) -> f64 {
        log_sum_exp(
            self.stats
                .iter()
                .zip(&self.counts)
                .map(|(s, c)| c.ln() + dot(theta, s)),
        )
    }

    /// `(E_θ[T], Cov_θ[T])`.
    pub fn moments(&self, theta: &[f64]) -> (DVector<f64>, DMatrix<f64>) {
        let lpsi = self.log_psi(theta);
        let p = theta.len();
        let mut mean = DVector::zeros(p);
        let mut second = DMatrix::zeros(p, p);
        for (s, c) in self.stats.iter().zip(&self.counts) {
            let w = (c.ln() + dot(theta, s) - lpsi).exp();
            let v = DVector::from_column_slice(s);
            mean.axpy(w, &v, 1.0);
            second.ger(w, &v, &v, 1.0);
        }
        let cov = second - &mean * mean.transpose();
        (mean, cov)
    }

    pub fn loglik(&self, theta: &[f64], observed: &[f64]) -> f64 {
        dot(theta, observed) - self.log_psi(theta)
    }

    fn range(&self, coord: usize) -> (f64, f64) {
        self.stats.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| {
            (lo.min(s[coord]), hi.max(s[coord]))
        })
    }
}

/// Exact MLE by damped Newton ascent on the exact log-likelihood.
pub fn fit_exact(net: &Network, terms: &[TermSpec]) -> Result<FitResult> {
    let table = ExactTable::build(net, terms)?;
    let observed = stat_vector(net, terms)?;
    let p = terms.len();

    let tol = 1e-9;
    let boundary: Vec<Divergence> = (0..p)
        .map(|c| {
            let (lo, hi) = table.range(c);
            if observed[c] <= lo + tol * lo.abs().max(1.0) {
                Divergence::NegInf
            } else if observed[c] >= hi - tol * hi.abs().max(1.0) {
                Divergence::PosInf
            } else {
                Divergence::Finite
            }
        })
        .collect();
    if boundary.iter().any(|d| !d.is_finite()) {
        return Ok(FitResult::flagged(
            terms,
            vec![0.0; p],
            boundary,
            FitMethod::Exact,
            0,
            "observed statistic at the edge of its exact range",
        ));
    }

    let mut theta = vec![0.0; p];
    let mut current = table.loglik(&theta, &observed);
    let mut converged = false;
    for _ in 0..500 {
        let (mean, cov) = table.moments(&theta);
        let grad = DVector::from_column_slice(&observed) - mean;
        if grad.norm() <= GRADIENT_TOL {
            converged = true;
            break;
        }
        let Some(mut step) = pseudo_solve(&cov, &grad, 1e-12) else {
            break;
        };
        let mut accepted = false;
        for _ in 0..60 {
            let candidate: Vec<f64> = theta.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
            let value = table.loglik(&candidate, &observed);
            if value >= current - 1e-13 * current.abs().max(1.0) {
                theta = candidate;
                current = value;
                accepted = true;
                break;
            }
            step /= 2.0;
        }
        if !accepted || theta.iter().any(|t| t.abs() > 4.0 * DIVERGENCE_THRESHOLD) {
            break;
        }
    }
    // an ascent that runs off to a huge |θ| is a likelihood without a
    // maximiser, even if the gradient has become numerically flat
    {
        let flags: Vec<Divergence> = theta
            .iter()
            .map(|&t| {
                if t > DIVERGENCE_THRESHOLD {
                    Divergence::PosInf
                } else if t < -DIVERGENCE_THRESHOLD {
                    Divergence::NegInf
                } else {
                    Divergence::Finite
                }
            })
            .collect();
        if flags.iter().any(|d| !d.is_finite()) {
            return Ok(FitResult::flagged(
                terms,
                theta,
                flags,
                FitMethod::Exact,
                0,
                "exact likelihood has no finite maximiser",
            ));
        }
    }
    let mut fit = FitResult::finite(terms, theta, current, FitMethod::Exact, 0);
    fit.converged = converged;
    Ok(fit)
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ExactFitter;

impl Fitter for ExactFitter {
    fn fit(&self, net: &Network, terms: &[TermSpec], _seed: u64) -> Result<FitResult> {
        fit_exact(net, terms)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::terms::parse_model_terms;

    #[test]
    fn uniform_measure_on_three_nodes() {
        let table = ExactTable::build(&Network::empty(3), &[TermSpec::edges()]).unwrap();
        assert!((table.log_psi(&[0.0]) - 8f64.ln()).abs() < 1e-14);
        assert_eq!(table.counts.iter().sum::<f64>(), 8.0);
    }

    #[test]
    fn complete_observation_diverges() {
        let k3 = Network::from_edge_list(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let fit = fit_exact(&k3, &[TermSpec::edges()]).unwrap();
        assert_eq!(fit.diverged, vec![Divergence::PosInf]);
    }

    #[test]
    fn finite_mle_has_vanishing_gradient() {
        let net = Network::from_edge_list(5, &[(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (1, 4)]).unwrap();
        let terms = parse_model_terms("edges + triangle").unwrap();
        let fit = fit_exact(&net, &terms).unwrap();
        assert!(fit.is_finite() && fit.converged);
        let table = ExactTable::build(&net, &terms).unwrap();
        let (mean, _) = table.moments(&fit.theta_hat);
        let observed = stat_vector(&net, &terms).unwrap();
        let g = DVector::from_column_slice(&observed) - mean;
        assert!(g.norm() <= 1e-8, "{}", g.norm());
    }

    #[test]
    fn rejects_large_graphs() {
        assert!(matches!(
            fit_exact(&Network::empty(8), &[TermSpec::edges()]),
            Err(ErgmError::TooLarge { n: 8, .. })
        ));
    }
}
