use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};

use super::linalg::{condition_ratio, pseudo_solve};
use super::{Divergence, FitMethod, FitResult, Fitter, DIVERGENCE_THRESHOLD};
use crate::error::Result;
use crate::graph::Network;
use crate::stats::{binomial, dyad_change_scores, stat_vector};
use crate::terms::{Family, TermSpec};

const GRADIENT_TOL: f64 = 1e-8;
const MAX_ITER: usize = 100;

/// Largest value `term` can take on `n` nodes, where it has a simple form.
fn max_attainable(term: &TermSpec, n: usize) -> Option<f64> {
    let n64 = n as u64;
    let d = binomial(n64, 2);
    Some(match term.family {
        Family::Edges => d,
        Family::KStar => n as f64 * binomial(n64.saturating_sub(1), term.k? as u64),
        Family::Triangle => binomial(n64, 3),
        Family::Sociality => ((n.saturating_sub(1)) * n.saturating_sub(1)) as f64,
        Family::DegreePopularity => n as f64 * (n.saturating_sub(1) as f64).powf(1.5),
        Family::Dsp if term.k? as usize + 2 == n => d,
        _ => return None,
    })
}

/// Deterministic divergence rule: a term whose observed statistic sits at its
/// minimum of zero diverges to `−∞`, one at its maximum attainable value to
/// `+∞`. Exogenous terms are never flagged here.
pub fn observed_boundary(net: &Network, terms: &[TermSpec]) -> Result<Vec<Divergence>> {
    let observed = stat_vector(net, terms)?;
    Ok(terms
        .iter()
        .zip(&observed)
        .map(|(t, &s)| {
            if t.family.is_exogenous() {
                Divergence::Finite
            } else if s == 0.0 {
                Divergence::NegInf
            } else if max_attainable(t, net.node_count()).is_some_and(|m| s >= m) {
                Divergence::PosInf
            } else {
                Divergence::Finite
            }
        })
        .collect())
}

/// Distinct change-score rows with their present / absent dyad counts.
struct Design {
    rows: Vec<DVector<f64>>,
    present: Vec<f64>,
    total: Vec<f64>,
}

impl Design {
    fn new(net: &Network, terms: &[TermSpec]) -> Result<Self> {
        let mut index: HashMap<Vec<u64>, usize> = HashMap::new();
        let mut design = Design {
            rows: Vec::new(),
            present: Vec::new(),
            total: Vec::new(),
        };
        for (delta, y) in dyad_change_scores(net, terms)? {
            let key: Vec<u64> = delta.iter().map(|v| v.to_bits()).collect();
            let r = *index.entry(key).or_insert_with(|| {
                design.rows.push(DVector::from_vec(delta));
                design.present.push(0.0);
                design.total.push(0.0);
                design.rows.len() - 1
            });
            design.total[r] += 1.0;
            if y {
                design.present[r] += 1.0;
            }
        }
        Ok(design)
    }

    fn pseudo_loglik(&self, beta: &DVector<f64>) -> f64 {
        self.rows
            .iter()
            .zip(self.present.iter().zip(&self.total))
            .map(|(x, (&y, &n))| {
                let eta = x.dot(beta);
                // ln(1 + e^η) computed without overflow
                let softplus = if eta > 0.0 {
                    eta + (-eta).exp().ln_1p()
                } else {
                    eta.exp().ln_1p()
                };
                y * eta - n * softplus
            })
            .sum()
    }

    fn gradient_information(&self, beta: &DVector<f64>) -> (DVector<f64>, DMatrix<f64>) {
        let p = beta.len();
        let mut grad = DVector::zeros(p);
        let mut info = DMatrix::zeros(p, p);
        for (x, (&y, &n)) in self.rows.iter().zip(self.present.iter().zip(&self.total)) {
            let prob = crate::sampler::logistic(x.dot(beta));
            grad.axpy(y - n * prob, x, 1.0);
            info.ger(n * prob * (1.0 - prob), x, x, 1.0);
        }
        (grad, info)
    }

    fn gram_condition(&self) -> f64 {
        let p = self.rows.first().map_or(0, |r| r.len());
        let mut gram = DMatrix::zeros(p, p);
        for (x, &n) in self.rows.iter().zip(&self.total) {
            gram.ger(n, x, x, 1.0);
        }
        let scale = DVector::from_iterator(p, (0..p).map(|i| gram[(i, i)].sqrt().max(f64::MIN_POSITIVE)));
        for i in 0..p {
            for j in 0..p {
                gram[(i, j)] /= scale[i] * scale[j];
            }
        }
        condition_ratio(&gram)
    }
}

pub(crate) struct MpleOutcome {
    pub beta: DVector<f64>,
    pub information: DMatrix<f64>,
    pub pseudo_loglik: f64,
    pub converged: bool,
    /// Largest `|x·β|` over the design; fitted probabilities pinned to 0 or 1
    /// indicate (quasi-)separation.
    pub max_abs_eta: f64,
}

pub(crate) enum MpleError {
    Singular,
}

pub(crate) fn solve_mple(net: &Network, terms: &[TermSpec]) -> Result<std::result::Result<MpleOutcome, MpleError>> {
    let design = Design::new(net, terms)?;
    if design.gram_condition() < 1e-10 {
        return Ok(Err(MpleError::Singular));
    }
    let p = terms.len();
    let mut beta = DVector::zeros(p);
    let density = net.edge_count() as f64 / net.dyad_count().max(1) as f64;
    if density > 0.0 && density < 1.0 {
        beta[0] = (density / (1.0 - density)).ln();
    }
    let mut current = design.pseudo_loglik(&beta);
    let mut converged = false;
    for _ in 0..MAX_ITER {
        let (grad, info) = design.gradient_information(&beta);
        if grad.norm() <= GRADIENT_TOL {
            converged = true;
            break;
        }
        let Some(mut step) = pseudo_solve(&info, &grad, 1e-14) else {
            break;
        };
        let mut accepted = false;
        for _ in 0..40 {
            let candidate = &beta + &step;
            let value = design.pseudo_loglik(&candidate);
            if value >= current - 1e-12 * current.abs().max(1.0) {
                beta = candidate;
                current = value;
                accepted = true;
                break;
            }
            step /= 2.0;
        }
        if !accepted || beta.amax() > 4.0 * DIVERGENCE_THRESHOLD {
            break;
        }
    }
    let (grad, information) = design.gradient_information(&beta);
    converged |= grad.norm() <= GRADIENT_TOL;
    let max_abs_eta = design.rows.iter().map(|x| x.dot(&beta).abs()).fold(0.0, f64::max);
    Ok(Ok(MpleOutcome {
        max_abs_eta,
        beta,
        information,
        pseudo_loglik: current,
        converged,
    }))
}

/// Logistic regression of dyad states on their change scores, solved by
/// IRLS. The reported log-likelihood is the maximised log pseudo-likelihood,
/// which is exact for dyad-independent models.
pub fn fit_mple(net: &Network, terms: &[TermSpec]) -> Result<FitResult> {
    let boundary = observed_boundary(net, terms)?;
    if boundary.iter().any(|d| !d.is_finite()) {
        return Ok(FitResult::flagged(
            terms,
            vec![0.0; terms.len()],
            boundary,
            FitMethod::Mple,
            0,
            "observed statistic on the boundary of its range",
        ));
    }
    let outcome = match solve_mple(net, terms)? {
        Ok(o) => o,
        Err(MpleError::Singular) => {
            return Ok(FitResult::flagged(
                terms,
                vec![f64::NAN; terms.len()],
                vec![Divergence::Failed; terms.len()],
                FitMethod::Mple,
                0,
                "singular information: change scores are collinear",
            ))
        }
    };
    let flags: Vec<Divergence> = outcome
        .beta
        .iter()
        .map(|&b| {
            if b > DIVERGENCE_THRESHOLD {
                Divergence::PosInf
            } else if b < -DIVERGENCE_THRESHOLD {
                Divergence::NegInf
            } else {
                Divergence::Finite
            }
        })
        .collect();
    if flags.iter().any(|d| !d.is_finite()) {
        return Ok(FitResult::flagged(
            terms,
            outcome.beta.iter().copied().collect(),
            flags,
            FitMethod::Mple,
            0,
            "separation in the dyad logistic regression",
        ));
    }
    let mut fit = FitResult::finite(
        terms,
        outcome.beta.iter().copied().collect(),
        outcome.pseudo_loglik,
        FitMethod::Mple,
        0,
    );
    fit.converged = outcome.converged;
    Ok(fit)
}

/// Information of the log pseudo-likelihood at `beta`.
pub(crate) fn pseudo_information(net: &Network, terms: &[TermSpec], beta: &[f64]) -> Result<DMatrix<f64>> {
    let design = Design::new(net, terms)?;
    Ok(design.gradient_information(&DVector::from_column_slice(beta)).1)
}

#[derive(Clone, Copy, Debug, Default)]
pub struct MpleFitter;

impl Fitter for MpleFitter {
    fn fit(&self, net: &Network, terms: &[TermSpec], _seed: u64) -> Result<FitResult> {
        fit_mple(net, terms)
    }
}
