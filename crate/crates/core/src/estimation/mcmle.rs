//! Monte-Carlo maximum likelihood seeded by contrastive divergence.

use log::debug;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::linalg::{log_mean_exp, mean_cov, pseudo_solve};
use super::mple::{observed_boundary, pseudo_information, solve_mple};
use super::{Divergence, FitMethod, FitResult, Fitter, DIVERGENCE_THRESHOLD};
use crate::error::{ErgmError, Result};
use crate::graph::Network;
use crate::model::{dot, ErgmModel};
use crate::sampler::{sample_stats, Chain, Init, SamplerConfig};
use crate::seed::{derive_seed, rng_from_seed};
use crate::stats::stat_vector;
use crate::terms::TermSpec;

const STAGE_CD: u64 = 1;
const STAGE_NEWTON: u64 = 2;
const STAGE_FINAL: u64 = 3;
const STAGE_BRIDGE: u64 = 4;

const SEPARATION_ETA: f64 = 15.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct McmleConfig {
    /// Schedule of each Newton iteration's chain. `seed` and `init` are
    /// overridden per fit.
    pub sampler: SamplerConfig,
    /// Sweeps per contrastive-divergence chain.
    pub cd_steps: u64,
    pub cd_iterations: usize,
    pub cd_step_size: f64,
    pub cd_decay: f64,
    pub cd_chains: usize,
    pub max_iterations: usize,
    /// Largest change of any coordinate in one Newton iteration.
    pub max_step: f64,
    /// Mahalanobis distance of the statistic gap that counts as converged.
    pub tolerance: f64,
    /// Target Monte-Carlo standard error per coordinate for the final
    /// importance-sampling refinement.
    pub target_se: f64,
    pub max_final_draws: usize,
    pub bridges: usize,
    pub bridge_draws: usize,
}

impl Default for McmleConfig {
    fn default() -> Self {
        McmleConfig {
            sampler: SamplerConfig {
                burn_in: 10,
                interval: 1,
                draws: 1000,
                seed: 0,
                init: Init::Observed,
            },
            cd_steps: 3,
            cd_iterations: 20,
            cd_step_size: 0.05,
            cd_decay: 0.9,
            cd_chains: 8,
            max_iterations: 20,
            max_step: 1.0,
            tolerance: 0.1,
            target_se: 0.02,
            max_final_draws: 20_000,
            bridges: 8,
            bridge_draws: 200,
        }
    }
}

impl McmleConfig {
    pub fn validate(&self) -> Result<()> {
        self.sampler.validate()?;
        let bad = |what: &str| Err(ErgmError::InvalidConfig(format!("mcmle: {what}")));
        if self.cd_chains == 0 {
            return bad("cd_chains must be positive");
        }
        if !(self.cd_step_size >= 0.0) || !(self.cd_decay > 0.0 && self.cd_decay <= 1.0) {
            return bad("cd step size must be non-negative and decay in (0, 1]");
        }
        if !(self.max_step > 0.0) || !(self.tolerance > 0.0) || !(self.target_se > 0.0) {
            return bad("max_step, tolerance and target_se must be positive");
        }
        if self.bridges == 0 || self.bridge_draws == 0 {
            return bad("bridges and bridge_draws must be positive");
        }
        Ok(())
    }

    fn chain(&self, seed: u64, draws: usize) -> SamplerConfig {
        SamplerConfig {
            seed,
            draws,
            init: Init::Observed,
            ..self.sampler
        }
    }
}

fn threshold_flags(theta: &[f64]) -> Vec<Divergence> {
    theta
        .iter()
        .map(|&t| {
            if !t.is_finite() {
                Divergence::Failed
            } else if t > DIVERGENCE_THRESHOLD {
                Divergence::PosInf
            } else if t < -DIVERGENCE_THRESHOLD {
                Divergence::NegInf
            } else {
                Divergence::Finite
            }
        })
        .collect()
}

fn cd_refine(
    net: &Network,
    terms: &[TermSpec],
    observed: &[f64],
    mut theta: Vec<f64>,
    information: &DMatrix<f64>,
    cfg: &McmleConfig,
    seed: u64,
) -> Result<Vec<f64>> {
    let p = terms.len();
    let mut rate = cfg.cd_step_size;
    for s in 0..cfg.cd_iterations {
        let model = ErgmModel::new(terms.to_vec(), theta.clone())?;
        let mut mean = DVector::zeros(p);
        for c in 0..cfg.cd_chains {
            let rng = rng_from_seed(derive_seed(seed, &[STAGE_CD, s as u64, c as u64]));
            let mut chain = Chain::new(&model, net.clone(), rng)?;
            chain.sweeps(cfg.cd_steps);
            mean += DVector::from_column_slice(chain.stats());
        }
        mean /= cfg.cd_chains as f64;
        let gap = DVector::from_column_slice(observed) - mean;
        if let Some(step) = pseudo_solve(information, &gap, 1e-10) {
            for (t, d) in theta.iter_mut().zip(step.iter()) {
                *t += rate * d;
            }
        }
        rate *= cfg.cd_decay;
    }
    Ok(theta)
}

/// Maximises the importance-sampling approximation of the log-likelihood
/// ratio `ℓ(θ) − ℓ(θ₀)` built from draws at `θ₀`, moving no coordinate by
/// more than `max_step`. The first trial step is the plain Newton step.
fn importance_refine(theta0: &[f64], draws: &[Vec<f64>], observed: &[f64], max_step: f64) -> Vec<f64> {
    let p = theta0.len();
    let n = draws.len() as f64;
    let objective = |delta: &DVector<f64>| {
        let e: Vec<f64> = draws.iter().map(|s| dot(delta.as_slice(), s)).collect();
        dot(delta.as_slice(), observed) - log_mean_exp(&e)
    };
    let weighted = |delta: &DVector<f64>| {
        let e: Vec<f64> = draws.iter().map(|s| dot(delta.as_slice(), s)).collect();
        let m = e.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let w: Vec<f64> = e.iter().map(|v| (v - m).exp()).collect();
        let total: f64 = w.iter().sum();
        let ess = total * total / w.iter().map(|x| x * x).sum::<f64>();
        let mut mean = DVector::zeros(p);
        for (s, wi) in draws.iter().zip(&w) {
            mean.axpy(wi / total, &DVector::from_column_slice(s), 1.0);
        }
        let mut cov = DMatrix::zeros(p, p);
        for (s, wi) in draws.iter().zip(&w) {
            let d = DVector::from_column_slice(s) - &mean;
            cov.ger(wi / total, &d, &d, 1.0);
        }
        (mean, cov, ess)
    };
    let mut delta = DVector::zeros(p);
    let mut value = objective(&delta);
    for _ in 0..50 {
        let (mean, cov, _) = weighted(&delta);
        let grad = DVector::from_column_slice(observed) - mean;
        let Some(mut step) = pseudo_solve(&cov, &grad, 1e-10) else {
            break;
        };
        let mut accepted = false;
        for _ in 0..30 {
            let candidate = &delta + &step;
            let (_, _, ess) = weighted(&candidate);
            let v = objective(&candidate);
            // stay where the reweighted sample is still informative
            if candidate.amax() <= max_step && ess >= n / 4.0 && v >= value - 1e-12 * value.abs().max(1.0) {
                delta = candidate;
                value = v;
                accepted = true;
                break;
            }
            step /= 2.0;
        }
        if !accepted || step.norm() < 1e-10 {
            break;
        }
    }
    theta0.iter().zip(delta.iter()).map(|(a, b)| a + b).collect()
}

/// `log ψ(θ)` via a chain of bridged importance-sampling ratios from the
/// Bernoulli graph `θ_null = (logit p̂, 0, …)`, whose normaliser is exact.
fn log_normaliser(
    net: &Network,
    terms: &[TermSpec],
    theta: &[f64],
    cfg: &McmleConfig,
    seed: u64,
) -> Result<f64> {
    let d = net.dyad_count() as f64;
    let density = net.edge_count() as f64 / d;
    let mut theta_null = vec![0.0; theta.len()];
    theta_null[0] = (density / (1.0 - density)).ln();
    let log_psi_null = d * theta_null[0].exp().ln_1p();
    let at = |t: f64| -> Vec<f64> {
        theta_null
            .iter()
            .zip(theta)
            .map(|(a, b)| a + t * (b - a))
            .collect()
    };
    let b = cfg.bridges;
    let mut total = log_psi_null;
    for k in 0..b {
        let lo = at(k as f64 / b as f64);
        let hi = at((k + 1) as f64 / b as f64);
        let mid = at((k as f64 + 0.5) / b as f64);
        let model = ErgmModel::new(terms.to_vec(), mid.clone())?;
        let run = cfg.chain(derive_seed(seed, &[STAGE_BRIDGE, k as u64]), cfg.bridge_draws);
        let draws = sample_stats(&model, net, &run)?;
        let diff = |target: &[f64]| -> Vec<f64> {
            draws
                .iter()
                .map(|s| target.iter().zip(&mid).zip(s).map(|((t, m), x)| (t - m) * x).sum())
                .collect()
        };
        total += log_mean_exp(&diff(&hi)) - log_mean_exp(&diff(&lo));
    }
    Ok(total)
}

/// Fits `terms` by MPLE, contrastive divergence and Monte-Carlo Newton
/// iterations, then estimates the log-likelihood against the null model so
/// the AIC is on the same scale as the null fit.
pub fn fit_mcmle(net: &Network, terms: &[TermSpec], cfg: &McmleConfig, seed: u64) -> Result<FitResult> {
    cfg.validate()?;
    let boundary = observed_boundary(net, terms)?;
    if boundary.iter().any(|d| !d.is_finite()) {
        return Ok(FitResult::flagged(
            terms,
            vec![0.0; terms.len()],
            boundary,
            FitMethod::CdMcmle,
            seed,
            "observed statistic on the boundary of its range",
        ));
    }
    // A separated or collinear pseudo-likelihood says nothing definite about
    // the likelihood itself, so the chain then starts from the null model.
    let (seed_theta, information) = match solve_mple(net, terms)? {
        Ok(o) if o.beta.amax() <= DIVERGENCE_THRESHOLD && o.max_abs_eta <= SEPARATION_ETA => (o.beta.iter().copied().collect(), o.information),
        _ => {
            let density = net.edge_count() as f64 / net.dyad_count() as f64;
            let mut theta = vec![0.0; terms.len()];
            theta[0] = (density / (1.0 - density)).ln();
            let info = pseudo_information(net, terms, &theta)?;
            (theta, info)
        }
    };
    let observed = stat_vector(net, terms)?;
    let obs = DVector::from_column_slice(&observed);
    let flagged = |theta: Vec<f64>, flags: Vec<Divergence>, used: u32, note: &str| {
        let mut fit = FitResult::flagged(terms, theta, flags, FitMethod::CdMcmle, seed, note);
        fit.n_refits_consumed = used;
        fit
    };

    let mut theta = cd_refine(net, terms, &observed, seed_theta, &information, cfg, seed)?;
    let flags = threshold_flags(&theta);
    if flags.iter().any(|f| !f.is_finite()) {
        return Ok(flagged(theta, flags, 0, "contrastive divergence left the finite range"));
    }

    let mut used = 0u32;
    let mut converged = false;
    // best point so far with its distance and the step taken from it
    let mut best: Option<(Vec<f64>, f64, DVector<f64>)> = None;
    let mut growing = 0;
    let mut current: Option<Vec<Vec<f64>>> = None;
    for m in 0..cfg.max_iterations {
        let model = ErgmModel::new(terms.to_vec(), theta.clone())?;
        let run = cfg.chain(derive_seed(seed, &[STAGE_NEWTON, m as u64]), cfg.sampler.draws);
        let draws = sample_stats(&model, net, &run)?;
        used += 1;
        let (mean, cov) = mean_cov(&draws);
        let gap = &obs - mean;
        let Some(step) = pseudo_solve(&cov, &gap, 1e-10) else {
            return Ok(flagged(
                theta.clone(),
                vec![Divergence::Failed; terms.len()],
                used,
                "simulated statistics have no spread",
            ));
        };
        let distance = gap.dot(&step).max(0.0).sqrt();
        // progress is judged in a fixed metric: near a degenerate phase the
        // sample covariance inflates and hides how far off the draws are
        let progress = pseudo_solve(&information, &gap, 1e-10).map_or(f64::INFINITY, |x| gap.dot(&x).max(0.0).sqrt());
        debug!("mcmle iteration {m}: mahalanobis gap {distance:.4}, fixed-metric gap {progress:.4}");
        if distance <= cfg.tolerance {
            converged = true;
            current = Some(draws);
            break;
        }
        match &best {
            Some((from, best_progress, taken)) if progress > *best_progress => {
                growing += 1;
                if growing >= 3 && distance > 1.0 {
                    return Ok(flagged(
                        theta.clone(),
                        vec![Divergence::Failed; terms.len()],
                        used,
                        "statistic gap grew on three consecutive iterations",
                    ));
                }
                // retreat along the step that made things worse
                let factor = 0.5f64.powi(growing);
                theta = from.iter().zip(taken.iter()).map(|(t, d)| t + factor * d).collect();
            }
            _ => {
                growing = 0;
                let damp = if distance > 1.0 { 1.0 / distance } else { 1.0 };
                let factor = damp.min(cfg.max_step / step.amax().max(f64::MIN_POSITIVE));
                let scaled = step * factor;
                let from = theta.clone();
                for (t, d) in theta.iter_mut().zip(scaled.iter()) {
                    *t += d;
                }
                best = Some((from, progress, scaled));
            }
        }
        let flags = threshold_flags(&theta);
        if flags.iter().any(|f| !f.is_finite()) {
            return Ok(flagged(theta, flags, used, "estimate exceeded the divergence threshold"));
        }
    }

    // one large sample at the current point, sized to the target precision
    let model = ErgmModel::new(terms.to_vec(), theta.clone())?;
    let pilot_draws = match current {
        Some(draws) => draws,
        None => {
            used += 1;
            let pilot = cfg.chain(derive_seed(seed, &[STAGE_FINAL, 0]), cfg.sampler.draws);
            sample_stats(&model, net, &pilot)?
        }
    };
    let (_, cov) = mean_cov(&pilot_draws);
    let needed = terms
        .iter()
        .enumerate()
        .filter_map(|(i, _)| {
            let mut e = DVector::zeros(terms.len());
            e[i] = 1.0;
            pseudo_solve(&cov, &e, 1e-10).map(|col| col[i] / (cfg.target_se * cfg.target_se))
        })
        .fold(0.0, f64::max);
    let final_draws = (needed.ceil() as usize).clamp(cfg.sampler.draws, cfg.max_final_draws.max(cfg.sampler.draws));
    let run = cfg.chain(derive_seed(seed, &[STAGE_FINAL, 1]), final_draws);
    let mut draws = sample_stats(&model, net, &run)?;
    draws.extend(pilot_draws);
    used += 1;
    theta = importance_refine(&theta, &draws, &observed, f64::INFINITY);
    let flags = threshold_flags(&theta);
    if flags.iter().any(|f| !f.is_finite()) {
        return Ok(flagged(theta, flags, used, "estimate exceeded the divergence threshold"));
    }

    let log_psi = log_normaliser(net, terms, &theta, cfg, seed)?;
    let loglik = dot(&theta, &observed) - log_psi;
    let mut fit = FitResult::finite(terms, theta, loglik, FitMethod::CdMcmle, seed);
    fit.converged = converged;
    fit.n_refits_consumed = used;
    Ok(fit)
}

#[derive(Clone, Debug, Default)]
pub struct McmleFitter {
    pub config: McmleConfig,
}

impl McmleFitter {
    pub fn new(config: McmleConfig) -> Self {
        McmleFitter { config }
    }
}

impl Fitter for McmleFitter {
    fn fit(&self, net: &Network, terms: &[TermSpec], seed: u64) -> Result<FitResult> {
        fit_mcmle(net, terms, &self.config, seed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimation::fit_null;

    #[test]
    fn edges_only_recovers_null_fit() {
        let net = Network::from_edge_list(
            10,
            &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (7, 8), (8, 9), (0, 9), (2, 7)],
        )
        .unwrap();
        let null = fit_null(&net).unwrap();
        let fit = fit_mcmle(&net, &[TermSpec::edges()], &McmleConfig::default(), 7).unwrap();
        assert!(fit.is_finite());
        assert!((fit.theta_hat[0] - null.theta_hat[0]).abs() < 0.05, "{:?}", fit.theta_hat);
        assert!((fit.loglik - null.loglik).abs() < 0.5);
    }

    #[test]
    fn boundary_statistics_short_circuit() {
        let net = Network::from_edge_list(5, &[(0, 1), (2, 3)]).unwrap();
        let terms = crate::terms::parse_model_terms("edges + triangle").unwrap();
        let fit = fit_mcmle(&net, &terms, &McmleConfig::default(), 1).unwrap();
        assert_eq!(fit.method, FitMethod::CdMcmle);
        assert_eq!(fit.diverged[1], Divergence::NegInf);
        assert_eq!(fit.n_refits_consumed, 0);
    }
}
