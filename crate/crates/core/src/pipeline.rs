//! Bounding, forward selection, fitting of the pairwise model space and
//! degeneracy screening, run end to end on one network.

use log::info;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::estimation::{fit_mcmle, Fitter, FitResult, McmleConfig, McmleFitter};
use crate::graph::Network;
use crate::model::ErgmModel;
use crate::sampler::{Init, SamplerConfig};
use crate::screening::{screen, ScreeningReport, ScreeningRule};
use crate::seed::derive_seed;
use crate::selection::{bound_all, build_candidate_set, stochastic_forward_select, BoundTrace, Bounds, CandidateSet, SelectionReport};
use crate::terms::{with_edges_first, TermSpec};

pub const STAGE_BOUND: u64 = 1;
pub const STAGE_SELECT: u64 = 2;
pub const STAGE_FIT: u64 = 3;
pub const STAGE_SCREEN: u64 = 4;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineOptions {
    pub refits: usize,
    pub seed: u64,
    pub mcmle: McmleConfig,
    /// Schedule for the screening draws; its seed is derived from `seed`.
    pub screening: SamplerConfig,
    pub rules: Vec<ScreeningRule>,
    /// Added to every model at fit time; never bounded or selected.
    pub exogenous: Vec<TermSpec>,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            refits: 30,
            seed: 0,
            mcmle: McmleConfig::default(),
            screening: SamplerConfig {
                burn_in: 20,
                interval: 1,
                draws: 100,
                seed: 0,
                init: Init::Observed,
            },
            rules: vec![ScreeningRule::default_degeneracy()],
            exogenous: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineOutcome {
    pub bounds: Bounds,
    pub bound_traces: Vec<BoundTrace>,
    pub candidates: CandidateSet,
    pub selection: SelectionReport,
    /// One fit per model of the pairwise space, in [`model_space`] order.
    pub fits: Vec<FitResult>,
    /// `None` when no model had a finite fit to simulate from.
    pub screening: Option<ScreeningReport>,
}

impl PipelineOutcome {
    pub fn model_count(&self) -> usize {
        self.fits.len()
    }

    /// Models without a finite fit plus models flagged by the default rule.
    pub fn degenerate_count(&self) -> usize {
        let unfit = self.fits.iter().filter(|f| !f.is_finite()).count();
        unfit + self.screening.as_ref().map_or(0, |s| s.degenerate_count)
    }

    pub fn surviving_models(&self) -> usize {
        self.screening.as_ref().map_or(0, |s| s.ranking.len())
    }
}

/// `edges + a` for every surviving term and `edges + a + b` for every pair,
/// each followed by the exogenous terms.
pub fn model_space(surviving: &[TermSpec], exogenous: &[TermSpec]) -> Vec<Vec<TermSpec>> {
    let mut models = Vec::new();
    let with_exo = |mut t: Vec<TermSpec>| {
        t.extend(exogenous.iter().cloned());
        with_edges_first(t)
    };
    for a in surviving {
        models.push(with_exo(vec![a.clone()]));
    }
    for (i, a) in surviving.iter().enumerate() {
        for b in &surviving[i + 1..] {
            models.push(with_exo(vec![a.clone(), b.clone()]));
        }
    }
    models
}

/// Fits every model by MC-MLE with its own derived seed.
pub fn fit_models(net: &Network, models: &[Vec<TermSpec>], cfg: &McmleConfig, seed: u64) -> Result<Vec<FitResult>> {
    models
        .par_iter()
        .enumerate()
        .map(|(i, terms)| fit_mcmle(net, terms, cfg, derive_seed(seed, &[i as u64])))
        .collect()
}

/// Screens the finite fits; non-finite fits cannot be simulated.
pub fn screen_fits(
    net: &Network,
    fits: &[FitResult],
    rules: &[ScreeningRule],
    cfg: &SamplerConfig,
) -> Result<Option<ScreeningReport>> {
    let models: Vec<ErgmModel> = fits
        .iter()
        .filter(|f| f.is_finite())
        .map(|f| ErgmModel::new(f.terms.clone(), f.theta_hat.clone()))
        .collect::<Result<_>>()?;
    if models.is_empty() {
        return Ok(None);
    }
    screen(net, &models, rules, cfg).map(Some)
}

pub fn run_pipeline(net: &Network, opts: &PipelineOptions) -> Result<PipelineOutcome> {
    let fitter = McmleFitter::new(opts.mcmle.clone());
    run_with_fitter(net, opts, &fitter)
}

/// As [`run_pipeline`], with `fitter` used for bounding and selection.
pub fn run_with_fitter(net: &Network, opts: &PipelineOptions, fitter: &dyn Fitter) -> Result<PipelineOutcome> {
    let (bounds, bound_traces) = bound_all(net, fitter, derive_seed(opts.seed, &[STAGE_BOUND]))?;
    info!("bounds {bounds:?}");
    let candidates = build_candidate_set(bounds);
    let selection = stochastic_forward_select(
        net,
        &candidates.terms,
        opts.refits,
        fitter,
        derive_seed(opts.seed, &[STAGE_SELECT]),
    )?;
    info!("{} of {} candidate terms survive selection", selection.surviving.len(), candidates.len());
    let models = model_space(&selection.surviving, &opts.exogenous);
    let fits = fit_models(net, &models, &opts.mcmle, derive_seed(opts.seed, &[STAGE_FIT]))?;
    let cfg = SamplerConfig {
        seed: derive_seed(opts.seed, &[STAGE_SCREEN]),
        ..opts.screening
    };
    let screening = screen_fits(net, &fits, &opts.rules, &cfg)?;
    Ok(PipelineOutcome {
        bounds,
        bound_traces,
        candidates,
        selection,
        fits,
        screening,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::terms::{Family, TermSpec};

    #[test]
    fn model_space_is_univariate_plus_pairs() {
        let terms = [TermSpec::kstar(2), TermSpec::plain(Family::Triangle), TermSpec::with_k(Family::Dsp, 1)];
        let models = model_space(&terms, &[TermSpec::exogenous(Family::NodeCov, "wealth")]);
        assert_eq!(models.len(), 6);
        assert!(models.iter().all(|m| m[0] == TermSpec::edges() && m.last().unwrap().family == Family::NodeCov));
        assert_eq!(models[3].len(), 4);
        assert!(model_space(&[], &[]).is_empty());
    }
}
