//! Candidate-set construction by bounding the natural-number inputs of the
//! parameterised families, and stochastic forward selection on the lower
//! decile of the relative AIC change over repeated refits.

use log::{debug, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ErgmError, Result};
use crate::estimation::{fit_null, relative_aic_change, Fitter, FAILED_FIT_B};
use crate::graph::Network;
use crate::seed::derive_seed;
use crate::terms::{Family, TermSpec, DEFAULT_DECAY};

/// Families whose term takes a count `k` that has to be bounded.
pub const BOUNDED_FAMILIES: [Family; 4] = [Family::KStar, Family::Dsp, Family::Esp, Family::Nsp];

/// Families that enter the candidate set once, without a count.
pub const FIXED_FAMILIES: [Family; 9] = [
    Family::Triangle,
    Family::Isolates,
    Family::Sociality,
    Family::DegCrossProd,
    Family::DegreePopularity,
    Family::GwEsp,
    Family::GwNsp,
    Family::GwDsp,
    Family::GwDegree,
];

/// Consecutive `−∞` fits that end the search for a bound.
const RUN_LENGTH: u32 = 3;

/// Upper bounds on `k` for the four parameterised families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bounds {
    pub kstar: u32,
    pub dsp: u32,
    pub esp: u32,
    pub nsp: u32,
}

impl Bounds {
    pub fn get(&self, family: Family) -> Option<u32> {
        match family {
            Family::KStar => Some(self.kstar),
            Family::Dsp => Some(self.dsp),
            Family::Esp => Some(self.esp),
            Family::Nsp => Some(self.nsp),
            _ => None,
        }
    }

    fn set(&mut self, family: Family, value: u32) {
        match family {
            Family::KStar => self.kstar = value,
            Family::Dsp => self.dsp = value,
            Family::Esp => self.esp = value,
            Family::Nsp => self.nsp = value,
            _ => unreachable!("{family:?} is not bounded"),
        }
    }
}

/// One step of the bound search.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundProbe {
    pub k: u32,
    pub neg_inf: bool,
    #[serde(with = "crate::float")]
    pub aic: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundTrace {
    pub family: Family,
    pub bound: u32,
    pub probes: Vec<BoundProbe>,
}

fn start_k(family: Family) -> u32 {
    match family {
        Family::KStar => 2,
        _ => 1,
    }
}

/// Fits `edges + family(j)` for `j = 2, 3, …` (kstar) or `j = 1, 2, …`
/// (shared partners) and stops at the first run of three consecutive fits
/// flagged `−∞`; the bound is the `j` just before that run. The search never
/// goes past `j = N − 1`, beyond which every such statistic is zero.
pub fn bound_input(net: &Network, family: Family, fitter: &dyn Fitter, seed: u64) -> Result<BoundTrace> {
    if !BOUNDED_FAMILIES.contains(&family) {
        return Err(ErgmError::InvalidConfig(format!("`{}` takes no count to bound", family.name())));
    }
    let first = start_k(family);
    let cap = net.node_count().saturating_sub(1) as u32;
    let mut probes = Vec::new();
    let mut run = 0;
    for k in first..=cap {
        let terms = [TermSpec::edges(), TermSpec::with_k(family, k)];
        let fit = fitter.fit(net, &terms, derive_seed(seed, &[family as u64, k as u64]))?;
        let neg_inf = fit.has_neg_inf();
        debug!("bound {}({k}): neg_inf={neg_inf} aic={}", family.name(), fit.aic);
        probes.push(BoundProbe { k, neg_inf, aic: fit.aic });
        if neg_inf {
            run += 1;
            if run == RUN_LENGTH {
                break;
            }
        } else {
            run = 0;
        }
    }
    // a run cut short by the cap continues into the all-zero region
    let bound = if run > 0 {
        probes.len() as u32 + first - run - 1
    } else {
        cap.max(first - 1)
    };
    Ok(BoundTrace { family, bound, probes })
}

/// Bounds for all four families.
pub fn bound_all(net: &Network, fitter: &dyn Fitter, seed: u64) -> Result<(Bounds, Vec<BoundTrace>)> {
    let mut bounds = Bounds {
        kstar: 1,
        dsp: 0,
        esp: 0,
        nsp: 0,
    };
    let mut traces = Vec::new();
    for family in BOUNDED_FAMILIES {
        let trace = bound_input(net, family, fitter, seed)?;
        bounds.set(family, trace.bound);
        traces.push(trace);
    }
    Ok((bounds, traces))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CandidateSet {
    pub terms: Vec<TermSpec>,
    pub bounds: Bounds,
}

impl CandidateSet {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn model_space(&self) -> u64 {
        model_space_size(self.terms.len())
    }
}

/// `kstar(2..=N₄) ∪ dsp(1..=N₁) ∪ esp(1..=N₂) ∪ nsp(1..=N₃)` followed by the
/// nine count-free families.
pub fn build_candidate_set(bounds: Bounds) -> CandidateSet {
    let mut terms = Vec::new();
    for family in BOUNDED_FAMILIES {
        let hi = bounds.get(family).unwrap();
        terms.extend((start_k(family)..=hi).map(|k| TermSpec::with_k(family, k)));
    }
    for family in FIXED_FAMILIES {
        terms.push(if family.takes_decay() {
            TermSpec::with_decay(family, DEFAULT_DECAY)
        } else {
            TermSpec::plain(family)
        });
    }
    CandidateSet { terms, bounds }
}

/// Univariate plus pairwise models over `n` terms: `n + C(n, 2)`.
pub fn model_space_size(n: usize) -> u64 {
    let n = n as u64;
    n * (n + 1) / 2
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Category {
    /// Every refit improves on the null AIC.
    D1,
    /// The lower decile does not improve on the null AIC.
    D2,
    /// Mixed, but the lower decile still improves.
    D3,
}

/// Position of the lower 10th percentile in an ascending sample of size `m`.
pub fn decile_index(m: usize) -> usize {
    (m as f64 * 0.1).ceil().max(1.0) as usize - 1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermVerdict {
    pub term: TermSpec,
    pub b_samples: Vec<f64>,
    pub b_hat: f64,
    pub median: f64,
    pub failed_refits: usize,
    pub category: Category,
    pub kept: bool,
}

impl TermVerdict {
    pub fn from_samples(term: TermSpec, b_samples: Vec<f64>) -> Self {
        assert!(!b_samples.is_empty());
        let mut sorted = b_samples.clone();
        sorted.sort_by(f64::total_cmp);
        let b_hat = sorted[decile_index(sorted.len())];
        let median = sorted[(sorted.len() - 1) / 2];
        let min = sorted[0];
        let category = if min > 0.0 {
            Category::D1
        } else if b_hat <= 0.0 {
            Category::D2
        } else {
            Category::D3
        };
        TermVerdict {
            term,
            failed_refits: b_samples.iter().filter(|&&b| b <= FAILED_FIT_B).count(),
            b_samples,
            b_hat,
            median,
            category,
            kept: b_hat > 0.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelectionReport {
    pub aic0: f64,
    pub refits: usize,
    pub seed: u64,
    pub verdicts: Vec<TermVerdict>,
    pub surviving: Vec<TermSpec>,
    pub model_space: u64,
    pub d3_count: usize,
}

pub const MIN_REFITS: usize = 10;

/// Refits `edges + term` `m` times per candidate, each refit with its own
/// seed, and keeps the terms whose lower-decile relative AIC change is
/// positive. A refit that errors counts as a failed fit.
pub fn stochastic_forward_select(
    net: &Network,
    candidates: &[TermSpec],
    m: usize,
    fitter: &dyn Fitter,
    seed: u64,
) -> Result<SelectionReport> {
    if m < MIN_REFITS {
        return Err(ErgmError::InvalidConfig(format!(
            "at least {MIN_REFITS} refits are needed for a 10th percentile, got {m}"
        )));
    }
    let null = fit_null(net)?;
    if !null.aic.is_finite() {
        return Err(ErgmError::InvalidConfig("the null model is degenerate on this network".into()));
    }
    let aic0 = null.aic;
    if aic0 <= 0.0 {
        return Err(ErgmError::NonPositiveNullAic(aic0));
    }
    let jobs: Vec<(usize, usize)> = (0..candidates.len()).flat_map(|t| (0..m).map(move |r| (t, r))).collect();
    let samples: Vec<f64> = jobs
        .par_iter()
        .map(|&(t, r)| {
            let terms = [TermSpec::edges(), candidates[t].clone()];
            match fitter.fit(net, &terms, derive_seed(seed, &[t as u64, r as u64])) {
                Ok(fit) => relative_aic_change(aic0, fit.aic).unwrap_or(FAILED_FIT_B),
                Err(e) => {
                    warn!("refit {r} of {} failed: {e}", candidates[t]);
                    FAILED_FIT_B
                }
            }
        })
        .collect();
    let verdicts: Vec<TermVerdict> = candidates
        .iter()
        .zip(samples.chunks(m))
        .map(|(term, b)| TermVerdict::from_samples(term.clone(), b.to_vec()))
        .collect();
    let surviving: Vec<TermSpec> = verdicts.iter().filter(|v| v.kept).map(|v| v.term.clone()).collect();
    Ok(SelectionReport {
        aic0,
        refits: m,
        seed,
        model_space: model_space_size(surviving.len()),
        d3_count: verdicts.iter().filter(|v| v.kept && v.category == Category::D3).count(),
        verdicts,
        surviving,
    })
}
