//! Model fitting: closed-form null model, maximum pseudo-likelihood,
//! contrastive-divergence seeded Monte-Carlo MLE and exact enumeration for
//! tiny graphs.

mod exact;
mod linalg;
mod mcmle;
mod mple;
mod null;

use serde::{Deserialize, Serialize};

pub use exact::{fit_exact, ExactFitter, ExactTable, EXACT_MAX_NODES};
pub use mcmle::{fit_mcmle, McmleConfig, McmleFitter};
pub use mple::{fit_mple, observed_boundary, MpleFitter};
pub use null::fit_null;

use crate::error::{ErgmError, Result};
use crate::graph::Network;
use crate::terms::TermSpec;

/// Coefficients beyond this magnitude are treated as diverging to ±∞.
pub const DIVERGENCE_THRESHOLD: f64 = 25.0;

/// Relative AIC change assigned to fits that produced no usable AIC.
pub const FAILED_FIT_B: f64 = -10.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Divergence {
    Finite,
    NegInf,
    PosInf,
    Failed,
}

impl Divergence {
    pub fn is_finite(self) -> bool {
        self == Divergence::Finite
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitMethod {
    Null,
    Mple,
    CdMcmle,
    Exact,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub terms: Vec<TermSpec>,
    #[serde(with = "crate::float::vec")]
    pub theta_hat: Vec<f64>,
    #[serde(with = "crate::float")]
    pub loglik: f64,
    #[serde(with = "crate::float")]
    pub aic: f64,
    pub diverged: Vec<Divergence>,
    pub method: FitMethod,
    pub seed: u64,
    /// Sampler runs spent on MC-MLE iterations (zero for deterministic fits).
    pub n_refits_consumed: u32,
    pub converged: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl FitResult {
    pub(crate) fn finite(
        terms: &[TermSpec],
        theta_hat: Vec<f64>,
        loglik: f64,
        method: FitMethod,
        seed: u64,
    ) -> Self {
        let p = terms.len() as f64;
        FitResult {
            terms: terms.to_vec(),
            diverged: vec![Divergence::Finite; terms.len()],
            theta_hat,
            loglik,
            aic: 2.0 * p - 2.0 * loglik,
            method,
            seed,
            n_refits_consumed: 0,
            converged: true,
            note: None,
        }
    }

    /// A fit with at least one non-finite coordinate; the AIC is the `+∞`
    /// sentinel so the fit always loses comparisons.
    pub(crate) fn flagged(
        terms: &[TermSpec],
        mut theta_hat: Vec<f64>,
        diverged: Vec<Divergence>,
        method: FitMethod,
        seed: u64,
        note: impl Into<String>,
    ) -> Self {
        debug_assert!(diverged.iter().any(|d| !d.is_finite()));
        for (t, d) in theta_hat.iter_mut().zip(&diverged) {
            match d {
                Divergence::NegInf => *t = f64::NEG_INFINITY,
                Divergence::PosInf => *t = f64::INFINITY,
                Divergence::Failed if !t.is_finite() => *t = f64::NAN,
                _ => {}
            }
        }
        FitResult {
            terms: terms.to_vec(),
            theta_hat,
            loglik: f64::NAN,
            aic: f64::INFINITY,
            diverged,
            method,
            seed,
            n_refits_consumed: 0,
            converged: false,
            note: Some(note.into()),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.diverged.iter().all(|d| d.is_finite())
    }

    /// Whether any coordinate was flagged as diverging to `−∞`.
    pub fn has_neg_inf(&self) -> bool {
        self.diverged.contains(&Divergence::NegInf)
    }
}

/// Something that fits a term list to an observed network.
pub trait Fitter: Sync {
    fn fit(&self, net: &Network, terms: &[TermSpec], seed: u64) -> Result<FitResult>;
}

/// `b = (AIC_0 − AIC_i) / AIC_0`. A non-finite `aic_i` maps to [`FAILED_FIT_B`].
pub fn relative_aic_change(aic0: f64, aic_i: f64) -> Result<f64> {
    if !(aic0 > 0.0) {
        return Err(ErgmError::NonPositiveNullAic(aic0));
    }
    if !aic_i.is_finite() {
        return Ok(FAILED_FIT_B);
    }
    Ok(((aic0 - aic_i) / aic0).max(FAILED_FIT_B))
}
