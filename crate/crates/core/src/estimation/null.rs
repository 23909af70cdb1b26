use super::{Divergence, FitMethod, FitResult};
use crate::error::{ErgmError, Result};
use crate::graph::Network;
use crate::terms::TermSpec;

/// Bernoulli graph in closed form: `θ̂₀ = logit(|E|/D)`,
/// `ℓ = |E| ln p̂ + (D − |E|) ln(1 − p̂)`.
///
/// Empty and complete graphs are flagged (`θ̂₀ = ∓∞`) rather than rejected.
pub fn fit_null(net: &Network) -> Result<FitResult> {
    let d = net.dyad_count();
    if net.node_count() < 2 {
        return Err(ErgmError::InvalidConfig("the null model needs at least two nodes".into()));
    }
    let e = net.edge_count();
    let terms = [TermSpec::edges()];
    if e == 0 || e == d {
        let flag = if e == 0 { Divergence::NegInf } else { Divergence::PosInf };
        return Ok(FitResult::flagged(
            &terms,
            vec![0.0],
            vec![flag],
            FitMethod::Null,
            0,
            "degenerate density",
        ));
    }
    let (e, d) = (e as f64, d as f64);
    let p = e / d;
    let loglik = e * p.ln() + (d - e) * (1.0 - p).ln();
    Ok(FitResult::finite(&terms, vec![(p / (1.0 - p)).ln()], loglik, FitMethod::Null, 0))
}
