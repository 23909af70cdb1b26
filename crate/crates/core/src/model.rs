use serde::{Deserialize, Serialize};

use crate::error::{ErgmError, Result};
use crate::graph::Network;
use crate::stats::{check_term, stat_vector};
use crate::terms::{Family, TermSpec};

/// Edge term plus further terms with one coefficient each.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawModel")]
pub struct ErgmModel {
    terms: Vec<TermSpec>,
    theta: Vec<f64>,
}

#[derive(Deserialize)]
struct RawModel {
    terms: Vec<TermSpec>,
    #[serde(alias = "theta_hat")]
    theta: Vec<f64>,
}

impl TryFrom<RawModel> for ErgmModel {
    type Error = ErgmError;

    fn try_from(raw: RawModel) -> Result<Self> {
        ErgmModel::new(raw.terms, raw.theta)
    }
}

impl ErgmModel {
    pub fn new(terms: Vec<TermSpec>, theta: Vec<f64>) -> Result<Self> {
        if terms.len() != theta.len() {
            return Err(ErgmError::InvalidConfig(format!(
                "{} terms but {} coefficients",
                terms.len(),
                theta.len()
            )));
        }
        if terms.first().map(|t| t.family) != Some(Family::Edges) {
            return Err(ErgmError::InvalidConfig(
                "the first model term must be `edges`".into(),
            ));
        }
        for (idx, t) in terms.iter().enumerate() {
            t.validate()?;
            if terms[..idx].contains(t) {
                return Err(ErgmError::malformed(t.to_string(), "term listed twice"));
            }
        }
        Ok(ErgmModel { terms, theta })
    }

    pub fn edges_only(theta0: f64) -> Self {
        ErgmModel {
            terms: vec![TermSpec::edges()],
            theta: vec![theta0],
        }
    }

    pub fn terms(&self) -> &[TermSpec] {
        &self.terms
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn with_theta(&self, theta: Vec<f64>) -> Result<Self> {
        ErgmModel::new(self.terms.clone(), theta)
    }

    pub fn check_finite(&self) -> Result<()> {
        for (t, &v) in self.terms.iter().zip(&self.theta) {
            if !v.is_finite() {
                return Err(ErgmError::NonFiniteTheta {
                    term: t.to_string(),
                    value: v,
                });
            }
        }
        Ok(())
    }

    /// Checks every term against the attributes of `net`.
    pub fn check_network(&self, net: &Network) -> Result<()> {
        self.terms.iter().try_for_each(|t| check_term(net, t))
    }

    /// `H(net) = Σ_i θ_i T_i(net)`.
    pub fn hamiltonian(&self, net: &Network) -> Result<f64> {
        let stats = stat_vector(net, &self.terms)?;
        Ok(dot(&self.theta, &stats))
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
