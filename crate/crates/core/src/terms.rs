//! Model term specifications and their text grammar.
//!
//! Grammar: `family[(k)][,decay=τ][,attr=name]`, for example `kstar(2)`,
//! `gwesp,decay=0.5` or `nodematch,attr=FACTION`. A model is a `+`-separated
//! list of terms.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{ErgmError, Result};

pub const DEFAULT_DECAY: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    Edges,
    KStar,
    Dsp,
    Esp,
    Nsp,
    Triangle,
    Isolates,
    Sociality,
    DegCrossProd,
    DegreePopularity,
    GwEsp,
    GwNsp,
    GwDsp,
    GwDegree,
    /// Σ over edges of `x_i + x_j`.
    NodeCov,
    /// Number of edges whose endpoints share the attribute value.
    NodeMatch,
    /// Σ over edges of `|x_i − x_j|`.
    AbsDiff,
}

impl Family {
    pub const ENDOGENOUS: [Family; 13] = [
        Family::KStar,
        Family::Dsp,
        Family::Nsp,
        Family::Esp,
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

    pub fn name(self) -> &'static str {
        match self {
            Family::Edges => "edges",
            Family::KStar => "kstar",
            Family::Dsp => "dsp",
            Family::Esp => "esp",
            Family::Nsp => "nsp",
            Family::Triangle => "triangle",
            Family::Isolates => "isolates",
            Family::Sociality => "sociality",
            Family::DegCrossProd => "degcrossprod",
            Family::DegreePopularity => "degreepopularity",
            Family::GwEsp => "gwesp",
            Family::GwNsp => "gwnsp",
            Family::GwDsp => "gwdsp",
            Family::GwDegree => "gwdegree",
            Family::NodeCov => "nodecov",
            Family::NodeMatch => "nodematch",
            Family::AbsDiff => "absdiff",
        }
    }

    pub fn from_name(s: &str) -> Option<Family> {
        Some(match s {
            "edges" => Family::Edges,
            "kstar" => Family::KStar,
            "dsp" => Family::Dsp,
            "esp" => Family::Esp,
            "nsp" => Family::Nsp,
            "triangle" | "triangles" => Family::Triangle,
            "isolates" => Family::Isolates,
            "sociality" => Family::Sociality,
            "degcrossprod" => Family::DegCrossProd,
            "degreepopularity" | "degree_popularity" => Family::DegreePopularity,
            "gwesp" => Family::GwEsp,
            "gwnsp" => Family::GwNsp,
            "gwdsp" => Family::GwDsp,
            "gwdegree" => Family::GwDegree,
            "nodecov" => Family::NodeCov,
            "nodematch" => Family::NodeMatch,
            "absdiff" => Family::AbsDiff,
            _ => return None,
        })
    }

    pub fn takes_k(self) -> bool {
        matches!(self, Family::KStar | Family::Dsp | Family::Esp | Family::Nsp)
    }

    pub fn takes_decay(self) -> bool {
        matches!(
            self,
            Family::GwEsp | Family::GwNsp | Family::GwDsp | Family::GwDegree
        )
    }

    pub fn is_exogenous(self) -> bool {
        matches!(self, Family::NodeCov | Family::NodeMatch | Family::AbsDiff)
    }

    /// Smallest `k` accepted by the family.
    pub fn min_k(self) -> u32 {
        match self {
            Family::KStar => 2,
            _ => 0,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One model term. Equality (and hashing) is structural over every field.
#[derive(Clone, Debug)]
pub struct TermSpec {
    pub family: Family,
    pub k: Option<u32>,
    pub decay: Option<f64>,
    pub attr_name: Option<String>,
}

impl TermSpec {
    pub fn edges() -> Self {
        Self::plain(Family::Edges)
    }

    pub fn plain(family: Family) -> Self {
        TermSpec {
            family,
            k: None,
            decay: None,
            attr_name: None,
        }
    }

    pub fn with_k(family: Family, k: u32) -> Self {
        TermSpec {
            k: Some(k),
            ..Self::plain(family)
        }
    }

    pub fn with_decay(family: Family, decay: f64) -> Self {
        TermSpec {
            decay: Some(decay),
            ..Self::plain(family)
        }
    }

    pub fn exogenous(family: Family, attr: impl Into<String>) -> Self {
        TermSpec {
            attr_name: Some(attr.into()),
            ..Self::plain(family)
        }
    }

    pub fn kstar(k: u32) -> Self {
        Self::with_k(Family::KStar, k)
    }

    pub fn validate(&self) -> Result<()> {
        let f = self.family;
        match (f.takes_k(), self.k) {
            (true, None) => return Err(ErgmError::malformed(self.to_string(), "requires k")),
            (false, Some(_)) => return Err(ErgmError::malformed(self.to_string(), "does not take k")),
            (true, Some(k)) if k < f.min_k() => {
                return Err(ErgmError::malformed(
                    self.to_string(),
                    format!("k must be at least {}", f.min_k()),
                ))
            }
            _ => {}
        }
        match (f.takes_decay(), self.decay) {
            (true, None) => return Err(ErgmError::malformed(self.to_string(), "requires a decay")),
            (false, Some(_)) => {
                return Err(ErgmError::malformed(self.to_string(), "does not take a decay"))
            }
            (true, Some(d)) if !(d.is_finite() && d >= 0.0) => {
                return Err(ErgmError::malformed(
                    self.to_string(),
                    "decay must be a non-negative finite number",
                ))
            }
            _ => {}
        }
        match (f.is_exogenous(), &self.attr_name) {
            (true, None) => Err(ErgmError::malformed(self.to_string(), "requires attr=")),
            (false, Some(_)) => {
                Err(ErgmError::malformed(self.to_string(), "does not take an attribute"))
            }
            _ => Ok(()),
        }
    }
}

impl PartialEq for TermSpec {
    fn eq(&self, other: &Self) -> bool {
        self.family == other.family
            && self.k == other.k
            && self.decay.map(f64::to_bits) == other.decay.map(f64::to_bits)
            && self.attr_name == other.attr_name
    }
}

impl Eq for TermSpec {}

impl Hash for TermSpec {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.family.hash(state);
        self.k.hash(state);
        self.decay.map(f64::to_bits).hash(state);
        self.attr_name.hash(state);
    }
}

impl fmt::Display for TermSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.family.name())?;
        if let Some(k) = self.k {
            write!(f, "({k})")?;
        }
        if let Some(d) = self.decay {
            write!(f, ",decay={d}")?;
        }
        if let Some(a) = &self.attr_name {
            write!(f, ",attr={a}")?;
        }
        Ok(())
    }
}

impl FromStr for TermSpec {
    type Err = ErgmError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let mut parts = s.split(',').map(str::trim);
        let head = parts.next().unwrap_or_default();
        let (name, k) = match head.find('(') {
            Some(open) => {
                let close = head
                    .strip_suffix(')')
                    .ok_or_else(|| ErgmError::malformed(s, "unclosed `(`"))?;
                let inner = &close[open + 1..];
                let k = inner
                    .trim()
                    .parse::<u32>()
                    .map_err(|_| ErgmError::malformed(s, format!("`{inner}` is not a natural number")))?;
                (&head[..open], Some(k))
            }
            None => (head, None),
        };
        let family = Family::from_name(name.trim())
            .ok_or_else(|| ErgmError::malformed(s, format!("unknown family `{name}`")))?;
        let mut term = TermSpec {
            family,
            k,
            decay: None,
            attr_name: None,
        };
        for opt in parts {
            let (key, value) = opt
                .split_once('=')
                .ok_or_else(|| ErgmError::malformed(s, format!("expected key=value, found `{opt}`")))?;
            match key.trim() {
                "decay" => {
                    let d = value
                        .trim()
                        .parse::<f64>()
                        .map_err(|_| ErgmError::malformed(s, format!("bad decay `{value}`")))?;
                    term.decay = Some(d);
                }
                "attr" => term.attr_name = Some(value.trim().to_string()),
                other => return Err(ErgmError::malformed(s, format!("unknown option `{other}`"))),
            }
        }
        if family.takes_decay() && term.decay.is_none() {
            term.decay = Some(DEFAULT_DECAY);
        }
        term.validate()?;
        Ok(term)
    }
}

impl Serialize for Family {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for Family {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let name = String::deserialize(d)?;
        Family::from_name(&name).ok_or_else(|| serde::de::Error::custom(format!("unknown term family `{name}`")))
    }
}

impl Serialize for TermSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for TermSpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Parses a `+`-separated term list. The edge term is prepended when absent
/// and duplicates are rejected.
pub fn parse_model_terms(s: &str) -> Result<Vec<TermSpec>> {
    let mut terms: Vec<TermSpec> = Vec::new();
    for piece in s.split('+').map(str::trim).filter(|p| !p.is_empty()) {
        let t: TermSpec = piece.parse()?;
        if terms.contains(&t) {
            return Err(ErgmError::malformed(piece, "term listed twice"));
        }
        terms.push(t);
    }
    Ok(with_edges_first(terms))
}

/// Moves (or inserts) the edge term to the front.
pub fn with_edges_first(mut terms: Vec<TermSpec>) -> Vec<TermSpec> {
    terms.retain(|t| t.family != Family::Edges);
    terms.insert(0, TermSpec::edges());
    terms
}

pub fn format_terms(terms: &[TermSpec]) -> String {
    terms
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(" + ")
}
