//! Degeneracy screening of fitted models by comparing motif summaries of
//! simulated draws with the observed network, and distance ranking of the
//! models that pass.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ErgmError, Result};
use crate::graph::Network;
use crate::model::ErgmModel;
use crate::sampler::{run_chain, SamplerConfig};
use crate::seed::derive_seed;
use crate::stats::{homomorphism_density, motif_census, Motif, MotifCensus};
use crate::terms::format_terms;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleMotif {
    Edge,
    TwoStar,
    Triangle,
    Isolates,
}

impl RuleMotif {
    /// Count in the doubled convention for 2-stars and triangles.
    pub fn count(self, c: &MotifCensus) -> f64 {
        (match self {
            RuleMotif::Edge => c.edges,
            RuleMotif::TwoStar => c.two_stars_doubled,
            RuleMotif::Triangle => c.triangles_doubled,
            RuleMotif::Isolates => c.isolates,
        }) as f64
    }

    fn name(self) -> &'static str {
        match self {
            RuleMotif::Edge => "edge",
            RuleMotif::TwoStar => "two_star",
            RuleMotif::Triangle => "triangle",
            RuleMotif::Isolates => "isolates",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Summary {
    Mean,
    Min,
    Max,
}

impl Summary {
    fn apply(self, values: &[f64]) -> f64 {
        match self {
            Summary::Mean => values.iter().sum::<f64>() / values.len() as f64,
            Summary::Min => values.iter().copied().fold(f64::INFINITY, f64::min),
            Summary::Max => values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        }
    }

    fn name(self) -> &'static str {
        match self {
            Summary::Mean => "mean",
            Summary::Min => "min",
            Summary::Max => "max",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GapMode {
    /// `|S_O − S_M|`
    Absolute,
    /// `|S_O − S_M| / max(S_O, 1)`
    Relative,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScreeningRule {
    pub motif: RuleMotif,
    pub summary: Summary,
    pub mode: GapMode,
    pub threshold: f64,
}

impl ScreeningRule {
    pub fn new(motif: RuleMotif, summary: Summary, mode: GapMode, threshold: f64) -> Result<Self> {
        if !(threshold >= 0.0) || !threshold.is_finite() {
            return Err(ErgmError::InvalidConfig(format!("rule threshold {threshold} must be finite and ≥ 0")));
        }
        Ok(ScreeningRule {
            motif,
            summary,
            mode,
            threshold,
        })
    }

    /// Mean simulated edge count off by 100% or more of the observed count.
    pub fn default_degeneracy() -> Self {
        ScreeningRule {
            motif: RuleMotif::Edge,
            summary: Summary::Mean,
            mode: GapMode::Relative,
            threshold: 1.0,
        }
    }

    pub fn gap(&self, observed: f64, simulated: f64) -> f64 {
        let d = (observed - simulated).abs();
        match self.mode {
            GapMode::Absolute => d,
            GapMode::Relative => d / observed.max(1.0),
        }
    }
}

impl fmt::Display for ScreeningRule {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        let mode = match self.mode {
            GapMode::Absolute => "absolute",
            GapMode::Relative => "relative",
        };
        write!(f, "{} {} {mode} {}", self.motif.name(), self.summary.name(), self.threshold)
    }
}

impl FromStr for ScreeningRule {
    type Err = ErgmError;

    /// `motif summary mode threshold`, e.g. `isolates min absolute 1`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |why: String| ErgmError::InvalidConfig(format!("screening rule `{s}`: {why}"));
        let fields: Vec<&str> = s.split_whitespace().collect();
        let [motif, summary, mode, threshold] = fields.as_slice() else {
            return Err(bad("expected `motif summary mode threshold`".into()));
        };
        let motif = match *motif {
            "edge" | "edges" => RuleMotif::Edge,
            "two_star" | "2star" | "twostar" => RuleMotif::TwoStar,
            "triangle" | "triangles" => RuleMotif::Triangle,
            "isolates" => RuleMotif::Isolates,
            other => return Err(bad(format!("unknown motif `{other}`"))),
        };
        let summary = match *summary {
            "mean" => Summary::Mean,
            "min" => Summary::Min,
            "max" => Summary::Max,
            other => return Err(bad(format!("unknown summary `{other}`"))),
        };
        let mode = match *mode {
            "absolute" => GapMode::Absolute,
            "relative" => GapMode::Relative,
            other => return Err(bad(format!("unknown mode `{other}`"))),
        };
        let threshold: f64 = threshold.parse().map_err(|_| bad(format!("bad threshold `{threshold}`")))?;
        ScreeningRule::new(motif, summary, mode, threshold)
    }
}

/// Parses a rules file: one rule per line, `#` starts a comment.
pub fn parse_rules(text: &str) -> Result<Vec<ScreeningRule>> {
    text.lines()
        .enumerate()
        .filter_map(|(i, line)| {
            let line = line.split('#').next().unwrap().trim();
            (!line.is_empty()).then(|| line.parse().map_err(|e: ErgmError| ErgmError::parse(i + 1, e.to_string())))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RuleOutcome {
    pub rule: ScreeningRule,
    pub observed: f64,
    pub simulated: f64,
    pub gap: f64,
    pub passed: bool,
}

/// Observed or mean simulated motif values, counts in the doubled convention.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MotifSummary {
    pub edges: f64,
    pub two_stars: f64,
    pub triangles: f64,
    pub isolates: f64,
    pub edge_density: f64,
    pub two_star_density: f64,
    pub triangle_density: f64,
}

impl MotifSummary {
    fn of(net: &Network) -> Self {
        let c = motif_census(net);
        MotifSummary {
            edges: c.edges as f64,
            two_stars: c.two_stars_doubled as f64,
            triangles: c.triangles_doubled as f64,
            isolates: c.isolates as f64,
            edge_density: homomorphism_density(Motif::Edge, net),
            two_star_density: homomorphism_density(Motif::TwoStarPath, net),
            triangle_density: homomorphism_density(Motif::Triangle, net),
        }
    }

    fn mean(items: &[MotifSummary]) -> Self {
        let n = items.len() as f64;
        let avg = |f: fn(&MotifSummary) -> f64| items.iter().map(f).sum::<f64>() / n;
        MotifSummary {
            edges: avg(|m| m.edges),
            two_stars: avg(|m| m.two_stars),
            triangles: avg(|m| m.triangles),
            isolates: avg(|m| m.isolates),
            edge_density: avg(|m| m.edge_density),
            two_star_density: avg(|m| m.two_star_density),
            triangle_density: avg(|m| m.triangle_density),
        }
    }

    /// Relative L1 distance over edges, 2-stars and triangles.
    pub fn distance_to(&self, observed: &MotifSummary) -> f64 {
        [
            (self.edges, observed.edges),
            (self.two_stars, observed.two_stars),
            (self.triangles, observed.triangles),
        ]
        .iter()
        .map(|(s, o)| (s - o).abs() / o.max(1.0))
        .sum()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelScreen {
    pub index: usize,
    pub model: ErgmModel,
    pub seed: u64,
    pub simulated: MotifSummary,
    pub rules: Vec<RuleOutcome>,
    pub degenerate: bool,
    pub passed: bool,
    pub distance: f64,
}

impl ModelScreen {
    pub fn label(&self) -> String {
        format_terms(self.model.terms())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScreeningReport {
    pub observed: MotifSummary,
    pub rules: Vec<ScreeningRule>,
    pub draws: usize,
    pub models: Vec<ModelScreen>,
    /// Indices into `models` of the models that pass every rule, best first.
    pub ranking: Vec<usize>,
    pub degenerate_count: usize,
    pub discarded_count: usize,
}

impl ScreeningReport {
    pub fn survivors(&self) -> impl Iterator<Item = &ModelScreen> {
        self.ranking.iter().map(|&i| &self.models[i])
    }
}

/// Simulates `cfg.draws` networks from every model and applies the rules.
/// The default degeneracy rule is always applied; each model's chain gets a
/// seed derived from `cfg.seed` and its position in `models`.
pub fn screen(
    net: &Network,
    models: &[ErgmModel],
    rules: &[ScreeningRule],
    cfg: &SamplerConfig,
) -> Result<ScreeningReport> {
    if models.is_empty() {
        return Err(ErgmError::EmptyModelList);
    }
    cfg.validate()?;
    for m in models {
        m.check_finite()?;
        m.check_network(net)?;
    }
    let default_rule = ScreeningRule::default_degeneracy();
    let mut all_rules = rules.to_vec();
    if !all_rules.contains(&default_rule) {
        all_rules.insert(0, default_rule);
    }
    let observed_census = motif_census(net);
    let observed = MotifSummary::of(net);

    let screens: Vec<ModelScreen> = models
        .par_iter()
        .enumerate()
        .map(|(index, model)| -> Result<ModelScreen> {
            let seed = derive_seed(cfg.seed, &[index as u64]);
            let run = SamplerConfig { seed, ..*cfg };
            let mut censuses = Vec::with_capacity(cfg.draws);
            let mut summaries = Vec::with_capacity(cfg.draws);
            run_chain(model, net, &run, |g, _| {
                censuses.push(motif_census(g));
                summaries.push(MotifSummary::of(g));
            })?;
            let simulated = MotifSummary::mean(&summaries);
            let outcomes: Vec<RuleOutcome> = all_rules
                .iter()
                .map(|rule| {
                    let values: Vec<f64> = censuses.iter().map(|c| rule.motif.count(c)).collect();
                    let sim = rule.summary.apply(&values);
                    let obs = rule.motif.count(&observed_census);
                    let gap = rule.gap(obs, sim);
                    RuleOutcome {
                        rule: *rule,
                        observed: obs,
                        simulated: sim,
                        gap,
                        passed: gap < rule.threshold,
                    }
                })
                .collect();
            let degenerate = outcomes.iter().any(|o| o.rule == default_rule && !o.passed);
            Ok(ModelScreen {
                index,
                model: model.clone(),
                seed,
                passed: outcomes.iter().all(|o| o.passed),
                distance: simulated.distance_to(&observed),
                simulated,
                rules: outcomes,
                degenerate,
            })
        })
        .collect::<Result<_>>()?;

    let mut ranking: Vec<usize> = screens.iter().filter(|s| s.passed).map(|s| s.index).collect();
    ranking.sort_by(|&a, &b| {
        screens[a]
            .distance
            .total_cmp(&screens[b].distance)
            .then_with(|| screens[a].label().cmp(&screens[b].label()))
    });
    Ok(ScreeningReport {
        observed,
        rules: all_rules,
        draws: cfg.draws,
        degenerate_count: screens.iter().filter(|s| s.degenerate).count(),
        discarded_count: screens.len() - ranking.len(),
        models: screens,
        ranking,
    })
}

/// The `top_n` best-ranked surviving models.
pub fn select_best(report: &ScreeningReport, top_n: usize) -> Result<Vec<&ModelScreen>> {
    if report.ranking.is_empty() {
        return Err(ErgmError::AllModelsDegenerate);
    }
    Ok(report.survivors().take(top_n).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::terms::parse_model_terms;

    #[test]
    fn rule_grammar() {
        let r: ScreeningRule = "isolates min absolute 1".parse().unwrap();
        assert_eq!(r.motif, RuleMotif::Isolates);
        assert_eq!(r.summary, Summary::Min);
        assert_eq!(r.to_string().parse::<ScreeningRule>().unwrap(), r);
        assert!("edge mean relative -1".parse::<ScreeningRule>().is_err());
        assert!("edge mean".parse::<ScreeningRule>().is_err());
        let rules = parse_rules("# defaults\nedge mean relative 1.0\n\ntriangle max absolute 4 # loose\n").unwrap();
        assert_eq!(rules.len(), 2);
    }

    #[test]
    fn relative_gap_floors_the_denominator() {
        let r = ScreeningRule::default_degeneracy();
        assert_eq!(r.gap(0.0, 0.5), 0.5);
        assert_eq!(r.gap(20.0, 40.0), 1.0);
    }

    #[test]
    fn ranking_and_selection() {
        let net = Network::from_edge_list(8, &[(0, 1), (1, 2), (2, 3), (3, 0), (4, 5), (5, 6)]).unwrap();
        let density = 6.0f64 / 28.0;
        let null = ErgmModel::edges_only((density / (1.0 - density)).ln());
        let dense = ErgmModel::new(parse_model_terms("edges + triangle").unwrap(), vec![2.0, 1.0]).unwrap();
        let cfg = SamplerConfig {
            init: crate::sampler::Init::Observed,
            ..SamplerConfig::default()
        };
        let report = screen(&net, &[dense, null], &[], &cfg).unwrap();
        assert!(report.models[0].degenerate);
        assert_eq!(report.ranking, vec![1]);
        assert_eq!(report.discarded_count + report.ranking.len(), 2);
        assert_eq!(select_best(&report, 5).unwrap().len(), 1);
        assert!(matches!(screen(&net, &[], &[], &cfg), Err(ErgmError::EmptyModelList)));
    }
}
