//! JSON artifacts written by the pipeline stages, and the aligned text tables
//! printed alongside them.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{Context, Result};
use ergm_core::selection::BoundTrace;
use ergm_core::{
    homomorphism_density, motif_census, Bounds, CandidateSet, FitResult, Motif, Network, ScreeningReport, SelectionReport,
    TermSpec,
};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::config::FitterKind;

pub const MOTIFS: &str = "motifs.json";
pub const BOUNDS: &str = "bounds.json";
pub const CANDIDATES: &str = "candidates.json";
pub const SELECTION: &str = "selection.json";
pub const SCREENING: &str = "screening.json";
pub const MODELS_DIR: &str = "models";

/// Motif counts of the observed network; 2-stars and triangles are in the
/// doubled convention, with the unordered counts alongside.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MotifsArtifact {
    pub network: String,
    pub nodes: usize,
    pub edges: u64,
    pub two_stars: u64,
    pub triangles: u64,
    pub two_stars_unordered: u64,
    pub triangles_unordered: u64,
    pub isolates: u64,
    pub edge_density: f64,
    pub two_star_density: f64,
    pub triangle_density: f64,
}

impl MotifsArtifact {
    pub fn of(name: &str, net: &Network) -> Self {
        let c = motif_census(net);
        MotifsArtifact {
            network: name.to_string(),
            nodes: net.node_count(),
            edges: c.edges,
            two_stars: c.two_stars_doubled,
            triangles: c.triangles_doubled,
            two_stars_unordered: c.two_stars_unordered,
            triangles_unordered: c.triangles_unordered,
            isolates: c.isolates,
            edge_density: homomorphism_density(Motif::Edge, net),
            two_star_density: homomorphism_density(Motif::TwoStarPath, net),
            triangle_density: homomorphism_density(Motif::Triangle, net),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundsArtifact {
    pub seed: u64,
    pub fitter: FitterKind,
    pub bounds: Bounds,
    pub traces: Vec<BoundTrace>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CandidatesArtifact {
    pub bounds: Bounds,
    pub terms: Vec<TermSpec>,
    pub count: usize,
    /// Univariate plus pairwise models over `count` terms.
    pub model_space: u64,
}

impl From<&CandidateSet> for CandidatesArtifact {
    fn from(c: &CandidateSet) -> Self {
        CandidatesArtifact {
            bounds: c.bounds,
            terms: c.terms.clone(),
            count: c.len(),
            model_space: c.model_space(),
        }
    }
}

/// One model of the fitted space and what became of it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelEntry {
    pub index: usize,
    pub terms: Vec<TermSpec>,
    pub fit: String,
    pub finite: bool,
    pub survived: bool,
    /// Position in the survivor ranking, best first.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank: Option<usize>,
}

/// `survivors + degenerate = total`, where `degenerate` counts models
/// without a finite fit (`unfit`) and models failing a rule (`discarded`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScreeningArtifact {
    pub seed: u64,
    pub total: usize,
    pub survivors: usize,
    pub degenerate: usize,
    pub unfit: usize,
    pub discarded: usize,
    pub models: Vec<ModelEntry>,
    pub report: Option<ScreeningReport>,
}

pub fn fit_file_name(index: usize) -> String {
    format!("{MODELS_DIR}/model_{index:03}.json")
}

impl ScreeningArtifact {
    pub fn new(seed: u64, fits: &[FitResult], report: Option<ScreeningReport>) -> Self {
        // screening only sees the finite fits, in order
        let screened: Vec<usize> = (0..fits.len()).filter(|&i| fits[i].is_finite()).collect();
        let mut models: Vec<ModelEntry> = fits
            .iter()
            .enumerate()
            .map(|(index, f)| ModelEntry {
                index,
                terms: f.terms.clone(),
                fit: fit_file_name(index),
                finite: f.is_finite(),
                survived: false,
                rank: None,
            })
            .collect();
        if let Some(r) = &report {
            for (rank, &i) in r.ranking.iter().enumerate() {
                let entry = &mut models[screened[i]];
                entry.survived = true;
                entry.rank = Some(rank + 1);
            }
        }
        let total = fits.len();
        let survivors = models.iter().filter(|m| m.survived).count();
        let unfit = total - screened.len();
        ScreeningArtifact {
            seed,
            total,
            survivors,
            degenerate: total - survivors,
            unfit,
            discarded: screened.len() - survivors,
            models,
            report,
        }
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<()> {
    let path = dir.join(name);
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).with_context(|| format!("cannot create {}", parent.display()))?;
    }
    std::fs::write(&path, to_json(value)?).with_context(|| format!("cannot write {}", path.display()))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("{} is not a valid report", path.display()))
}

fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.4}")
    } else {
        format!("{x}")
    }
}

/// Left-aligned first column, right-aligned rest.
pub fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = String::new();
    let line = |out: &mut String, cells: Vec<&str>| {
        for (i, (cell, w)) in cells.iter().zip(&widths).enumerate() {
            if i == 0 {
                let _ = write!(out, "{cell:<w$}");
            } else {
                let _ = write!(out, "  {cell:>w$}");
            }
        }
        out.push('\n');
    };
    line(&mut out, header.to_vec());
    let rule: Vec<String> = widths.iter().map(|&w| "-".repeat(w)).collect();
    line(&mut out, rule.iter().map(String::as_str).collect());
    for row in rows {
        line(&mut out, row.iter().map(String::as_str).collect());
    }
    out
}

pub fn motifs_table(m: &MotifsArtifact) -> String {
    table(
        &["network", "nodes", "edges", "2-stars", "triangles", "isolates"],
        &[vec![
            m.network.clone(),
            m.nodes.to_string(),
            m.edges.to_string(),
            m.two_stars.to_string(),
            m.triangles.to_string(),
            m.isolates.to_string(),
        ]],
    )
}

pub fn bounds_table(b: &BoundsArtifact) -> String {
    let rows = b
        .traces
        .iter()
        .map(|t| {
            let probes: Vec<String> = t
                .probes
                .iter()
                .map(|p| format!("{}{}", p.k, if p.neg_inf { "-" } else { "+" }))
                .collect();
            vec![t.family.to_string(), t.bound.to_string(), probes.join(" ")]
        })
        .collect::<Vec<_>>();
    table(&["family", "bound", "probes"], &rows)
}

pub fn candidates_table(c: &CandidatesArtifact) -> String {
    table(
        &["kstar", "dsp", "esp", "nsp", "terms", "model space"],
        &[vec![
            c.bounds.kstar.to_string(),
            c.bounds.dsp.to_string(),
            c.bounds.esp.to_string(),
            c.bounds.nsp.to_string(),
            c.count.to_string(),
            c.model_space.to_string(),
        ]],
    )
}

pub fn selection_table(s: &SelectionReport) -> String {
    let rows: Vec<Vec<String>> = s
        .verdicts
        .iter()
        .map(|v| {
            vec![
                v.term.to_string(),
                num(v.b_hat),
                num(v.median),
                v.failed_refits.to_string(),
                format!("{:?}", v.category),
                if v.kept { "yes" } else { "no" }.into(),
            ]
        })
        .collect();
    let mut out = table(&["term", "b_hat", "median", "failed", "category", "kept"], &rows);
    let _ = writeln!(
        out,
        "{} of {} terms kept, model space {}, D3 {}",
        s.surviving.len(),
        s.verdicts.len(),
        s.model_space,
        s.d3_count
    );
    out
}

pub fn screening_table(s: &ScreeningArtifact) -> String {
    let rows: Vec<Vec<String>> = s
        .models
        .iter()
        .map(|m| {
            let distance = s
                .report
                .as_ref()
                .and_then(|r| r.models.iter().find(|x| x.model.terms() == m.terms.as_slice()))
                .map_or("-".to_string(), |x| num(x.distance));
            vec![
                ergm_core::terms::format_terms(&m.terms),
                if m.finite { "finite" } else { "unfit" }.into(),
                distance,
                m.rank.map_or("-".into(), |r| r.to_string()),
            ]
        })
        .collect();
    let mut out = table(&["model", "fit", "distance", "rank"], &rows);
    let _ = writeln!(
        out,
        "{} models: {} survive, {} degenerate ({} unfit, {} discarded)",
        s.total, s.survivors, s.degenerate, s.unfit, s.discarded
    );
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_aligns_columns() {
        let t = table(&["a", "bb"], &[vec!["long".into(), "1".into()], vec!["x".into(), "22".into()]]);
        let lines: Vec<&str> = t.lines().collect();
        assert_eq!(lines[0], "a     bb");
        assert_eq!(lines[2], "long   1");
        assert_eq!(lines[3], "x     22");
    }
}
