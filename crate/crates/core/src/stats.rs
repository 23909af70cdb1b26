//! Sufficient statistics, change scores and the motif census.
//!
//! Every change score here is the increment of the global statistic caused by
//! *adding* an absent dyad. Removal scores are the negated addition score of
//! the network with the dyad already removed.

use serde::{Deserialize, Serialize};

use crate::error::{ErgmError, Result};
use crate::graph::{Attribute, Direction, DyadToggle, Network};
use crate::terms::{Family, TermSpec};

/// `C(n, k)` as a float. Exact while the result fits in 53 bits.
pub fn binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut r = 1.0f64;
    for i in 1..=k {
        r = r * (n - k + i) as f64 / i as f64;
    }
    r
}

/// Geometric weight `e^τ (1 − (1 − e^{−τ})^k)` used by the gw* families.
#[inline]
pub fn gw_weight(decay: f64, k: u32) -> f64 {
    if k == 0 {
        return 0.0;
    }
    decay.exp() * (1.0 - (1.0 - (-decay).exp()).powi(k as i32))
}

/// Checks the term grammar and that any attribute it names exists on `net`
/// with a usable type.
pub fn check_term(net: &Network, term: &TermSpec) -> Result<()> {
    term.validate()?;
    if let Some(name) = &term.attr_name {
        let attr = net
            .attribute(name)
            .ok_or_else(|| ErgmError::UnknownAttribute(name.clone()))?;
        if matches!(term.family, Family::NodeCov | Family::AbsDiff)
            && matches!(attr, Attribute::Categorical(_))
        {
            return Err(ErgmError::malformed(
                term.to_string(),
                format!("attribute `{name}` is categorical; a numeric column is required"),
            ));
        }
    }
    Ok(())
}

fn attr<'a>(net: &'a Network, term: &TermSpec) -> &'a Attribute {
    let name = term.attr_name.as_deref().unwrap_or_default();
    net.attribute(name)
        .unwrap_or_else(|| panic!("attribute `{name}` was not checked"))
}

/// Per-dyad weight for the shared-partner families.
#[inline]
fn sp_weight(term: &TermSpec, shared: u32, edge: bool) -> f64 {
    match term.family {
        Family::Dsp => (shared == term.k.unwrap()) as u8 as f64,
        Family::Esp => (edge && shared == term.k.unwrap()) as u8 as f64,
        Family::Nsp => (!edge && shared == term.k.unwrap()) as u8 as f64,
        Family::GwDsp => gw_weight(term.decay.unwrap(), shared),
        Family::GwEsp if edge => gw_weight(term.decay.unwrap(), shared),
        Family::GwNsp if !edge => gw_weight(term.decay.unwrap(), shared),
        _ => 0.0,
    }
}

fn is_shared_partner_family(f: Family) -> bool {
    matches!(
        f,
        Family::Dsp | Family::Esp | Family::Nsp | Family::GwDsp | Family::GwEsp | Family::GwNsp
    )
}

/// `T_term(net)`.
pub fn global_stat(net: &Network, term: &TermSpec) -> Result<f64> {
    check_term(net, term)?;
    Ok(global_stat_unchecked(net, term))
}

pub(crate) fn global_stat_unchecked(net: &Network, term: &TermSpec) -> f64 {
    let n = net.node_count();
    let degrees = net.degrees();
    match term.family {
        Family::Edges => net.edge_count() as f64,
        Family::KStar => {
            let k = term.k.unwrap() as u64;
            degrees.iter().map(|&d| binomial(d as u64, k)).sum()
        }
        Family::Triangle => triangle_count(net) as f64,
        Family::Isolates => degrees.iter().filter(|&&d| d == 0).count() as f64,
        Family::Sociality => degrees.iter().skip(1).map(|&d| d as f64).sum(),
        Family::DegCrossProd => {
            let edges = net.edges();
            if edges.is_empty() {
                return 0.0;
            }
            let s: u64 = edges
                .iter()
                .map(|&(i, j)| degrees[i] as u64 * degrees[j] as u64)
                .sum();
            s as f64 / edges.len() as f64
        }
        Family::DegreePopularity => degrees.iter().map(|&d| (d as f64).powf(1.5)).sum(),
        Family::GwDegree => {
            let decay = term.decay.unwrap();
            degrees.iter().map(|&d| gw_weight(decay, d)).sum()
        }
        f if is_shared_partner_family(f) => {
            let mut total = 0.0;
            for i in 0..n {
                for j in i + 1..n {
                    total += sp_weight(term, net.common_neighbors(i, j), net.has_edge(i, j));
                }
            }
            total
        }
        Family::NodeCov => {
            let a = attr(net, term);
            net.edges()
                .iter()
                .map(|&(i, j)| a.numeric(i).unwrap() + a.numeric(j).unwrap())
                .sum()
        }
        Family::NodeMatch => {
            let a = attr(net, term);
            net.edges().iter().filter(|&&(i, j)| a.matches(i, j)).count() as f64
        }
        Family::AbsDiff => {
            let a = attr(net, term);
            net.edges()
                .iter()
                .map(|&(i, j)| (a.numeric(i).unwrap() - a.numeric(j).unwrap()).abs())
                .sum()
        }
        _ => unreachable!(),
    }
}

/// Change in `T_term` from adding the absent dyad `{i, j}`.
pub(crate) fn add_delta(net: &Network, term: &TermSpec, i: usize, j: usize) -> f64 {
    debug_assert!(!net.has_edge(i, j));
    let di = net.degree(i);
    let dj = net.degree(j);
    match term.family {
        Family::Edges => 1.0,
        Family::KStar => {
            let k = term.k.unwrap() as u64 - 1;
            binomial(di as u64, k) + binomial(dj as u64, k)
        }
        Family::Triangle => net.common_neighbors(i, j) as f64,
        Family::Isolates => -(((di == 0) as u8 + (dj == 0) as u8) as f64),
        Family::Sociality => ((i != 0) as u8 + (j != 0) as u8) as f64,
        Family::DegCrossProd => {
            let e = net.edge_count() as u64;
            let s = net.degree_product_sum();
            let s_new = s
                + net.neighbor_degree_sum(i)
                + net.neighbor_degree_sum(j)
                + (di as u64 + 1) * (dj as u64 + 1);
            let before = if e == 0 { 0.0 } else { s as f64 / e as f64 };
            s_new as f64 / (e + 1) as f64 - before
        }
        Family::DegreePopularity => {
            let f = |d: u32| (d as f64).powf(1.5);
            f(di + 1) - f(di) + f(dj + 1) - f(dj)
        }
        Family::GwDegree => {
            let decay = term.decay.unwrap();
            gw_weight(decay, di + 1) - gw_weight(decay, di) + gw_weight(decay, dj + 1)
                - gw_weight(decay, dj)
        }
        f if is_shared_partner_family(f) => {
            // the dyad itself keeps its partner count and becomes an edge
            let own = net.common_neighbors(i, j);
            let mut delta = sp_weight(term, own, true) - sp_weight(term, own, false);
            // j becomes a new partner of i and every neighbour of j, and vice versa
            for (a, b) in [(i, j), (j, i)] {
                for h in net.neighbors(b) {
                    let shared = net.common_neighbors(a, h);
                    let edge = net.has_edge(a, h);
                    delta += sp_weight(term, shared + 1, edge) - sp_weight(term, shared, edge);
                }
            }
            delta
        }
        Family::NodeCov => {
            let a = attr(net, term);
            a.numeric(i).unwrap() + a.numeric(j).unwrap()
        }
        Family::NodeMatch => attr(net, term).matches(i, j) as u8 as f64,
        Family::AbsDiff => {
            let a = attr(net, term);
            (a.numeric(i).unwrap() - a.numeric(j).unwrap()).abs()
        }
        _ => unreachable!(),
    }
}

/// `T_term(toggle(net, t)) − T_term(net)`.
pub fn change_stat(net: &Network, term: &TermSpec, t: DyadToggle) -> Result<f64> {
    check_term(net, term)?;
    if t.j() >= net.node_count() {
        return Err(ErgmError::IndexOutOfRange {
            index: t.j(),
            n: net.node_count(),
        });
    }
    let present = net.has_edge(t.i(), t.j());
    match (t.direction(), present) {
        (Direction::Add, false) => Ok(add_delta(net, term, t.i(), t.j())),
        (Direction::Remove, true) => {
            let mut without = net.clone();
            without.set_dyad(t.i(), t.j(), false);
            Ok(-add_delta(&without, term, t.i(), t.j()))
        }
        (dir, _) => Err(ErgmError::ToggleConflict {
            i: t.i(),
            j: t.j(),
            direction: if dir == Direction::Add { "add" } else { "remove" },
            state: if present { "present" } else { "absent" },
        }),
    }
}

/// Statistic vector for an ordered term list.
pub fn stat_vector(net: &Network, terms: &[TermSpec]) -> Result<Vec<f64>> {
    terms.iter().map(|t| global_stat(net, t)).collect()
}

/// Addition change-score vector for every dyad, with the observed state of each
/// dyad, in `(i, j)` lexicographic order. This is the MPLE design matrix.
pub fn dyad_change_scores(net: &Network, terms: &[TermSpec]) -> Result<Vec<(Vec<f64>, bool)>> {
    for t in terms {
        check_term(net, t)?;
    }
    let n = net.node_count();
    let mut scratch = net.clone();
    let mut rows = Vec::with_capacity(net.dyad_count());
    for i in 0..n {
        for j in i + 1..n {
            let present = scratch.has_edge(i, j);
            if present {
                scratch.set_dyad(i, j, false);
            }
            let delta = terms.iter().map(|t| add_delta(&scratch, t, i, j)).collect();
            if present {
                scratch.set_dyad(i, j, true);
            }
            rows.push((delta, present));
        }
    }
    Ok(rows)
}

fn triangle_count(net: &Network) -> u64 {
    net.edges()
        .iter()
        .map(|&(i, j)| net.common_neighbors(i, j) as u64)
        .sum::<u64>()
        / 3
}

/// Motif counts in both the unordered and the doubled convention.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MotifCensus {
    pub edges: u64,
    pub two_stars_unordered: u64,
    pub two_stars_doubled: u64,
    pub triangles_unordered: u64,
    pub triangles_doubled: u64,
    pub isolates: u64,
}

pub fn motif_census(net: &Network) -> MotifCensus {
    let two_stars: u64 = net
        .degrees()
        .iter()
        .map(|&d| d as u64 * (d as u64).saturating_sub(1) / 2)
        .sum();
    let triangles = triangle_count(net);
    MotifCensus {
        edges: net.edge_count() as u64,
        two_stars_unordered: two_stars,
        two_stars_doubled: 2 * two_stars,
        triangles_unordered: triangles,
        triangles_doubled: 2 * triangles,
        isolates: net.degrees().iter().filter(|&&d| d == 0).count() as u64,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Motif {
    Edge,
    TwoStarPath,
    Triangle,
}

impl Motif {
    pub const ALL: [Motif; 3] = [Motif::Edge, Motif::TwoStarPath, Motif::Triangle];

    pub fn order(self) -> u32 {
        match self {
            Motif::Edge => 2,
            Motif::TwoStarPath | Motif::Triangle => 3,
        }
    }
}

/// `|hom(motif, net)|` from closed forms.
pub fn homomorphism_count(motif: Motif, net: &Network) -> u64 {
    match motif {
        Motif::Edge => 2 * net.edge_count() as u64,
        Motif::TwoStarPath => net.degrees().iter().map(|&d| (d as u64).pow(2)).sum(),
        Motif::Triangle => 6 * triangle_count(net),
    }
}

/// `t(H, G) = |hom(H, G)| / |V(G)|^{|V(H)|}`.
pub fn homomorphism_density(motif: Motif, net: &Network) -> f64 {
    let n = net.node_count();
    if n == 0 {
        return 0.0;
    }
    homomorphism_count(motif, net) as f64 / (n as f64).powi(motif.order() as i32)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k3() -> Network {
        Network::from_edge_list(3, &[(0, 1), (1, 2), (0, 2)]).unwrap()
    }

    fn t(s: &str) -> TermSpec {
        s.parse().unwrap()
    }

    #[test]
    fn triangle_examples() {
        let net = k3();
        assert_eq!(global_stat(&net, &t("triangle")).unwrap(), 1.0);
        assert_eq!(global_stat(&net, &t("kstar(2)")).unwrap(), 3.0);
        assert_eq!(global_stat(&net, &t("esp(1)")).unwrap(), 3.0);
        assert_eq!(global_stat(&net, &t("nsp(1)")).unwrap(), 0.0);
        assert_eq!(global_stat(&net, &t("dsp(1)")).unwrap(), 3.0);
    }

    #[test]
    fn change_score_examples() {
        let path = Network::from_edge_list(3, &[(0, 2), (2, 1)]).unwrap();
        let add = DyadToggle::add(0, 1).unwrap();
        assert_eq!(change_stat(&path, &t("edges"), add).unwrap(), 1.0);
        assert_eq!(change_stat(&path, &t("triangle"), add).unwrap(), 1.0);
        assert!(matches!(
            change_stat(&k3(), &t("triangle"), add),
            Err(ErgmError::ToggleConflict { .. })
        ));
        assert_eq!(
            change_stat(&k3(), &t("triangle"), DyadToggle::remove(0, 1).unwrap()).unwrap(),
            -1.0
        );
    }

    #[test]
    fn motif_closed_forms_on_k3() {
        let c = motif_census(&k3());
        assert_eq!((c.edges, c.two_stars_unordered, c.triangles_unordered, c.isolates), (3, 3, 1, 0));
        assert_eq!(c.two_stars_doubled, 6);
        assert!((homomorphism_density(Motif::Edge, &k3()) - 2.0 / 3.0).abs() < 1e-15);
        assert!((homomorphism_density(Motif::Triangle, &k3()) - 6.0 / 27.0).abs() < 1e-15);
        for m in Motif::ALL {
            assert_eq!(homomorphism_density(m, &Network::empty(4)), 0.0);
        }
    }

    #[test]
    fn exogenous_terms_need_attributes() {
        let mut net = k3();
        assert!(matches!(
            global_stat(&net, &t("nodecov,attr=w")),
            Err(ErgmError::UnknownAttribute(_))
        ));
        net.set_attribute("w", Attribute::Numeric(vec![1.0, 2.0, 4.0])).unwrap();
        net.set_attribute("g", Attribute::Categorical(vec!["a".into(), "a".into(), "b".into()]))
            .unwrap();
        assert_eq!(global_stat(&net, &t("nodecov,attr=w")).unwrap(), 14.0);
        assert_eq!(global_stat(&net, &t("absdiff,attr=w")).unwrap(), 6.0);
        assert_eq!(global_stat(&net, &t("nodematch,attr=g")).unwrap(), 1.0);
        assert!(global_stat(&net, &t("nodecov,attr=g")).is_err());
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(6, 2), 15.0);
        assert_eq!(binomial(2, 3), 0.0);
        assert_eq!(binomial(29, 14), 77_558_760.0);
        assert_eq!(binomial(5, 0), 1.0);
    }
}
