//! Undirected simple graphs over a fixed node set.
//!
//! Adjacency is stored as one bitset row per node, so dyad lookup is O(1) and
//! common-neighbour counts are a popcount over `N/64` words. Degrees, the edge
//! count and the degree cross-product sum `Σ_{(i,j)∈E} d_i d_j` are maintained
//! incrementally by [`Network::apply`].

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{ErgmError, Result};

/// One nodal covariate column.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "values", rename_all = "lowercase")]
pub enum Attribute {
    Numeric(Vec<f64>),
    Categorical(Vec<String>),
}

impl Attribute {
    pub fn len(&self) -> usize {
        match self {
            Attribute::Numeric(v) => v.len(),
            Attribute::Categorical(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn numeric(&self, v: usize) -> Option<f64> {
        match self {
            Attribute::Numeric(x) => Some(x[v]),
            Attribute::Categorical(_) => None,
        }
    }

    /// Whether nodes `a` and `b` carry the same value.
    pub fn matches(&self, a: usize, b: usize) -> bool {
        match self {
            Attribute::Numeric(x) => x[a] == x[b],
            Attribute::Categorical(x) => x[a] == x[b],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Default)]
struct NodeData {
    labels: Vec<String>,
    attributes: BTreeMap<String, Attribute>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Add,
    Remove,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Direction::Add => f.write_str("add"),
            Direction::Remove => f.write_str("remove"),
        }
    }
}

/// A single dyad flip, stored with `i < j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DyadToggle {
    i: usize,
    j: usize,
    direction: Direction,
}

impl DyadToggle {
    pub fn new(a: usize, b: usize, direction: Direction) -> Result<Self> {
        if a == b {
            return Err(ErgmError::SelfLoop(a));
        }
        let (i, j) = if a < b { (a, b) } else { (b, a) };
        Ok(DyadToggle { i, j, direction })
    }

    pub fn add(a: usize, b: usize) -> Result<Self> {
        Self::new(a, b, Direction::Add)
    }

    pub fn remove(a: usize, b: usize) -> Result<Self> {
        Self::new(a, b, Direction::Remove)
    }

    pub fn i(&self) -> usize {
        self.i
    }

    pub fn j(&self) -> usize {
        self.j
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn inverse(&self) -> Self {
        let direction = match self.direction {
            Direction::Add => Direction::Remove,
            Direction::Remove => Direction::Add,
        };
        DyadToggle { direction, ..*self }
    }
}

/// An undirected simple graph with optional node labels and attributes.
#[derive(Clone, PartialEq)]
pub struct Network {
    n: usize,
    words: usize,
    adj: Vec<u64>,
    degrees: Vec<u32>,
    edge_count: usize,
    degree_product_sum: u64,
    nodes: Arc<NodeData>,
}

impl fmt::Debug for Network {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Network")
            .field("n", &self.n)
            .field("edges", &self.edges())
            .finish()
    }
}

impl Network {
    /// Empty graph on `n` nodes labelled `0..n`.
    pub fn empty(n: usize) -> Self {
        let labels = (0..n).map(|v| v.to_string()).collect();
        Self::with_labels(labels)
    }

    pub fn with_labels(labels: Vec<String>) -> Self {
        let n = labels.len();
        let words = n.div_ceil(64).max(1);
        Network {
            n,
            words,
            adj: vec![0; n * words],
            degrees: vec![0; n],
            edge_count: 0,
            degree_product_sum: 0,
            nodes: Arc::new(NodeData {
                labels,
                attributes: BTreeMap::new(),
            }),
        }
    }

    pub fn from_edge_list(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut net = Network::empty(n);
        for &(a, b) in edges {
            net.check_index(a)?;
            net.check_index(b)?;
            if a == b {
                return Err(ErgmError::SelfLoop(a));
            }
            if net.has_edge(a, b) {
                return Err(ErgmError::DuplicateEdge(a.min(b), a.max(b)));
            }
            net.set_dyad(a, b, true);
        }
        Ok(net)
    }

    /// Same node set (labels and attributes) with no edges.
    pub fn cleared(&self) -> Self {
        Network {
            adj: vec![0; self.adj.len()],
            degrees: vec![0; self.n],
            edge_count: 0,
            degree_product_sum: 0,
            ..self.clone()
        }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn dyad_count(&self) -> usize {
        self.n * self.n.saturating_sub(1) / 2
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn degree(&self, v: usize) -> u32 {
        self.degrees[v]
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    /// `Σ_{(i,j)∈E} d_i·d_j`, kept current across toggles.
    pub fn degree_product_sum(&self) -> u64 {
        self.degree_product_sum
    }

    pub fn labels(&self) -> &[String] {
        &self.nodes.labels
    }

    pub fn label(&self, v: usize) -> &str {
        &self.nodes.labels[v]
    }

    pub fn attribute(&self, name: &str) -> Option<&Attribute> {
        self.nodes.attributes.get(name)
    }

    pub fn attributes(&self) -> &BTreeMap<String, Attribute> {
        &self.nodes.attributes
    }

    pub fn set_attribute(&mut self, name: impl Into<String>, column: Attribute) -> Result<()> {
        if column.len() != self.n {
            return Err(ErgmError::InvalidConfig(format!(
                "attribute column has {} values for {} nodes",
                column.len(),
                self.n
            )));
        }
        Arc::make_mut(&mut self.nodes)
            .attributes
            .insert(name.into(), column);
        Ok(())
    }

    #[inline]
    fn row(&self, v: usize) -> &[u64] {
        &self.adj[v * self.words..(v + 1) * self.words]
    }

    #[inline]
    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        (self.adj[a * self.words + b / 64] >> (b % 64)) & 1 == 1
    }

    pub fn neighbors(&self, v: usize) -> Neighbors<'_> {
        let row = self.row(v);
        Neighbors {
            row,
            word: 0,
            bits: row.first().copied().unwrap_or(0),
        }
    }

    /// Number of nodes adjacent to both `a` and `b`.
    #[inline]
    pub fn common_neighbors(&self, a: usize, b: usize) -> u32 {
        self.row(a)
            .iter()
            .zip(self.row(b))
            .map(|(x, y)| (x & y).count_ones())
            .sum()
    }

    /// Sum of the degrees of the neighbours of `v`.
    pub fn neighbor_degree_sum(&self, v: usize) -> u64 {
        self.neighbors(v).map(|k| self.degrees[k] as u64).sum()
    }

    /// All edges as `(i, j)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count);
        for i in 0..self.n {
            out.extend(self.neighbors(i).filter(|&j| j > i).map(|j| (i, j)));
        }
        out
    }

    /// `(edges, non-edges)`; the two always sum to `C(N,2)`.
    pub fn dyad_census(&self) -> (usize, usize) {
        (self.edge_count, self.dyad_count() - self.edge_count)
    }

    fn check_index(&self, v: usize) -> Result<()> {
        if v >= self.n {
            Err(ErgmError::IndexOutOfRange {
                index: v,
                n: self.n,
            })
        } else {
            Ok(())
        }
    }

    /// Validated in-place toggle.
    pub fn apply(&mut self, t: DyadToggle) -> Result<()> {
        self.check_index(t.j)?;
        let present = self.has_edge(t.i, t.j);
        match (t.direction, present) {
            (Direction::Add, true) => Err(ErgmError::ToggleConflict {
                i: t.i,
                j: t.j,
                direction: "add",
                state: "present",
            }),
            (Direction::Remove, false) => Err(ErgmError::ToggleConflict {
                i: t.i,
                j: t.j,
                direction: "remove",
                state: "absent",
            }),
            (Direction::Add, false) => {
                self.set_dyad(t.i, t.j, true);
                Ok(())
            }
            (Direction::Remove, true) => {
                self.set_dyad(t.i, t.j, false);
                Ok(())
            }
        }
    }

    /// Returns a copy with `t` applied.
    pub fn toggle(&self, t: DyadToggle) -> Result<Self> {
        let mut next = self.clone();
        next.apply(t)?;
        Ok(next)
    }

    /// Sets dyad `{a,b}` to `present`. No-op when it already has that state.
    /// Callers guarantee `a != b` and both indices are in range.
    pub(crate) fn set_dyad(&mut self, a: usize, b: usize, present: bool) {
        if self.has_edge(a, b) == present {
            return;
        }
        if present {
            let delta = self.neighbor_degree_sum(a)
                + self.neighbor_degree_sum(b)
                + (self.degrees[a] as u64 + 1) * (self.degrees[b] as u64 + 1);
            self.degree_product_sum += delta;
        } else {
            // the edge itself contributes d_a·d_b and each endpoint's other
            // neighbours lose one unit of the endpoint's degree
            let delta = self.neighbor_degree_sum(a) - self.degrees[b] as u64
                + self.neighbor_degree_sum(b)
                - self.degrees[a] as u64
                + self.degrees[a] as u64 * self.degrees[b] as u64;
            self.degree_product_sum -= delta;
        }
        let w = self.words;
        let (ba, bb) = (1u64 << (b % 64), 1u64 << (a % 64));
        if present {
            self.adj[a * w + b / 64] |= ba;
            self.adj[b * w + a / 64] |= bb;
            self.degrees[a] += 1;
            self.degrees[b] += 1;
            self.edge_count += 1;
        } else {
            self.adj[a * w + b / 64] &= !ba;
            self.adj[b * w + a / 64] &= !bb;
            self.degrees[a] -= 1;
            self.degrees[b] -= 1;
            self.edge_count -= 1;
        }
    }
}

/// Iterator over the set bits of one adjacency row.
pub struct Neighbors<'a> {
    row: &'a [u64],
    word: usize,
    bits: u64,
}

impl Iterator for Neighbors<'_> {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        loop {
            if self.bits != 0 {
                let tz = self.bits.trailing_zeros() as usize;
                self.bits &= self.bits - 1;
                return Some(self.word * 64 + tz);
            }
            self.word += 1;
            if self.word >= self.row.len() {
                return None;
            }
            self.bits = self.row[self.word];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn k3() -> Network {
        Network::from_edge_list(3, &[(0, 1), (1, 2), (0, 2)]).unwrap()
    }

    fn recount_product_sum(net: &Network) -> u64 {
        net.edges()
            .iter()
            .map(|&(i, j)| net.degree(i) as u64 * net.degree(j) as u64)
            .sum()
    }

    #[test]
    fn triangle_has_degree_two_everywhere() {
        let net = k3();
        assert_eq!(net.degrees(), &[2, 2, 2]);
        assert_eq!(net.edge_count(), 3);
        assert_eq!(net.dyad_census(), (3, 0));
    }

    #[test]
    fn empty_graphs() {
        let net = Network::from_edge_list(2, &[]).unwrap();
        assert_eq!(net.degrees(), &[0, 0]);
        assert_eq!(Network::empty(5).dyad_census(), (0, 10));
    }

    #[test]
    fn construction_errors() {
        assert!(matches!(
            Network::from_edge_list(3, &[(0, 3)]),
            Err(ErgmError::IndexOutOfRange { index: 3, n: 3 })
        ));
        assert!(matches!(
            Network::from_edge_list(3, &[(1, 1)]),
            Err(ErgmError::SelfLoop(1))
        ));
        assert!(matches!(
            Network::from_edge_list(3, &[(0, 1), (1, 0)]),
            Err(ErgmError::DuplicateEdge(0, 1))
        ));
    }

    #[test]
    fn toggles() {
        let single = Network::empty(2).toggle(DyadToggle::add(0, 1).unwrap()).unwrap();
        assert_eq!(single.edges(), vec![(0, 1)]);

        let path = k3().toggle(DyadToggle::remove(1, 0).unwrap()).unwrap();
        assert_eq!(path.degrees(), &[1, 1, 2]);

        let t = DyadToggle::remove(0, 2).unwrap();
        let back = k3().toggle(t).unwrap().toggle(t.inverse()).unwrap();
        assert_eq!(back, k3());

        assert!(matches!(
            k3().toggle(DyadToggle::add(0, 1).unwrap()),
            Err(ErgmError::ToggleConflict { .. })
        ));
        assert!(matches!(
            Network::empty(3).toggle(DyadToggle::remove(0, 1).unwrap()),
            Err(ErgmError::ToggleConflict { .. })
        ));
    }

    #[test]
    fn neighbors_cross_word_boundaries() {
        let net = Network::from_edge_list(130, &[(0, 63), (0, 64), (0, 129), (64, 129)]).unwrap();
        assert_eq!(net.neighbors(0).collect::<Vec<_>>(), vec![63, 64, 129]);
        assert_eq!(net.common_neighbors(0, 64), 1);
    }

    #[test]
    fn random_toggle_sequences_keep_degrees_consistent() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let n = rng.random_range(2..20);
            let mut net = Network::empty(n);
            for _ in 0..50 {
                let a = rng.random_range(0..n);
                let mut b = rng.random_range(0..n - 1);
                if b >= a {
                    b += 1;
                }
                let dir = if net.has_edge(a, b) {
                    Direction::Remove
                } else {
                    Direction::Add
                };
                net.apply(DyadToggle::new(a, b, dir).unwrap()).unwrap();
            }
            for v in 0..n {
                assert_eq!(net.degree(v) as usize, net.neighbors(v).count());
                for u in 0..n {
                    assert_eq!(net.has_edge(u, v), net.has_edge(v, u));
                }
                assert!(!net.has_edge(v, v));
            }
            let degree_sum: u32 = net.degrees().iter().sum();
            assert_eq!(degree_sum as usize, 2 * net.edge_count());
            assert_eq!(net.degree_product_sum(), recount_product_sum(&net));
            let (e, ne) = net.dyad_census();
            assert_eq!(e + ne, n * (n - 1) / 2);
        }
    }
}
