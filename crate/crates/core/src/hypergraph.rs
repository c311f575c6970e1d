//! k-uniform hypergraphs and the two random generators `H(n,p;k)` and
//! `Γ(S,T,p)`.
//!
//! Vertices are 1-based `u32` labels and every edge is stored sorted, so
//! edge sets compare and hash structurally.

use std::collections::BTreeSet;
use std::fmt;

use itertools::Itertools;
use rand::Rng as _;

use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

/// A sorted set of distinct vertex labels.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge(Vec<u32>);

impl Edge {
    /// Builds an edge from arbitrary labels, sorting them. Returns `None` if a
    /// label repeats.
    pub fn new(mut vertices: Vec<u32>) -> Option<Self> {
        vertices.sort_unstable();
        if vertices.windows(2).any(|w| w[0] == w[1]) {
            return None;
        }
        Some(Edge(vertices))
    }

    pub(crate) fn from_sorted(vertices: Vec<u32>) -> Self {
        debug_assert!(vertices.windows(2).all(|w| w[0] < w[1]));
        Edge(vertices)
    }

    pub fn vertices(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: u32) -> bool {
        self.0.binary_search(&v).is_ok()
    }
}

impl fmt::Debug for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.0.iter().join(","))
    }
}

impl From<&[u32]> for Edge {
    /// Panics on repeated labels; intended for literals in tests and examples.
    fn from(v: &[u32]) -> Self {
        Edge::new(v.to_vec()).expect("edge labels must be distinct")
    }
}

/// Number of `k`-subsets of an `n`-set, saturating at `u64::MAX`.
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * u128::from(n - i) / u128::from(i + 1);
        if acc > u128::from(u64::MAX) {
            return u64::MAX;
        }
    }
    acc as u64
}

fn check_probability(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid(format!("probability {p} outside [0, 1]")));
    }
    Ok(())
}

/// A k-uniform hypergraph on vertex set `{1..n}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KUniformHypergraph {
    n: usize,
    k: usize,
    edges: BTreeSet<Edge>,
}

impl KUniformHypergraph {
    pub fn empty(n: usize, k: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::invalid(format!("edge arity k = {k} must be at least 2")));
        }
        Ok(Self { n, k, edges: BTreeSet::new() })
    }

    /// Builds a hypergraph from explicit edges. Duplicate edges collapse.
    pub fn from_edges<I>(n: usize, k: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = Edge>,
    {
        let mut h = Self::empty(n, k)?;
        for e in edges {
            h.insert(e)?;
        }
        Ok(h)
    }

    /// The complete k-uniform hypergraph on `n` vertices.
    pub fn complete(n: usize, k: usize) -> Result<Self> {
        let edges = (1..=n as u32).combinations(k).map(Edge::from_sorted);
        Self::from_edges(n, k, edges)
    }

    /// Inserts an edge; returns whether it was new.
    pub fn insert(&mut self, e: Edge) -> Result<bool> {
        if e.len() != self.k {
            return Err(Error::invalid(format!("edge {e:?} does not have {} vertices", self.k)));
        }
        if e.vertices().iter().any(|&v| v == 0 || v as usize > self.n) {
            return Err(Error::invalid(format!("edge {e:?} has a vertex outside 1..={}", self.n)));
        }
        Ok(self.edges.insert(e))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn edges(&self) -> &BTreeSet<Edge> {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn contains(&self, e: &Edge) -> bool {
        self.edges.contains(e)
    }

    /// Degree of every vertex; index 0 is unused.
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n + 1];
        for e in &self.edges {
            for &v in e.vertices() {
                deg[v as usize] += 1;
            }
        }
        deg
    }

    /// True iff some vertex lies in no edge.
    pub fn has_isolated_vertex(&self) -> bool {
        self.degrees().iter().skip(1).any(|&d| d == 0)
    }

    /// Union of edge sets; both operands must share `n` and `k`.
    pub fn union_with(&mut self, other: &KUniformHypergraph) {
        debug_assert_eq!((self.n, self.k), (other.n, other.k));
        self.edges.extend(other.edges.iter().cloned());
    }
}

/// `H(n,p;k)`: every k-subset of `{1..n}` is an edge independently with
/// probability `p`.
///
/// Candidate edges are visited in lexicographic order and each consumes one
/// uniform draw from a ChaCha8 stream seeded with `seed`.
pub fn generate_hnpk(n: usize, k: usize, p: f64, seed: u64) -> Result<KUniformHypergraph> {
    if k < 3 {
        return Err(Error::invalid(format!("edge arity k = {k} must be at least 3")));
    }
    if n < k {
        return Err(Error::invalid(format!("n = {n} is smaller than k = {k}")));
    }
    check_probability(p)?;
    let mut rng = rng_from_seed(seed);
    let mut edges = BTreeSet::new();
    for c in (1..=n as u32).combinations(k) {
        if rng.random::<f64>() < p {
            edges.insert(Edge::from_sorted(c));
        }
    }
    Ok(KUniformHypergraph { n, k, edges })
}

/// True iff some vertex of `h` belongs to no edge.
pub fn has_isolated_vertex(h: &KUniformHypergraph) -> bool {
    h.has_isolated_vertex()
}

/// An edge of a bipartite-pattern hypergraph: two vertices from `S` and
/// `κ` vertices from `T`, both parts sorted.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PatternEdge {
    pub s: [u32; 2],
    pub t: Vec<u32>,
}

impl PatternEdge {
    pub fn new(s1: u32, s2: u32, mut t: Vec<u32>) -> Self {
        t.sort_unstable();
        let s = if s1 <= s2 { [s1, s2] } else { [s2, s1] };
        PatternEdge { s, t }
    }

    /// All `k = κ + 2` labels as a sorted edge, or `None` if a label repeats.
    pub fn to_edge(&self) -> Option<Edge> {
        let mut v = Vec::with_capacity(self.t.len() + 2);
        v.extend_from_slice(&self.s);
        v.extend_from_slice(&self.t);
        Edge::new(v)
    }

    pub fn vertices(&self) -> impl Iterator<Item = u32> + '_ {
        self.s.iter().chain(self.t.iter()).copied()
    }
}

/// `Γ(S,T,p)`: a k-uniform hypergraph whose edges take exactly two vertices
/// from `S` and `κ = k − 2` from `T`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BipartitePatternGraph {
    s: Vec<u32>,
    t: Vec<u32>,
    kappa: usize,
    edges: BTreeSet<PatternEdge>,
}

impl BipartitePatternGraph {
    /// An edgeless pattern graph. `|S|` must be `2m` and `|T|` must be `κm`
    /// for one `m ≥ 1`, and `S`, `T` must be disjoint.
    pub fn empty(mut s: Vec<u32>, mut t: Vec<u32>, kappa: usize) -> Result<Self> {
        if kappa < 1 {
            return Err(Error::invalid("κ must be at least 1"));
        }
        s.sort_unstable();
        t.sort_unstable();
        if s.is_empty() || s.len() % 2 != 0 {
            return Err(Error::invalid(format!("|S| = {} must be even and positive", s.len())));
        }
        let m = s.len() / 2;
        if t.len() != kappa * m {
            return Err(Error::invalid(format!(
                "|T| = {} but κm = {}",
                t.len(),
                kappa * m
            )));
        }
        if s.windows(2).any(|w| w[0] == w[1]) || t.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::invalid("S and T must not contain repeated labels"));
        }
        if s.iter().any(|v| t.binary_search(v).is_ok()) {
            return Err(Error::invalid("S and T must be disjoint"));
        }
        Ok(Self { s, t, kappa, edges: BTreeSet::new() })
    }

    /// Builds a pattern graph from explicit edges, validating the 2/κ split.
    pub fn from_edges<I>(s: Vec<u32>, t: Vec<u32>, kappa: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = PatternEdge>,
    {
        let mut g = Self::empty(s, t, kappa)?;
        for e in edges {
            g.insert(e)?;
        }
        Ok(g)
    }

    pub fn insert(&mut self, e: PatternEdge) -> Result<bool> {
        if e.t.len() != self.kappa {
            return Err(Error::invalid(format!("edge {e:?} must have κ = {} T-vertices", self.kappa)));
        }
        if e.s[0] == e.s[1] || e.t.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::invalid(format!("edge {e:?} repeats a vertex")));
        }
        if !e.s.iter().all(|v| self.s.binary_search(v).is_ok()) {
            return Err(Error::invalid(format!("edge {e:?} has an S-vertex outside S")));
        }
        if !e.t.iter().all(|v| self.t.binary_search(v).is_ok()) {
            return Err(Error::invalid(format!("edge {e:?} has a T-vertex outside T")));
        }
        Ok(self.edges.insert(e))
    }

    pub fn s(&self) -> &[u32] {
        &self.s
    }

    pub fn t(&self) -> &[u32] {
        &self.t
    }

    pub fn kappa(&self) -> usize {
        self.kappa
    }

    pub fn k(&self) -> usize {
        self.kappa + 2
    }

    /// Number of blocks in a perfect matching, `|S| / 2`.
    pub fn m(&self) -> usize {
        self.s.len() / 2
    }

    pub fn edges(&self) -> &BTreeSet<PatternEdge> {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn contains(&self, e: &PatternEdge) -> bool {
        self.edges.contains(e)
    }

    /// Same vertex sets, edges filtered by `keep`.
    pub fn filter_edges(&self, mut keep: impl FnMut(&PatternEdge) -> bool) -> Self {
        Self {
            s: self.s.clone(),
            t: self.t.clone(),
            kappa: self.kappa,
            edges: self.edges.iter().filter(|e| keep(e)).cloned().collect(),
        }
    }
}

/// `Γ(S,T,p)` on explicit vertex lists. Candidates are visited with the
/// S-pair outer and the T-subset inner, both lexicographic over the sorted
/// lists, one uniform draw each.
pub fn generate_gamma_on(
    s: Vec<u32>,
    t: Vec<u32>,
    k: usize,
    p: f64,
    seed: u64,
) -> Result<BipartitePatternGraph> {
    if k < 3 {
        return Err(Error::invalid(format!("edge arity k = {k} must be at least 3")));
    }
    check_probability(p)?;
    let mut g = BipartitePatternGraph::empty(s, t, k - 2)?;
    let mut rng = rng_from_seed(seed);
    let mut edges = BTreeSet::new();
    for pair in g.s.iter().copied().combinations(2) {
        for tset in g.t.iter().copied().combinations(g.kappa) {
            if rng.random::<f64>() < p {
                edges.insert(PatternEdge { s: [pair[0], pair[1]], t: tset });
            }
        }
    }
    g.edges = edges;
    Ok(g)
}

/// `Γ(S,T,p)` with `S = {1..2m}` and `T = {2m+1 .. 2m+κm}`.
pub fn generate_gamma(m: usize, k: usize, p: f64, seed: u64) -> Result<BipartitePatternGraph> {
    if m < 1 {
        return Err(Error::invalid("m must be at least 1"));
    }
    if k < 3 {
        return Err(Error::invalid(format!("edge arity k = {k} must be at least 3")));
    }
    let kappa = k - 2;
    let s: Vec<u32> = (1..=(2 * m) as u32).collect();
    let t: Vec<u32> = ((2 * m + 1) as u32..=(2 * m + kappa * m) as u32).collect();
    generate_gamma_on(s, t, k, p, seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hnpk_extremes() {
        let h = generate_hnpk(6, 3, 0.0, 11).unwrap();
        assert_eq!(h.edge_count(), 0);
        let h = generate_hnpk(6, 3, 1.0, 11).unwrap();
        assert_eq!(h.edge_count(), 20);
        assert_eq!(h, KUniformHypergraph::complete(6, 3).unwrap());
    }

    #[test]
    fn hnpk_rejects_bad_input() {
        assert!(generate_hnpk(2, 3, 0.5, 0).is_err());
        assert!(generate_hnpk(6, 3, 1.5, 0).is_err());
        assert!(generate_hnpk(6, 3, -0.1, 0).is_err());
        assert!(generate_hnpk(6, 2, 0.5, 0).is_err());
    }

    #[test]
    fn hnpk_is_deterministic() {
        let a = generate_hnpk(10, 4, 0.3, 99).unwrap();
        let b = generate_hnpk(10, 4, 0.3, 99).unwrap();
        assert_eq!(a, b);
        let c = generate_hnpk(10, 4, 0.3, 100).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn gamma_complete_counts() {
        let g = generate_gamma(2, 3, 1.0, 0).unwrap();
        assert_eq!(g.edge_count(), 12);
        let g = generate_gamma(1, 4, 1.0, 0).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert!(generate_gamma(0, 3, 1.0, 0).is_err());
    }

    #[test]
    fn gamma_edges_respect_split() {
        let g = generate_gamma(3, 5, 0.4, 5).unwrap();
        for e in g.edges() {
            assert!(e.s.iter().all(|v| g.s().contains(v)));
            assert_eq!(e.t.len(), 3);
            assert!(e.t.iter().all(|v| g.t().contains(v)));
        }
    }

    #[test]
    fn isolated_vertex_cases() {
        let h = KUniformHypergraph::empty(5, 3).unwrap();
        assert!(has_isolated_vertex(&h));
        let h = KUniformHypergraph::complete(6, 3).unwrap();
        assert!(!has_isolated_vertex(&h));
        let h = KUniformHypergraph::from_edges(4, 3, [Edge::from(&[1, 2, 3][..])]).unwrap();
        assert!(has_isolated_vertex(&h));
    }

    #[test]
    fn edge_rejects_repeats_and_bad_labels() {
        assert!(Edge::new(vec![1, 2, 2]).is_none());
        let mut h = KUniformHypergraph::empty(4, 3).unwrap();
        assert!(h.insert(Edge::from(&[1, 2, 5][..])).is_err());
        assert!(h.insert(Edge::from(&[1, 2][..])).is_err());
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(12, 3), 220);
        assert_eq!(binomial(6, 2), 15);
        assert_eq!(binomial(3, 5), 0);
        assert_eq!(binomial(60, 30), 118_264_581_564_861_424);
    }
}
