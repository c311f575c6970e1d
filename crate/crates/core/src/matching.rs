//! Perfect matchings of bipartite-pattern hypergraphs.
//!
//! A perfect matching of `Γ(S,T,p)` is a set of `m` disjoint edges covering
//! `S` (two vertices each) and `T` (`κ` vertices each). The search is plain
//! backtracking: branch on the uncovered S-vertex with the fewest usable
//! edges and prune as soon as an uncovered vertex of either side has none.

use rand::Rng as _;
use thiserror::Error;

use crate::error::{Error, Result};
use crate::hypergraph::{BipartitePatternGraph, PatternEdge};
use crate::rng::rng_from_seed;

/// Default node-expansion cap for [`find_perfect_matching`].
pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// Default cap on the number of perfect matchings enumerated by
/// [`sample_uniform_matching`].
pub const DEFAULT_ENUMERATION_CAP: u64 = 10_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PatternMatching {
    blocks: Vec<PatternEdge>,
}

impl PatternMatching {
    pub fn blocks(&self) -> &[PatternEdge] {
        &self.blocks
    }

    /// Checks disjointness, full coverage of `S` and `T`, and that every block
    /// is an edge of `g`.
    pub fn validate(&self, g: &BipartitePatternGraph) -> bool {
        if self.blocks.len() != g.m() || !self.blocks.iter().all(|b| g.contains(b)) {
            return false;
        }
        let mut s: Vec<u32> = self.blocks.iter().flat_map(|b| b.s).collect();
        let mut t: Vec<u32> = self.blocks.iter().flat_map(|b| b.t.iter().copied()).collect();
        s.sort_unstable();
        t.sort_unstable();
        s == g.s() && t == g.t()
    }
}

#[derive(Clone, Copy, Debug, Error, PartialEq, Eq)]
pub enum MatchingFailure {
    /// The search tree was explored completely: no perfect matching exists.
    #[error("no perfect matching (search exhausted after {nodes} nodes)")]
    Exhausted { nodes: u64 },
    /// The node budget ran out; existence is undecided.
    #[error("node budget exceeded after {nodes} nodes")]
    BudgetExceeded { nodes: u64 },
}

/// Edge lists re-indexed to dense local indices.
struct Local {
    m: usize,
    s_of: Vec<[usize; 2]>,
    t_of: Vec<Vec<usize>>,
    s_incident: Vec<Vec<usize>>,
    t_incident: Vec<Vec<usize>>,
    edges: Vec<PatternEdge>,
}

impl Local {
    fn new(g: &BipartitePatternGraph) -> Self {
        let s_idx = |v: u32| g.s().binary_search(&v).expect("edge vertex in S");
        let t_idx = |v: u32| g.t().binary_search(&v).expect("edge vertex in T");
        let edges: Vec<PatternEdge> = g.edges().iter().cloned().collect();
        let mut s_incident = vec![Vec::new(); g.s().len()];
        let mut t_incident = vec![Vec::new(); g.t().len()];
        let mut s_of = Vec::with_capacity(edges.len());
        let mut t_of = Vec::with_capacity(edges.len());
        for (i, e) in edges.iter().enumerate() {
            let s = [s_idx(e.s[0]), s_idx(e.s[1])];
            let t: Vec<usize> = e.t.iter().map(|&v| t_idx(v)).collect();
            s_incident[s[0]].push(i);
            s_incident[s[1]].push(i);
            for &x in &t {
                t_incident[x].push(i);
            }
            s_of.push(s);
            t_of.push(t);
        }
        Self { m: g.m(), s_of, t_of, s_incident, t_incident, edges }
    }

    fn usable(&self, e: usize, used_s: &[bool], used_t: &[bool]) -> bool {
        !used_s[self.s_of[e][0]] && !used_s[self.s_of[e][1]] && self.t_of[e].iter().all(|&x| !used_t[x])
    }

    fn set(&self, e: usize, used_s: &mut [bool], used_t: &mut [bool], value: bool) {
        used_s[self.s_of[e][0]] = value;
        used_s[self.s_of[e][1]] = value;
        for &x in &self.t_of[e] {
            used_t[x] = value;
        }
    }
}

struct Search<'a> {
    g: &'a Local,
    used_s: Vec<bool>,
    used_t: Vec<bool>,
    chosen: Vec<usize>,
    nodes: u64,
    budget: u64,
}

enum Outcome {
    Found,
    Dead,
    OutOfBudget,
}

impl Search<'_> {
    fn run(&mut self) -> Outcome {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Outcome::OutOfBudget;
        }
        if self.chosen.len() == self.g.m {
            return Outcome::Found;
        }
        // Every uncovered T-vertex needs a usable edge.
        for (x, inc) in self.g.t_incident.iter().enumerate() {
            if !self.used_t[x] && !inc.iter().any(|&e| self.g.usable(e, &self.used_s, &self.used_t)) {
                return Outcome::Dead;
            }
        }
        // Most constrained uncovered S-vertex.
        let mut best: Option<(usize, usize)> = None;
        for (v, inc) in self.g.s_incident.iter().enumerate() {
            if self.used_s[v] {
                continue;
            }
            let avail = inc.iter().filter(|&&e| self.g.usable(e, &self.used_s, &self.used_t)).count();
            if avail == 0 {
                return Outcome::Dead;
            }
            if best.is_none_or(|(_, a)| avail < a) {
                best = Some((v, avail));
            }
        }
        let (v, _) = best.expect("an uncovered S-vertex remains");
        let candidates: Vec<usize> = self.g.s_incident[v]
            .iter()
            .copied()
            .filter(|&e| self.g.usable(e, &self.used_s, &self.used_t))
            .collect();
        for e in candidates {
            self.g.set(e, &mut self.used_s, &mut self.used_t, true);
            self.chosen.push(e);
            match self.run() {
                Outcome::Dead => {}
                other => return other,
            }
            self.chosen.pop();
            self.g.set(e, &mut self.used_s, &mut self.used_t, false);
        }
        Outcome::Dead
    }
}

/// Searches for a perfect matching, expanding at most `budget` nodes.
///
/// [`MatchingFailure::Exhausted`] certifies that none exists;
/// [`MatchingFailure::BudgetExceeded`] does not.
pub fn find_perfect_matching(
    g: &BipartitePatternGraph,
    budget: u64,
) -> std::result::Result<PatternMatching, MatchingFailure> {
    let local = Local::new(g);
    let mut search = Search {
        g: &local,
        used_s: vec![false; g.s().len()],
        used_t: vec![false; g.t().len()],
        chosen: Vec::with_capacity(g.m()),
        nodes: 0,
        budget,
    };
    match search.run() {
        Outcome::Found => Ok(PatternMatching {
            blocks: search.chosen.iter().map(|&e| local.edges[e].clone()).collect(),
        }),
        Outcome::Dead => Err(MatchingFailure::Exhausted { nodes: search.nodes }),
        Outcome::OutOfBudget => Err(MatchingFailure::BudgetExceeded { nodes: search.nodes }),
    }
}

/// Enumerates perfect matchings in a fixed order: always branch on the
/// lowest-index uncovered S-vertex, so each matching is reached exactly once.
struct Enumerator<'a> {
    g: &'a Local,
    used_s: Vec<bool>,
    used_t: Vec<bool>,
    chosen: Vec<usize>,
}

impl Enumerator<'_> {
    /// Visits matchings in order; `visit` returns `false` to stop early.
    fn walk(&mut self, visit: &mut dyn FnMut(&[usize]) -> bool) -> bool {
        let Some(v) = self.used_s.iter().position(|&u| !u) else {
            return visit(&self.chosen);
        };
        for i in 0..self.g.s_incident[v].len() {
            let e = self.g.s_incident[v][i];
            if !self.g.usable(e, &self.used_s, &self.used_t) {
                continue;
            }
            self.g.set(e, &mut self.used_s, &mut self.used_t, true);
            self.chosen.push(e);
            let go_on = self.walk(visit);
            self.chosen.pop();
            self.g.set(e, &mut self.used_s, &mut self.used_t, false);
            if !go_on {
                return false;
            }
        }
        true
    }
}

fn enumerator<'a>(local: &'a Local, g: &BipartitePatternGraph) -> Enumerator<'a> {
    Enumerator {
        g: local,
        used_s: vec![false; g.s().len()],
        used_t: vec![false; g.t().len()],
        chosen: Vec::with_capacity(g.m()),
    }
}

/// Number of perfect matchings, or an error once `cap` is exceeded.
pub fn count_perfect_matchings(g: &BipartitePatternGraph, cap: u64) -> Result<u64> {
    let local = Local::new(g);
    let mut count = 0u64;
    let mut over = false;
    enumerator(&local, g).walk(&mut |_| {
        count += 1;
        over = count > cap;
        !over
    });
    if over {
        return Err(Error::EnumerationCap { cap });
    }
    Ok(count)
}

/// All perfect matchings in enumeration order, up to `cap`.
pub fn enumerate_perfect_matchings(g: &BipartitePatternGraph, cap: u64) -> Result<Vec<PatternMatching>> {
    let local = Local::new(g);
    let mut out = Vec::new();
    let mut over = false;
    enumerator(&local, g).walk(&mut |chosen| {
        if out.len() as u64 >= cap {
            over = true;
            return false;
        }
        out.push(PatternMatching { blocks: chosen.iter().map(|&e| local.edges[e].clone()).collect() });
        true
    });
    if over {
        return Err(Error::EnumerationCap { cap });
    }
    Ok(out)
}

/// A perfect matching drawn uniformly at random, with the default cap.
pub fn sample_uniform_matching(g: &BipartitePatternGraph, seed: u64) -> Result<PatternMatching> {
    sample_uniform_matching_with_cap(g, seed, DEFAULT_ENUMERATION_CAP)
}

/// Counts all perfect matchings (failing above `cap`), draws a uniform index
/// and walks the enumeration again to it.
pub fn sample_uniform_matching_with_cap(
    g: &BipartitePatternGraph,
    seed: u64,
    cap: u64,
) -> Result<PatternMatching> {
    let total = count_perfect_matchings(g, cap)?;
    if total == 0 {
        return Err(Error::NoMatching);
    }
    let target = rng_from_seed(seed).random_range(0..total);
    let local = Local::new(g);
    let mut seen = 0u64;
    let mut picked = None;
    enumerator(&local, g).walk(&mut |chosen| {
        if seen == target {
            picked = Some(chosen.to_vec());
            return false;
        }
        seen += 1;
        true
    });
    let chosen = picked.expect("target index below the matching count");
    Ok(PatternMatching { blocks: chosen.iter().map(|&e| local.edges[e].clone()).collect() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::generate_gamma;
    use itertools::Itertools;

    /// Brute force: every m-subset of edges that covers S and T.
    fn brute_force_count(g: &BipartitePatternGraph) -> u64 {
        let edges: Vec<&PatternEdge> = g.edges().iter().collect();
        edges
            .iter()
            .combinations(g.m())
            .filter(|c| PatternMatching { blocks: c.iter().map(|e| (**e).clone()).collect() }.validate(g))
            .count() as u64
    }

    #[test]
    fn complete_pattern_has_a_matching() {
        let g = generate_gamma(3, 3, 1.0, 0).unwrap();
        let mm = find_perfect_matching(&g, DEFAULT_BUDGET).unwrap();
        assert!(mm.validate(&g));
    }

    #[test]
    fn empty_pattern_is_exhausted() {
        let g = generate_gamma(2, 3, 0.0, 0).unwrap();
        assert!(matches!(find_perfect_matching(&g, DEFAULT_BUDGET), Err(MatchingFailure::Exhausted { .. })));
        assert_eq!(sample_uniform_matching(&g, 1), Err(Error::NoMatching));
    }

    #[test]
    fn counts_agree_with_brute_force() {
        for seed in 0..40 {
            let g = generate_gamma(3, 3, 0.35, seed).unwrap();
            let brute = brute_force_count(&g);
            assert_eq!(count_perfect_matchings(&g, 1 << 20).unwrap(), brute, "seed {seed}");
            let found = find_perfect_matching(&g, DEFAULT_BUDGET);
            assert_eq!(found.is_ok(), brute > 0, "seed {seed}");
            if let Ok(mm) = found {
                assert!(mm.validate(&g));
            }
        }
        for seed in 0..20 {
            let g = generate_gamma(2, 4, 0.5, seed).unwrap();
            assert_eq!(count_perfect_matchings(&g, 1 << 20).unwrap(), brute_force_count(&g));
        }
    }

    #[test]
    fn exhausted_means_whole_tree_was_visited() {
        // Find an instance with no matching and check that one fewer node of
        // budget turns the certificate into BudgetExceeded.
        let g = (0..)
            .map(|s| generate_gamma(4, 3, 0.15, s).unwrap())
            .find(|g| g.edge_count() > 8 && brute_force_count(g) == 0)
            .unwrap();
        let Err(MatchingFailure::Exhausted { nodes }) = find_perfect_matching(&g, DEFAULT_BUDGET) else {
            panic!("expected exhaustion");
        };
        assert!(matches!(find_perfect_matching(&g, nodes), Err(MatchingFailure::Exhausted { .. })));
        assert_eq!(
            find_perfect_matching(&g, nodes - 1),
            Err(MatchingFailure::BudgetExceeded { nodes })
        );
    }

    #[test]
    fn unique_matching_is_always_returned() {
        let s = vec![1, 2, 3, 4];
        let t = vec![5, 6];
        let edges = [
            PatternEdge::new(1, 2, vec![5]),
            PatternEdge::new(3, 4, vec![6]),
            PatternEdge::new(1, 3, vec![5]),
        ];
        let g = BipartitePatternGraph::from_edges(s, t, 1, edges).unwrap();
        assert_eq!(count_perfect_matchings(&g, 100).unwrap(), 1);
        let first = sample_uniform_matching(&g, 0).unwrap();
        for seed in 1..50 {
            assert_eq!(sample_uniform_matching(&g, seed).unwrap(), first);
        }
    }

    #[test]
    fn enumeration_cap_is_enforced() {
        let g = generate_gamma(3, 3, 1.0, 0).unwrap();
        // 15 pairings of S times 3! assignments of T
        assert_eq!(count_perfect_matchings(&g, 1000).unwrap(), 90);
        assert_eq!(count_perfect_matchings(&g, 89), Err(Error::EnumerationCap { cap: 89 }));
        assert!(sample_uniform_matching_with_cap(&g, 0, 10).is_err());
        assert_eq!(enumerate_perfect_matchings(&g, 1000).unwrap().len(), 90);
    }
}
