//! Exact loose Hamilton cycle search.
//!
//! A loose Hamilton cycle of a k-uniform hypergraph on `n` vertices is a
//! cyclic vertex order with `L = n/(k−1)` edges, each made of `k` consecutive
//! vertices, where consecutive edges share exactly one vertex (a *link*). The
//! other `k−2` vertices of an edge are its interior. A cycle is identified
//! with its edge set, i.e. up to rotation, reflection and reordering of
//! interiors.
//!
//! The search walks link to link. It starts from an edge containing vertex 1
//! together with an ordered choice of its two links `(a, b)`, repeatedly
//! extends from the current link by an edge whose other vertices are all
//! unused, and closes with the unique edge formed by the leftover vertices
//! and the two open links. Dead states `(used vertices, current link, a)` are
//! memoised. Every cycle is reached 4 times when vertex 1 is a link (two
//! starting edges, two orientations) and twice when it is interior; counts
//! are weighted accordingly.

use std::collections::{HashMap, HashSet};

use crate::error::{Error, Result};
use crate::hypergraph::{Edge, KUniformHypergraph};

/// Largest vertex count supported by the bitmask search.
pub const MAX_VERTICES: usize = 64;

/// A loose Hamilton cycle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LooseCycle {
    k: usize,
    order: Vec<u32>,
    edges: Vec<Edge>,
}

impl LooseCycle {
    /// Cyclic vertex sequence of length `n`. The first vertex is a link and
    /// edge `i` occupies positions `i(k−1) ..= i(k−1)+k−1` (mod `n`).
    pub fn order(&self) -> &[u32] {
        &self.order
    }

    /// The `n/(k−1)` edges in cyclic order.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Checks the structural invariants against a host hypergraph.
    pub fn is_valid_in(&self, h: &KUniformHypergraph) -> bool {
        let n = self.order.len();
        let k = self.k;
        if n != h.n() || k != h.k() || n % (k - 1) != 0 {
            return false;
        }
        let mut sorted = self.order.clone();
        sorted.sort_unstable();
        if sorted != (1..=n as u32).collect::<Vec<_>>() {
            return false;
        }
        let l = n / (k - 1);
        if self.edges.len() != l {
            return false;
        }
        for i in 0..l {
            let window: Vec<u32> = (0..k).map(|o| self.order[(i * (k - 1) + o) % n]).collect();
            match Edge::new(window) {
                Some(e) if e == self.edges[i] && h.contains(&e) => {}
                _ => return false,
            }
            let next = &self.edges[(i + 1) % l];
            let shared = self.edges[i].vertices().iter().filter(|&&v| next.contains(v)).count();
            let expected = if l == 2 { 2 } else { 1 };
            if shared != expected {
                return false;
            }
        }
        true
    }
}

fn bit(v: usize) -> u64 {
    1u64 << v
}

fn mask_of(e: &Edge) -> u64 {
    e.vertices().iter().fold(0, |m, &v| m | bit(v as usize - 1))
}

fn vertices_of(mut m: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        (m != 0).then(|| {
            let v = m.trailing_zeros() as usize;
            m &= m - 1;
            v
        })
    })
}

struct LooseSearch {
    n: usize,
    links: usize,
    full: u64,
    edges: Vec<u64>,
    edge_set: HashSet<u64>,
    incident: Vec<Vec<usize>>,
}

impl LooseSearch {
    fn new(h: &KUniformHypergraph) -> Result<Self> {
        let (n, k) = (h.n(), h.k());
        if n % (k - 1) != 0 {
            return Err(Error::Divisibility { n, divisor: k - 1 });
        }
        if n > MAX_VERTICES {
            return Err(Error::invalid(format!("n = {n} exceeds the exact-search limit {MAX_VERTICES}")));
        }
        let edges: Vec<u64> = h.edges().iter().map(mask_of).collect();
        let mut incident = vec![Vec::new(); n];
        for (i, &e) in edges.iter().enumerate() {
            for v in vertices_of(e) {
                incident[v].push(i);
            }
        }
        Ok(Self {
            n,
            links: n / (k - 1),
            full: if n == 64 { u64::MAX } else { bit(n) - 1 },
            edge_set: edges.iter().copied().collect(),
            edges,
            incident,
        })
    }

    /// Every unused vertex must still be reachable by an edge whose used
    /// vertices are only the open links.
    fn coverable(&self, used: u64, open: u64) -> bool {
        vertices_of(self.full & !used).all(|w| {
            self.incident[w]
                .iter()
                .any(|&e| self.edges[e] & used & !open == 0)
        })
    }

    /// Number of ways to complete a path ending at link `cur` with `depth`
    /// edges placed, back to the start link `a`.
    fn completions(&self, a: usize, cur: usize, depth: usize, used: u64, memo: &mut HashMap<(u64, u8, u8), u64>) -> u64 {
        if depth == self.links - 1 {
            let last = (self.full & !used) | bit(cur) | bit(a);
            return u64::from(self.edge_set.contains(&last));
        }
        let key = (used, cur as u8, a as u8);
        if let Some(&c) = memo.get(&key) {
            return c;
        }
        let mut total = 0;
        if self.coverable(used, bit(cur) | bit(a)) {
            for &ei in &self.incident[cur] {
                let e = self.edges[ei];
                if e & used != bit(cur) || e & bit(a) != 0 {
                    continue;
                }
                for v in vertices_of(e & !bit(cur)) {
                    total += self.completions(a, v, depth + 1, used | e, memo);
                }
            }
        }
        memo.insert(key, total);
        total
    }

    /// Starting states `(e0, a, b)`: an edge containing vertex 0 and an ordered
    /// pair of its vertices as the two links.
    fn starts(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for &ei in &self.incident[0] {
            let e = self.edges[ei];
            for a in vertices_of(e) {
                for b in vertices_of(e) {
                    if a != b {
                        out.push((ei, a, b));
                    }
                }
            }
        }
        out
    }

    fn count(&self) -> u64 {
        if self.links < 2 {
            return 0;
        }
        let mut memo = HashMap::new();
        let mut weighted = 0u64;
        for (ei, a, b) in self.starts() {
            let c = self.completions(a, b, 1, self.edges[ei], &mut memo);
            weighted += if a == 0 || b == 0 { c } else { 2 * c };
        }
        debug_assert_eq!(weighted % 4, 0);
        weighted / 4
    }

    fn find(&self) -> Option<Vec<(u64, usize)>> {
        if self.links < 2 {
            return None;
        }
        let mut memo = HashMap::new();
        for (ei, a, b) in self.starts() {
            let mut path = vec![(self.edges[ei], a)];
            if self.extend(a, b, 1, self.edges[ei], &mut path, &mut memo) {
                return Some(path);
            }
        }
        None
    }

    /// Depth-first extension recording `(edge mask, its first link)` pairs.
    fn extend(
        &self,
        a: usize,
        cur: usize,
        depth: usize,
        used: u64,
        path: &mut Vec<(u64, usize)>,
        dead: &mut HashMap<(u64, u8, u8), u64>,
    ) -> bool {
        if depth == self.links - 1 {
            let last = (self.full & !used) | bit(cur) | bit(a);
            if self.edge_set.contains(&last) {
                path.push((last, cur));
                return true;
            }
            return false;
        }
        let key = (used, cur as u8, a as u8);
        if dead.contains_key(&key) || !self.coverable(used, bit(cur) | bit(a)) {
            return false;
        }
        for &ei in &self.incident[cur] {
            let e = self.edges[ei];
            if e & used != bit(cur) || e & bit(a) != 0 {
                continue;
            }
            path.push((e, cur));
            for v in vertices_of(e & !bit(cur)) {
                if self.extend(a, v, depth + 1, used | e, path, dead) {
                    return true;
                }
            }
            path.pop();
        }
        dead.insert(key, 0);
        false
    }
}

/// Finds a loose Hamilton cycle, or `None` if there is none. The search is
/// exhaustive, so `None` certifies non-existence.
pub fn find_loose_hamilton(h: &KUniformHypergraph) -> Result<Option<LooseCycle>> {
    let search = LooseSearch::new(h)?;
    let Some(path) = search.find() else {
        return Ok(None);
    };
    // path[i] = (edge i, its first link); the second link of edge i is the
    // first link of edge i+1.
    let l = path.len();
    let mut order = Vec::with_capacity(search.n);
    let mut edges = Vec::with_capacity(l);
    for i in 0..l {
        let (e, start) = path[i];
        let end = path[(i + 1) % l].1;
        order.push(start as u32 + 1);
        order.extend(vertices_of(e & !bit(start) & !bit(end)).map(|v| v as u32 + 1));
        edges.push(Edge::from_sorted(vertices_of(e).map(|v| v as u32 + 1).collect()));
    }
    Ok(Some(LooseCycle { k: h.k(), order, edges }))
}

/// Number of distinct loose Hamilton cycles (as edge sets).
pub fn count_loose_hamilton(h: &KUniformHypergraph) -> Result<u64> {
    Ok(LooseSearch::new(h)?.count())
}

/// Edges of a `Λ_d` sample split into X-pair and Y-block masks.
struct Restricted {
    m: usize,
    /// For each X-label (0-based): `(other X-label, Y-mask)`.
    adj: Vec<Vec<(usize, u64)>>,
}

impl Restricted {
    fn new(edges: &[Edge], m: usize, d: usize, kappa: usize) -> Result<Self> {
        let _ = d;
        let x_count = 2 * m;
        let y_count = 2 * kappa * m;
        if m < 1 || kappa < 1 {
            return Err(Error::invalid("m and κ must be positive"));
        }
        if y_count > 64 {
            return Err(Error::invalid(format!("|Y| = {y_count} exceeds the exact-search limit 64")));
        }
        let mut unique: Vec<&Edge> = edges.iter().collect();
        unique.sort();
        unique.dedup();
        let mut adj = vec![Vec::new(); x_count];
        for e in unique {
            if e.len() != kappa + 2 {
                return Err(Error::invalid(format!("edge {e:?} does not have κ + 2 labels")));
            }
            let (xs, ys): (Vec<u32>, Vec<u32>) = e.vertices().iter().partition(|&&v| v as usize <= x_count);
            if xs.len() != 2 || xs[0] == 0 {
                return Err(Error::invalid(format!("edge {e:?} does not have exactly two X-labels")));
            }
            if ys.iter().any(|&v| v as usize > x_count + y_count) {
                return Err(Error::invalid(format!("edge {e:?} has a label outside X ∪ Y")));
            }
            let ymask = ys.iter().fold(0u64, |acc, &v| acc | bit(v as usize - x_count - 1));
            let (u, v) = (xs[0] as usize - 1, xs[1] as usize - 1);
            adj[u].push((v, ymask));
            adj[v].push((u, ymask));
        }
        Ok(Self { m, adj })
    }

    /// Directed traversals from X-label 0 that visit every X-label once,
    /// use disjoint Y-blocks, and return to 0.
    fn traversals(&self, cur: usize, visited: u64, used_y: u64, steps: usize, memo: &mut HashMap<(usize, u64, u64), u64>, stop_at_one: bool) -> u64 {
        let x_count = 2 * self.m;
        if steps == x_count - 1 {
            return self.adj[cur]
                .iter()
                .filter(|&&(w, y)| w == 0 && y & used_y == 0)
                .count() as u64;
        }
        let key = (cur, visited, used_y);
        if let Some(&c) = memo.get(&key) {
            return c;
        }
        let mut total = 0;
        for &(w, y) in &self.adj[cur] {
            if visited & bit(w) != 0 || y & used_y != 0 {
                continue;
            }
            total += self.traversals(w, visited | bit(w), used_y | y, steps + 1, memo, stop_at_one);
            if stop_at_one && total > 0 {
                break;
            }
        }
        memo.insert(key, total);
        total
    }
}

/// Counts loose Hamilton cycles of a `Λ_d` sample whose edges meet only in
/// X: each edge `{x_i, x_{i+1}} ∪ Y_i` with `x_1..x_{2m}` a Hamilton cycle on
/// `X = {1..2m}` and the `Y_i` partitioning `Y = {2m+1..2m+2κm}`.
///
/// Repeated edges in `edges` are counted once.
pub fn count_restricted_h(edges: &[Edge], m: usize, d: usize, kappa: usize) -> Result<u64> {
    let r = Restricted::new(edges, m, d, kappa)?;
    let t = r.traversals(0, bit(0), 0, 0, &mut HashMap::new(), false);
    // each cycle is traversed once in each direction
    Ok(t / 2)
}

/// Whether a `Λ_d` sample has at least one cycle counted by
/// [`count_restricted_h`].
pub fn has_restricted_cycle(edges: &[Edge], m: usize, d: usize, kappa: usize) -> Result<bool> {
    let r = Restricted::new(edges, m, d, kappa)?;
    Ok(r.traversals(0, bit(0), 0, 0, &mut HashMap::new(), true) > 0)
}

/// Histograms of `2m`-cycles of `𝒳` by overlap with a fixed cycle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OverlapCounts {
    /// `all[b]`: cycles sharing exactly `b` pairs with the fixed cycle.
    pub all: Vec<u64>,
    /// `compatible[b]`: the subset whose pairs are disjoint from the fixed
    /// cycle's points outside the shared pairs, i.e. both cycles fit into one
    /// configuration.
    pub compatible: Vec<u64>,
}

impl OverlapCounts {
    pub fn total(&self) -> u64 {
        self.all.iter().sum()
    }
}

/// Largest `|𝒳| = 2dm` accepted by [`brute_force_n_b`].
pub const BRUTE_FORCE_POINT_CAP: usize = 16;

/// Enumerates every `2m`-cycle of `𝒳` (a set of `2m` disjoint point pairs
/// projecting to a Hamilton cycle on the `2m` X-cells) and classifies it by
/// the number `b` of pairs it shares with a fixed canonical cycle.
///
/// The canonical cycle joins copy 1 of cell `i` to copy 2 of cell `i+1`
/// (mod `2m`).
pub fn brute_force_n_b(m: usize, d: usize) -> Result<OverlapCounts> {
    if m < 1 || d < 2 {
        return Err(Error::invalid("need m ≥ 1 and d ≥ 2"));
    }
    let points = 2 * d * m;
    if points > BRUTE_FORCE_POINT_CAP {
        return Err(Error::EnumerationCap { cap: BRUTE_FORCE_POINT_CAP as u64 });
    }
    let cells = 2 * m;
    let cell = |p: usize| p / d;
    let pt = |c: usize, copy: usize| c * d + copy;
    let canonical: Vec<(usize, usize)> = (0..cells)
        .map(|i| {
            let (a, b) = (pt(i, 0), pt((i + 1) % cells, 1));
            (a.min(b), a.max(b))
        })
        .collect();
    let canon_set: HashSet<(usize, usize)> = canonical.iter().copied().collect();
    let canon_points: u64 = canonical.iter().fold(0, |acc, &(a, b)| acc | bit(a) | bit(b));

    let pairs: Vec<(usize, usize)> = (0..points)
        .flat_map(|a| (a + 1..points).map(move |b| (a, b)))
        .filter(|&(a, b)| cell(a) != cell(b))
        .collect();

    let mut counts = OverlapCounts { all: vec![0; cells + 1], compatible: vec![0; cells + 1] };
    let mut chosen: Vec<(usize, usize)> = Vec::with_capacity(cells);
    let mut degree = vec![0usize; cells];

    #[allow(clippy::too_many_arguments)]
    fn walk(
        start: usize,
        pairs: &[(usize, usize)],
        cells: usize,
        d: usize,
        used: u64,
        degree: &mut [usize],
        chosen: &mut Vec<(usize, usize)>,
        on_cycle: &mut dyn FnMut(&[(usize, usize)]),
    ) {
        if chosen.len() == cells {
            on_cycle(chosen);
            return;
        }
        for i in start..pairs.len() {
            let (a, b) = pairs[i];
            let (ca, cb) = (a / d, b / d);
            if used & (bit(a) | bit(b)) != 0 || degree[ca] == 2 || degree[cb] == 2 {
                continue;
            }
            degree[ca] += 1;
            degree[cb] += 1;
            chosen.push((a, b));
            walk(i + 1, pairs, cells, d, used | bit(a) | bit(b), degree, chosen, on_cycle);
            chosen.pop();
            degree[ca] -= 1;
            degree[cb] -= 1;
        }
    }

    let mut on_cycle = |c: &[(usize, usize)]| {
        // all degrees are 2; the cell multigraph is a Hamilton cycle iff connected
        let mut reach = bit(0);
        loop {
            let before = reach;
            for &(a, b) in c {
                let (ca, cb) = (a / d, b / d);
                if reach & (bit(ca) | bit(cb)) != 0 {
                    reach |= bit(ca) | bit(cb);
                }
            }
            if reach == before {
                break;
            }
        }
        if reach != bit(cells) - 1 {
            return;
        }
        let shared = c.iter().filter(|p| canon_set.contains(p)).count();
        counts.all[shared] += 1;
        let fresh_points = c
            .iter()
            .filter(|p| !canon_set.contains(p))
            .fold(0u64, |acc, &(a, b)| acc | bit(a) | bit(b));
        if fresh_points & canon_points == 0 {
            counts.compatible[shared] += 1;
        }
    };
    walk(0, &pairs, cells, d, 0, &mut degree, &mut chosen, &mut on_cycle);
    Ok(counts)
}
