//! Probability splitting `p → p₁ → p₂ → p₃` and the copy hierarchy used to
//! embed unspoiled matchings into `H(n,p;k)`.
//!
//! `H(n,p;k)` is the union of `α` copies of `H(n,p₁;k)`; each of those is the
//! union of `d` copies of `H(n,p₂;k)`; each of those is the union of `β`
//! copies of `H(n,p₃;k)`. The `dαβ` copies at `p₃` are grouped as
//! `𝒜_i ⊃ ℬ_{i,j}`, with `Λ_{i,j}` the union over `ℬ_{i,j}` and `Σ_i` the
//! union over `𝒜_i`.

use std::collections::{BTreeMap, BTreeSet};

use crate::configuration::PartitionScheme;
use crate::error::{Error, Result};
use crate::hypergraph::{
    binomial, generate_gamma_on, generate_hnpk, Edge, KUniformHypergraph, BipartitePatternGraph,
    PatternEdge,
};
use crate::matching::{self, MatchingFailure};
use crate::rng::{rng_from_seed, sub_seed, trial_seed};

/// Returns `q` with `1 − (1 − q)^exponent = p`.
///
/// Evaluated as `−expm1(log1p(−p) / exponent)`, which keeps full relative
/// precision for tiny `p`.
pub fn split_probability(p: f64, exponent: u64) -> f64 {
    assert!((0.0..=1.0).contains(&p), "probability {p} outside [0, 1]");
    assert!(exponent >= 1, "exponent must be positive");
    if exponent == 1 || p == 0.0 || p == 1.0 {
        return p;
    }
    -((-p).ln_1p() / exponent as f64).exp_m1()
}

/// Inverse of [`split_probability`]: `1 − (1 − q)^exponent`.
pub fn recompose_probability(q: f64, exponent: u64) -> f64 {
    if q == 1.0 {
        return 1.0;
    }
    -(exponent as f64 * (-q).ln_1p()).exp_m1()
}

/// `⌈e^{2κd}⌉`, or `None` when it does not fit in a `u64`.
pub fn default_alpha(d: usize, kappa: usize) -> Option<u64> {
    let a = ((2 * kappa * d) as f64).exp().ceil();
    (a < u64::MAX as f64).then_some(a as u64)
}

/// `β = d²(d/2)^κ`, or `None` on overflow.
pub fn beta(d: usize, kappa: usize) -> Option<u64> {
    let d = d as u64;
    let half = d / 2;
    let mut b = d.checked_mul(d)?;
    for _ in 0..kappa {
        b = b.checked_mul(half)?;
    }
    Some(b)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CouplingParams {
    pub k: usize,
    pub kappa: usize,
    pub d: usize,
    pub p: f64,
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
    pub alpha: u64,
    pub beta: u64,
}

impl CouplingParams {
    /// Splitting with `α = ⌈e^{2κd}⌉`.
    pub fn new(p: f64, k: usize, d: usize) -> Result<Self> {
        if k < 3 {
            return Err(Error::invalid("k must be at least 3"));
        }
        let alpha = default_alpha(d, k - 2)
            .ok_or_else(|| Error::invalid(format!("α = e^(2κd) overflows u64 for d = {d}, κ = {}", k - 2)))?;
        Self::with_alpha(p, k, d, alpha)
    }

    /// Splitting with an explicit `α`, for demonstrations where `e^{2κd}`
    /// copies are impractical.
    pub fn with_alpha(p: f64, k: usize, d: usize, alpha: u64) -> Result<Self> {
        if k < 3 {
            return Err(Error::invalid("k must be at least 3"));
        }
        if d < 2 || d % 2 != 0 {
            return Err(Error::invalid(format!("d = {d} must be even and at least 2")));
        }
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::invalid(format!("probability {p} outside [0, 1]")));
        }
        if alpha < 1 {
            return Err(Error::invalid("α must be at least 1"));
        }
        let kappa = k - 2;
        let beta = beta(d, kappa).ok_or_else(|| Error::invalid("β overflows u64"))?;
        let p1 = split_probability(p, alpha);
        let p2 = split_probability(p1, d as u64);
        let p3 = split_probability(p2, beta);
        Ok(Self { k, kappa, d, p, p1, p2, p3, alpha, beta })
    }

    /// Total number of `H(n,p₃;k)` copies, `dαβ`, if it fits.
    pub fn copy_count(&self) -> Option<u64> {
        (self.d as u64).checked_mul(self.alpha)?.checked_mul(self.beta)
    }

    /// Edge marginal of the union of all `dαβ` copies at `p₃`, computed
    /// analytically in one step.
    pub fn union_marginal(&self) -> f64 {
        let n = self.d as f64 * self.alpha as f64 * self.beta as f64;
        if self.p3 == 1.0 {
            return 1.0;
        }
        -(n * (-self.p3).ln_1p()).exp_m1()
    }
}

/// Per-edge presence frequencies of a union of `α` independent `H(n,p₁;k)`.
#[derive(Clone, Debug)]
pub struct UnionCheck {
    pub p: f64,
    pub p1: f64,
    pub trials: usize,
    /// Frequency of each candidate edge, in lexicographic order.
    pub per_edge_frequency: Vec<f64>,
    /// Standard error of a Bernoulli(`p`) frequency over `trials`.
    pub standard_error: f64,
}

impl UnionCheck {
    pub fn mean_frequency(&self) -> f64 {
        self.per_edge_frequency.iter().sum::<f64>() / self.per_edge_frequency.len() as f64
    }

    /// Largest `|frequency − p|` over all candidate edges.
    pub fn max_deviation(&self) -> f64 {
        self.per_edge_frequency
            .iter()
            .map(|f| (f - self.p).abs())
            .fold(0.0, f64::max)
    }
}

/// Samples the union of `alpha` independent copies of `H(n,p₁;k)` with
/// `p₁ = split_probability(p, alpha)` in each of `trials` trials.
pub fn union_distribution_check(
    n: usize,
    k: usize,
    p: f64,
    alpha: u64,
    trials: usize,
    seed: u64,
) -> Result<UnionCheck> {
    if trials < 1 || alpha < 1 {
        return Err(Error::invalid("trials and α must be positive"));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid(format!("probability {p} outside [0, 1]")));
    }
    let candidates = binomial(n as u64, k as u64);
    if candidates > 1 << 20 {
        return Err(Error::invalid(format!("C({n},{k}) candidates is beyond desk scale")));
    }
    let index: BTreeMap<Edge, usize> = KUniformHypergraph::complete(n, k)?
        .edges()
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, e)| (e, i))
        .collect();
    let p1 = split_probability(p, alpha);
    let mut counts = vec![0u64; index.len()];
    let mut present = vec![false; index.len()];
    for t in 0..trials {
        present.iter_mut().for_each(|x| *x = false);
        let ts = trial_seed(seed, 0, t as u64);
        for copy in 0..alpha {
            for e in generate_hnpk(n, k, p1, sub_seed(ts, copy))?.edges() {
                present[index[e]] = true;
            }
        }
        for (c, &x) in counts.iter_mut().zip(&present) {
            *c += u64::from(x);
        }
    }
    Ok(UnionCheck {
        p,
        p1,
        trials,
        per_edge_frequency: counts.iter().map(|&c| c as f64 / trials as f64).collect(),
        standard_error: (p * (1.0 - p) / trials as f64).sqrt(),
    })
}

/// Removes every spoiled edge: two S-points in the same X-cell or two
/// T-points in the same Y-cell. `g` must live on points of `scheme`
/// (S ⊆ 𝒳, T ⊆ 𝒴).
pub fn build_gamma_hat(g: &BipartitePatternGraph, scheme: &PartitionScheme) -> Result<BipartitePatternGraph> {
    if g.kappa() != scheme.kappa() {
        return Err(Error::invalid("pattern graph and scheme disagree on κ"));
    }
    if !g.s().iter().all(|&p| scheme.is_x_point(p)) || !g.t().iter().all(|&p| scheme.is_y_point(p)) {
        return Err(Error::invalid("pattern graph vertices are not points of the scheme"));
    }
    Ok(g.filter_edges(|e| !is_spoiled(e, scheme)))
}

/// Whether a point-level edge contains two points with equal `ψ`-image.
pub fn is_spoiled(e: &PatternEdge, scheme: &PartitionScheme) -> bool {
    if scheme.psi1(e.s[0]) == scheme.psi1(e.s[1]) {
        return true;
    }
    let mut cells: Vec<Option<u32>> = e.t.iter().map(|&p| scheme.psi2(p)).collect();
    cells.sort_unstable();
    cells.windows(2).any(|w| w[0] == w[1])
}

/// Position of a copy inside the hierarchy: `𝒜_i`, `ℬ_{i,j}`, and the tuple
/// `(j₁, …, j_k)` with `j₁, j₂ ∈ 1..=d` and `j₃..j_k ∈ 1..=d/2`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CopyIndex {
    pub i: u64,
    pub j: usize,
    pub tuple: Vec<usize>,
}

/// The `dαβ` copies of `H(n,p₃;k)`.
///
/// Copies are not stored: copy `c` is regenerated on demand from
/// `sub_seed(seed, c)`, so the hierarchy stays small even for `α` in the
/// thousands. Edges placed by [`embed_edges_into_copies`] are kept as an
/// overlay and added to the copy they were placed in.
#[derive(Clone, Debug)]
pub struct CopyHierarchy {
    n: usize,
    k: usize,
    d: usize,
    alpha: u64,
    beta: u64,
    p3: f64,
    seed: u64,
    embedded: BTreeMap<u64, BTreeSet<Edge>>,
}

impl CopyHierarchy {
    pub fn new(n: usize, params: &CouplingParams, seed: u64) -> Result<Self> {
        if n < params.k {
            return Err(Error::invalid("n must be at least k"));
        }
        params
            .copy_count()
            .ok_or_else(|| Error::invalid("dαβ overflows u64"))?;
        Ok(Self {
            n,
            k: params.k,
            d: params.d,
            alpha: params.alpha,
            beta: params.beta,
            p3: params.p3,
            seed,
            embedded: BTreeMap::new(),
        })
    }

    pub fn alpha(&self) -> u64 {
        self.alpha
    }

    pub fn beta(&self) -> u64 {
        self.beta
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn copy_count(&self) -> u64 {
        self.d as u64 * self.alpha * self.beta
    }

    fn kappa(&self) -> usize {
        self.k - 2
    }

    /// Rank of a copy tuple inside `ℬ_{i,j}` (0-based), mixed radix with
    /// `j₁` most significant.
    fn tuple_rank(&self, tuple: &[usize]) -> Option<u64> {
        if tuple.len() != self.k {
            return None;
        }
        let mut r: u64 = 0;
        for (pos, &t) in tuple.iter().enumerate() {
            let radix = if pos < 2 { self.d } else { self.d / 2 };
            if t < 1 || t > radix {
                return None;
            }
            r = r * radix as u64 + (t - 1) as u64;
        }
        Some(r)
    }

    /// Flat 0-based copy number of `idx`.
    pub fn flat_index(&self, idx: &CopyIndex) -> Option<u64> {
        if idx.i < 1 || idx.i > self.alpha || idx.j < 1 || idx.j > self.d {
            return None;
        }
        let t = self.tuple_rank(&idx.tuple)?;
        Some(((idx.i - 1) * self.d as u64 + (idx.j - 1) as u64) * self.beta + t)
    }

    /// Inverse of [`flat_index`](Self::flat_index).
    pub fn copy_index(&self, flat: u64) -> Option<CopyIndex> {
        if flat >= self.copy_count() {
            return None;
        }
        let mut t = flat % self.beta;
        let group = flat / self.beta;
        let j = (group % self.d as u64) as usize + 1;
        let i = group / self.d as u64 + 1;
        let mut tuple = vec![0; self.k];
        for pos in (0..self.k).rev() {
            let radix = if pos < 2 { self.d } else { self.d / 2 } as u64;
            tuple[pos] = (t % radix) as usize + 1;
            t /= radix;
        }
        Some(CopyIndex { i, j, tuple })
    }

    /// Materialises one copy: an independent `H(n,p₃;k)` plus any edges
    /// embedded into it.
    pub fn copy(&self, flat: u64) -> Result<KUniformHypergraph> {
        if flat >= self.copy_count() {
            return Err(Error::invalid(format!("copy {flat} out of range")));
        }
        let mut h = generate_hnpk(self.n, self.k, self.p3, sub_seed(self.seed, flat))?;
        if let Some(extra) = self.embedded.get(&flat) {
            for e in extra {
                h.insert(e.clone())?;
            }
        }
        Ok(h)
    }

    /// `Λ_{i,j}`: union of the `β` copies in `ℬ_{i,j}`.
    pub fn lambda(&self, i: u64, j: usize) -> Result<KUniformHypergraph> {
        let first = self
            .flat_index(&CopyIndex { i, j, tuple: vec![1; self.k] })
            .ok_or_else(|| Error::invalid(format!("group ({i}, {j}) out of range")))?;
        let mut u = KUniformHypergraph::empty(self.n, self.k)?;
        for c in first..first + self.beta {
            u.union_with(&self.copy(c)?);
        }
        Ok(u)
    }

    /// `Σ_i`: union of `Λ_{i,j}` over `j = 1..=d`.
    pub fn sigma(&self, i: u64) -> Result<KUniformHypergraph> {
        let mut u = KUniformHypergraph::empty(self.n, self.k)?;
        for j in 1..=self.d {
            u.union_with(&self.lambda(i, j)?);
        }
        Ok(u)
    }

    /// Edges embedded so far, keyed by flat copy index.
    pub fn embedded(&self) -> &BTreeMap<u64, BTreeSet<Edge>> {
        &self.embedded
    }
}

/// Places every edge of `Γ̂` into the copy of `ℬ_{i,j}` selected by the copy
/// numbers of its points.
///
/// For an edge `{ν₁, ν₂, ξ₁..ξ_κ}` with projections `x₁ < x₂` and
/// `y₁ < … < y_κ`, `j₁`/`j₂` are the copy numbers of the points over `x₁`/`x₂`
/// and `j₃..j_k` those of the points over `y₁..y_κ`. The projected edge is
/// added to copy `H_{j₁..j_k}`.
pub fn embed_edges_into_copies<'a, I>(
    edges: I,
    scheme: &PartitionScheme,
    hierarchy: &CopyHierarchy,
    i: u64,
    j: usize,
) -> Result<CopyHierarchy>
where
    I: IntoIterator<Item = &'a PatternEdge>,
{
    if scheme.d() != hierarchy.d || scheme.kappa() != hierarchy.kappa() {
        return Err(Error::invalid("scheme and hierarchy disagree on d or κ"));
    }
    if scheme.vertex_count() != hierarchy.n {
        return Err(Error::invalid("scheme and hierarchy disagree on n"));
    }
    let mut out = hierarchy.clone();
    for e in edges {
        let mut xs = Vec::with_capacity(2);
        for &p in &e.s {
            let cell = scheme.psi1(p).ok_or_else(|| Error::invalid(format!("{p} is not an 𝒳 point")))?;
            xs.push((cell, scheme.copy_number(p).expect("valid point")));
        }
        let mut ys = Vec::with_capacity(e.t.len());
        for &p in &e.t {
            let cell = scheme.psi2(p).ok_or_else(|| Error::invalid(format!("{p} is not a 𝒴 point")))?;
            ys.push((cell, scheme.copy_number(p).expect("valid point")));
        }
        xs.sort_unstable();
        ys.sort_unstable();
        let labels: Vec<u32> = xs.iter().chain(&ys).map(|&(c, _)| c).collect();
        let edge = Edge::new(labels).ok_or_else(|| Error::invalid(format!("edge {e:?} is spoiled")))?;
        let tuple: Vec<usize> = xs.iter().chain(&ys).map(|&(_, c)| c).collect();
        let idx = CopyIndex { i, j, tuple };
        let flat = out
            .flat_index(&idx)
            .ok_or_else(|| Error::invalid(format!("copy index {idx:?} outside the enumeration")))?;
        out.embedded.entry(flat).or_default().insert(edge);
    }
    Ok(out)
}

/// Lower bounds on the probability that some `Σ_i` contains `Λ_d`.
#[derive(Clone, Debug, PartialEq)]
pub struct SuccessBound {
    /// `1 − (1 − e^{−κd})^α`.
    pub bound: f64,
    /// `1 − e^{−e^{κd}}`.
    pub simplified: f64,
    /// `ln` of the failure probability `(1 − e^{−κd})^α`.
    pub log_failure: f64,
    /// `ln` of `e^{−e^{κd}}`, i.e. `−e^{κd}`.
    pub log_failure_simplified: f64,
}

impl SuccessBound {
    /// Whether the exact bound dominates the simplified one. Compared on the
    /// failure side in log space, since both round to 1 in `f64` quickly.
    pub fn dominates_simplified(&self) -> bool {
        self.log_failure <= self.log_failure_simplified
    }
}

pub fn success_probability_bound(d: usize, kappa: usize, alpha: u64) -> Result<SuccessBound> {
    if d < 2 || d % 2 != 0 || kappa < 1 {
        return Err(Error::invalid("need even d ≥ 2 and κ ≥ 1"));
    }
    let kd = (kappa * d) as f64;
    let q = (-kd).exp();
    let log_failure = alpha as f64 * (-q).ln_1p();
    let log_failure_simplified = -kd.exp();
    Ok(SuccessBound {
        bound: -log_failure.exp_m1(),
        simplified: -log_failure_simplified.exp_m1(),
        log_failure,
        log_failure_simplified,
    })
}

/// Outcome of one run of the full coupling at demonstration scale.
#[derive(Clone, Debug)]
pub struct CouplingRun {
    pub params: CouplingParams,
    pub scheme: PartitionScheme,
    /// The index `i` of the first collection `𝒜_i` whose matchings were all
    /// unspoiled.
    pub accepted_i: u64,
    /// Attempts where some `Γ(X_j,Y_j,p₂)` had no perfect matching.
    pub attempts_without_matching: u64,
    /// Attempts where all matchings existed but one was spoiled.
    pub attempts_spoiled: u64,
    /// `Λ_d = ψ(M₁ ∪ … ∪ M_d)` with multiplicity.
    pub lambda_edges: Vec<Edge>,
    pub hierarchy: CopyHierarchy,
}

/// Runs the coupling for `i = 1, 2, …, α`: draw uniform partitions of `𝒳`
/// and `𝒴`, draw `Γ(X_j,Y_j,p₂)` and a perfect matching `M_j` of each, and
/// accept the first `i` where every `M_j` is unspoiled. The edges of `Γ̂_j`
/// are then embedded into `ℬ_{i,j}`.
///
/// Matchings are drawn uniformly when the instance is small enough to
/// enumerate, otherwise the first matching found by the search is used.
pub fn run_coupling(m: usize, params: &CouplingParams, seed: u64) -> Result<Option<CouplingRun>> {
    let scheme = PartitionScheme::new(m, params.d, params.kappa)?;
    let mut hierarchy = CopyHierarchy::new(scheme.vertex_count(), params, sub_seed(seed, 0))?;
    let mut rng = rng_from_seed(sub_seed(seed, 1));
    let (mut no_matching, mut spoiled) = (0, 0);
    for i in 1..=params.alpha {
        let (x_classes, y_classes) = scheme.random_classes(&mut rng);
        let mut gammas = Vec::with_capacity(params.d);
        let mut matchings = Vec::with_capacity(params.d);
        for (j, (xj, yj)) in x_classes.into_iter().zip(y_classes).enumerate() {
            let gseed = trial_seed(seed, i, j as u64);
            let g = generate_gamma_on(xj, yj, params.k, params.p2, gseed)?;
            let mj = match matching::sample_uniform_matching(&g, sub_seed(gseed, 1)) {
                Ok(mj) => Some(mj),
                Err(Error::EnumerationCap { .. }) => {
                    match matching::find_perfect_matching(&g, matching::DEFAULT_BUDGET) {
                        Ok(mj) => Some(mj),
                        Err(MatchingFailure::Exhausted { .. } | MatchingFailure::BudgetExceeded { .. }) => None,
                    }
                }
                Err(_) => None,
            };
            match mj {
                Some(mj) => matchings.push(mj),
                None => break,
            }
            gammas.push(g);
        }
        if matchings.len() < params.d {
            no_matching += 1;
            continue;
        }
        if matchings.iter().flat_map(|mj| mj.blocks()).any(|e| is_spoiled(e, &scheme)) {
            spoiled += 1;
            continue;
        }
        for (j, g) in gammas.iter().enumerate() {
            let hat = build_gamma_hat(g, &scheme)?;
            hierarchy = embed_edges_into_copies(hat.edges(), &scheme, &hierarchy, i, j + 1)?;
        }
        let lambda_edges = matchings
            .iter()
            .flat_map(|mj| mj.blocks())
            .map(|e| {
                let labels = e.vertices().map(|p| scheme.psi(p).expect("scheme point")).collect();
                Edge::new(labels).expect("unspoiled edge projects to a k-set")
            })
            .collect();
        return Ok(Some(CouplingRun {
            params: params.clone(),
            scheme,
            accepted_i: i,
            attempts_without_matching: no_matching,
            attempts_spoiled: spoiled,
            lambda_edges,
            hierarchy,
        }));
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::generate_gamma_on;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn split_identity_and_closed_form() {
        assert_eq!(split_probability(0.37, 1), 0.37);
        assert!((split_probability(0.5, 2) - (1.0 - 0.5f64.sqrt())).abs() < 1e-15);
        let q = split_probability(1e-6, 1000);
        assert!(rel(q, 1.000_000_499_500_332_8e-9) < 1e-12, "{q:e}");
        assert!(rel(recompose_probability(q, 1000), 1e-6) < 1e-12);
        assert_eq!(split_probability(0.0, 7), 0.0);
        assert_eq!(split_probability(1.0, 7), 1.0);
    }

    #[test]
    fn params_chain_and_marginal() {
        let c = CouplingParams::new(0.05, 3, 4).unwrap();
        assert_eq!(c.alpha, 2981);
        assert_eq!(c.beta, 32);
        assert!(c.p >= c.p1 && c.p1 >= c.p2 && c.p2 >= c.p3);
        assert!(c.p3 >= c.p / (c.copy_count().unwrap() as f64));
        assert!(rel(c.union_marginal(), c.p) < 1e-12);
        assert!(rel(recompose_probability(c.p1, c.alpha), c.p) < 1e-12);
        assert!(rel(recompose_probability(c.p2, c.d as u64), c.p1) < 1e-12);
        assert!(rel(recompose_probability(c.p3, c.beta), c.p2) < 1e-12);
    }

    #[test]
    fn beta_values() {
        assert_eq!(beta(4, 1), Some(32));
        assert_eq!(beta(6, 2), Some(324));
        assert_eq!(beta(2, 3), Some(4));
    }

    #[test]
    fn union_extremes() {
        let u = union_distribution_check(6, 3, 0.0, 3, 50, 1).unwrap();
        assert!(u.per_edge_frequency.iter().all(|&f| f == 0.0));
        let u = union_distribution_check(6, 3, 0.3, 1, 4000, 1).unwrap();
        assert_eq!(u.p1, 0.3);
        assert!(u.max_deviation() < 4.5 * u.standard_error);
    }

    #[test]
    fn gamma_hat_partitions_edges_and_is_idempotent() {
        let scheme = PartitionScheme::new(2, 4, 2).unwrap();
        let mut rng = crate::rng::rng_from_seed(5);
        let (xc, yc) = scheme.random_classes(&mut rng);
        let g = generate_gamma_on(xc[0].clone(), yc[0].clone(), 4, 0.6, 8).unwrap();
        let hat = build_gamma_hat(&g, &scheme).unwrap();
        let spoiled = g.edges().iter().filter(|e| is_spoiled(e, &scheme)).count();
        assert_eq!(hat.edge_count() + spoiled, g.edge_count());
        assert_eq!(build_gamma_hat(&hat, &scheme).unwrap(), hat);
        assert!(hat.edges().iter().all(|e| !is_spoiled(e, &scheme)));
    }

    #[test]
    fn gamma_hat_removes_same_cell_pair() {
        let scheme = PartitionScheme::new(1, 2, 1).unwrap();
        // points 1,2 share X-cell 1; 3,4 are X-cell 2; Y points 5..8.
        let edges = [PatternEdge::new(1, 2, vec![5]), PatternEdge::new(1, 3, vec![5])];
        let g = BipartitePatternGraph::from_edges(vec![1, 2], vec![5], 1, edges.iter().take(1).cloned())
            .unwrap();
        assert_eq!(build_gamma_hat(&g, &scheme).unwrap().edge_count(), 0);
        let g = BipartitePatternGraph::from_edges(vec![1, 3], vec![5], 1, edges.iter().skip(1).cloned())
            .unwrap();
        assert_eq!(build_gamma_hat(&g, &scheme).unwrap(), g);
    }

    #[test]
    fn copy_index_round_trip() {
        let c = CouplingParams::with_alpha(0.5, 4, 4, 3).unwrap();
        let h = CopyHierarchy::new(6, &c, 0).unwrap();
        assert_eq!(h.copy_count(), 4 * 3 * 64);
        for flat in 0..h.copy_count() {
            let idx = h.copy_index(flat).unwrap();
            assert_eq!(h.flat_index(&idx), Some(flat));
        }
        assert!(h.flat_index(&CopyIndex { i: 1, j: 1, tuple: vec![1, 1, 3, 1] }).is_none());
        assert!(h.flat_index(&CopyIndex { i: 4, j: 1, tuple: vec![1, 1, 1, 1] }).is_none());
    }

    #[test]
    fn embedding_places_edges() {
        let scheme = PartitionScheme::new(1, 2, 1).unwrap();
        let c = CouplingParams::with_alpha(0.0, 3, 2, 2).unwrap();
        let h = CopyHierarchy::new(scheme.vertex_count(), &c, 0).unwrap();

        let none: Vec<PatternEdge> = Vec::new();
        let same = embed_edges_into_copies(&none, &scheme, &h, 1, 1).unwrap();
        assert!(same.embedded().is_empty());

        // points 1 (cell 1, copy 1), 3 (cell 2, copy 1), 5 (Y-cell 3, copy 1)
        let e = PatternEdge::new(1, 3, vec![5]);
        let h2 = embed_edges_into_copies([&e], &scheme, &h, 2, 1).unwrap();
        let flat = h2.flat_index(&CopyIndex { i: 2, j: 1, tuple: vec![1, 1, 1] }).unwrap();
        assert_eq!(h2.embedded().len(), 1);
        assert!(h2.embedded()[&flat].contains(&Edge::from(&[1, 2, 3][..])));
        assert!(h2.lambda(2, 1).unwrap().contains(&Edge::from(&[1, 2, 3][..])));
        assert!(!h2.lambda(1, 1).unwrap().contains(&Edge::from(&[1, 2, 3][..])));

        // copy numbers are ordered by projected vertex, not by point label
        let e = PatternEdge::new(2, 3, vec![6]);
        let h3 = embed_edges_into_copies([&e], &scheme, &h, 1, 2).unwrap();
        let flat = h3.flat_index(&CopyIndex { i: 1, j: 2, tuple: vec![2, 1, 1] }).unwrap();
        assert!(h3.embedded().contains_key(&flat));

        let spoiled = PatternEdge::new(1, 2, vec![5]);
        assert!(embed_edges_into_copies([&spoiled], &scheme, &h, 1, 1).is_err());
        // hierarchy d must match the scheme
        let other = CopyHierarchy::new(4, &CouplingParams::with_alpha(0.0, 3, 4, 1).unwrap(), 0).unwrap();
        assert!(embed_edges_into_copies([&e], &scheme, &other, 1, 1).is_err());
    }

    #[test]
    fn success_bound_values() {
        let b = success_probability_bound(4, 1, 1).unwrap();
        assert!(rel(b.bound, (-4f64).exp()) < 1e-12);
        let b = success_probability_bound(4, 1, 2981).unwrap();
        let direct = 2981.0 * (1.0 - (-4f64).exp()).ln();
        assert!(rel(b.log_failure, direct) < 1e-12);
        assert!(b.dominates_simplified());
        let mut last = 0.0;
        for a in [1, 2, 5, 10, 100, 1000] {
            let b = success_probability_bound(6, 1, a).unwrap();
            assert!(b.bound >= last);
            last = b.bound;
        }
    }

    #[test]
    fn coupling_demo_at_full_probability() {
        let params = CouplingParams::with_alpha(1.0, 3, 4, 400).unwrap();
        let run = run_coupling(2, &params, 3).unwrap().expect("accepts within α attempts");
        assert_eq!(run.lambda_edges.len(), 4 * 2);
        let sigma = run.hierarchy.sigma(run.accepted_i).unwrap();
        for e in &run.lambda_edges {
            assert!(sigma.contains(e));
        }
        assert_eq!(run.attempts_without_matching, 0);
        assert_eq!(run.attempts_spoiled, run.accepted_i - 1);
    }
}
