//! Configuration model for `Λ_d`.
//!
//! `𝒳` holds `2dm` points split into `2m` cells of `d` points, `𝒴` holds
//! `dκm` points split into `2κm` cells of `d/2` points. A configuration pairs
//! up `𝒳` into `dm` pairs and partitions `𝒴` into `dm` blocks of size `κ`;
//! block `ℓ` is attached to pair `ℓ`. Projecting each point to its cell turns
//! pair + block `ℓ` into a k-edge of `Λ_d`, `k = κ + 2`.
//!
//! Point labels: `𝒳` points are `1..=2dm`, `𝒴` points are
//! `2dm+1 ..= 2dm+dκm`. Cell labels (the vertices of `Λ_d`): X-cells are
//! `1..=2m`, Y-cells are `2m+1 ..= 2m+2κm`. Point `i` of `𝒳` (1-based) is
//! copy `((i-1) mod d) + 1` of cell `((i-1) div d) + 1`; `𝒴` is laid out the
//! same way with `d/2` points per cell.

use rand::seq::SliceRandom;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hypergraph::{Edge, KUniformHypergraph};
use crate::rng::{rng_from_seed, trial_seed, Rng};
use crate::stats;

/// Cell structure of `𝒳` and `𝒴` together with the projections `ψ₁`, `ψ₂`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PartitionScheme {
    m: usize,
    d: usize,
    kappa: usize,
}

impl PartitionScheme {
    pub fn new(m: usize, d: usize, kappa: usize) -> Result<Self> {
        if m < 1 {
            return Err(Error::invalid("m must be at least 1"));
        }
        if d < 2 || d % 2 != 0 {
            return Err(Error::invalid(format!("d = {d} must be even and at least 2")));
        }
        if kappa < 1 {
            return Err(Error::invalid("κ must be at least 1"));
        }
        Ok(Self { m, d, kappa })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn kappa(&self) -> usize {
        self.kappa
    }

    pub fn k(&self) -> usize {
        self.kappa + 2
    }

    /// `|𝒳| = 2dm`.
    pub fn x_point_count(&self) -> usize {
        2 * self.d * self.m
    }

    /// `|𝒴| = dκm`.
    pub fn y_point_count(&self) -> usize {
        self.d * self.kappa * self.m
    }

    /// `|X| = 2m`.
    pub fn x_cell_count(&self) -> usize {
        2 * self.m
    }

    /// `|Y| = 2κm`.
    pub fn y_cell_count(&self) -> usize {
        2 * self.kappa * self.m
    }

    /// Vertex count of `Λ_d`, `2m + 2κm = 2(k−1)m`.
    pub fn vertex_count(&self) -> usize {
        self.x_cell_count() + self.y_cell_count()
    }

    /// Number of pairs (and blocks) in a configuration, `dm`.
    pub fn block_count(&self) -> usize {
        self.d * self.m
    }

    pub fn y_cell_size(&self) -> usize {
        self.d / 2
    }

    pub fn x_points(&self) -> impl Iterator<Item = u32> {
        1..=self.x_point_count() as u32
    }

    pub fn y_points(&self) -> impl Iterator<Item = u32> {
        let lo = self.x_point_count() as u32 + 1;
        lo..lo + self.y_point_count() as u32
    }

    pub fn is_x_point(&self, p: u32) -> bool {
        p >= 1 && (p as usize) <= self.x_point_count()
    }

    pub fn is_y_point(&self, p: u32) -> bool {
        let lo = self.x_point_count();
        (p as usize) > lo && (p as usize) <= lo + self.y_point_count()
    }

    /// `ψ₁`: X-cell label of an `𝒳` point.
    pub fn psi1(&self, p: u32) -> Option<u32> {
        self.is_x_point(p).then(|| ((p as usize - 1) / self.d + 1) as u32)
    }

    /// `ψ₂`: Y-cell label of a `𝒴` point.
    pub fn psi2(&self, p: u32) -> Option<u32> {
        self.is_y_point(p).then(|| {
            let idx = p as usize - self.x_point_count() - 1;
            (self.x_cell_count() + idx / self.y_cell_size() + 1) as u32
        })
    }

    /// `ψ` on a single point of either space.
    pub fn psi(&self, p: u32) -> Option<u32> {
        self.psi1(p).or_else(|| self.psi2(p))
    }

    /// 1-based copy number of a point inside its cell: `1..=d` for `𝒳`,
    /// `1..=d/2` for `𝒴`.
    pub fn copy_number(&self, p: u32) -> Option<usize> {
        if self.is_x_point(p) {
            Some((p as usize - 1) % self.d + 1)
        } else if self.is_y_point(p) {
            Some((p as usize - self.x_point_count() - 1) % self.y_cell_size() + 1)
        } else {
            None
        }
    }

    /// Point label of copy `copy` (1-based) of cell `cell`.
    pub fn point_of(&self, cell: u32, copy: usize) -> Option<u32> {
        let cell = cell as usize;
        if (1..=self.x_cell_count()).contains(&cell) && (1..=self.d).contains(&copy) {
            Some(((cell - 1) * self.d + copy) as u32)
        } else if cell > self.x_cell_count()
            && cell <= self.vertex_count()
            && (1..=self.y_cell_size()).contains(&copy)
        {
            let ycell = cell - self.x_cell_count() - 1;
            Some((self.x_point_count() + ycell * self.y_cell_size() + copy) as u32)
        } else {
            None
        }
    }

    /// Uniform random partitions `X_1..X_d` of `𝒳` (classes of `2m`) and
    /// `Y_1..Y_d` of `𝒴` (classes of `κm`), each class sorted.
    pub fn random_classes(&self, rng: &mut Rng) -> (Vec<Vec<u32>>, Vec<Vec<u32>>) {
        let mut xs: Vec<u32> = self.x_points().collect();
        let mut ys: Vec<u32> = self.y_points().collect();
        xs.shuffle(rng);
        ys.shuffle(rng);
        let split = |v: Vec<u32>, size: usize| {
            v.chunks(size)
                .map(|c| {
                    let mut c = c.to_vec();
                    c.sort_unstable();
                    c
                })
                .collect::<Vec<_>>()
        };
        (split(xs, 2 * self.m), split(ys, self.kappa * self.m))
    }
}

/// A pairing of `𝒳` and a κ-partition of `𝒴`, with the spoiled-edge counts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Configuration {
    scheme: PartitionScheme,
    x_pairs: Vec<[u32; 2]>,
    y_blocks: Vec<Vec<u32>>,
    s1: usize,
    s2: usize,
}

impl Configuration {
    /// Builds a configuration from explicit pairs and blocks. Pair `ℓ` and
    /// block `ℓ` form the `ℓ`-th edge.
    pub fn from_parts(
        scheme: PartitionScheme,
        x_pairs: Vec<[u32; 2]>,
        y_blocks: Vec<Vec<u32>>,
    ) -> Result<Self> {
        let dm = scheme.block_count();
        if x_pairs.len() != dm || y_blocks.len() != dm {
            return Err(Error::invalid(format!(
                "expected {dm} pairs and blocks, got {} and {}",
                x_pairs.len(),
                y_blocks.len()
            )));
        }
        let mut seen = vec![false; scheme.x_point_count() + scheme.y_point_count() + 1];
        for p in x_pairs.iter().flatten() {
            if !scheme.is_x_point(*p) || std::mem::replace(&mut seen[*p as usize], true) {
                return Err(Error::invalid(format!("x-pairs are not a perfect pairing (point {p})")));
            }
        }
        for b in &y_blocks {
            if b.len() != scheme.kappa() {
                return Err(Error::invalid(format!("block {b:?} does not have κ points")));
            }
            for p in b {
                if !scheme.is_y_point(*p) || std::mem::replace(&mut seen[*p as usize], true) {
                    return Err(Error::invalid(format!("y-blocks are not a partition (point {p})")));
                }
            }
        }
        let (s1, s2) = spoil_counts(&scheme, &x_pairs, &y_blocks);
        Ok(Self { scheme, x_pairs, y_blocks, s1, s2 })
    }

    pub fn scheme(&self) -> &PartitionScheme {
        &self.scheme
    }

    pub fn x_pairs(&self) -> &[[u32; 2]] {
        &self.x_pairs
    }

    pub fn y_blocks(&self) -> &[Vec<u32>] {
        &self.y_blocks
    }

    /// Pairs whose two points lie in the same X-cell.
    pub fn s1(&self) -> usize {
        self.s1
    }

    /// Unordered same-cell point pairs inside the Y-blocks.
    pub fn s2(&self) -> usize {
        self.s2
    }

    /// The event `𝒰`: no spoiled edges.
    pub fn is_unspoiled(&self) -> bool {
        self.s1 == 0 && self.s2 == 0
    }

    /// The `j`-th matching `M_j` (1-based), i.e. indices `ℓ ∈ ((j−1)m, jm]`,
    /// as `(pair, block)` tuples.
    pub fn matching(&self, j: usize) -> Option<Vec<([u32; 2], &[u32])>> {
        if j < 1 || j > self.scheme.d() {
            return None;
        }
        let m = self.scheme.m();
        Some(
            ((j - 1) * m..j * m)
                .map(|l| (self.x_pairs[l], self.y_blocks[l].as_slice()))
                .collect(),
        )
    }
}

fn spoil_counts(scheme: &PartitionScheme, x_pairs: &[[u32; 2]], y_blocks: &[Vec<u32>]) -> (usize, usize) {
    let s1 = x_pairs
        .iter()
        .filter(|[a, b]| scheme.psi1(*a) == scheme.psi1(*b))
        .count();
    let mut s2 = 0;
    for b in y_blocks {
        for i in 0..b.len() {
            for j in i + 1..b.len() {
                if scheme.psi2(b[i]) == scheme.psi2(b[j]) {
                    s2 += 1;
                }
            }
        }
    }
    (s1, s2)
}

fn draw_configuration(scheme: PartitionScheme, rng: &mut Rng) -> Configuration {
    let mut xs: Vec<u32> = scheme.x_points().collect();
    let mut ys: Vec<u32> = scheme.y_points().collect();
    xs.shuffle(rng);
    ys.shuffle(rng);
    let x_pairs: Vec<[u32; 2]> = xs.chunks_exact(2).map(|c| [c[0], c[1]]).collect();
    let y_blocks: Vec<Vec<u32>> = ys.chunks_exact(scheme.kappa()).map(<[u32]>::to_vec).collect();
    let (s1, s2) = spoil_counts(&scheme, &x_pairs, &y_blocks);
    Configuration { scheme, x_pairs, y_blocks, s1, s2 }
}

/// Draws a uniform configuration: a uniform permutation of `𝒳` read in
/// consecutive blocks of 2 and a uniform permutation of `𝒴` read in
/// consecutive blocks of `κ`.
pub fn sample_configuration(m: usize, d: usize, kappa: usize, seed: u64) -> Result<Configuration> {
    let scheme = PartitionScheme::new(m, d, kappa)?;
    Ok(draw_configuration(scheme, &mut rng_from_seed(seed)))
}

/// True iff the configuration has no spoiled edge.
pub fn is_unspoiled(c: &Configuration) -> bool {
    c.is_unspoiled()
}

/// The multiset of `Λ_d` edges `ψ(e_ℓ ∪ f_ℓ)`, in block order.
pub fn project_psi(c: &Configuration) -> Result<Vec<Edge>> {
    if !c.is_unspoiled() {
        return Err(Error::Spoiled { s1: c.s1, s2: c.s2 });
    }
    let scheme = &c.scheme;
    c.x_pairs
        .iter()
        .zip(&c.y_blocks)
        .map(|(pair, block)| {
            let labels = pair
                .iter()
                .chain(block.iter())
                .map(|&p| scheme.psi(p).expect("point labels validated at construction"))
                .collect();
            Edge::new(labels).ok_or(Error::Spoiled { s1: c.s1, s2: c.s2 })
        })
        .collect()
}

/// Default rejection cap `⌈10·e^{κd}⌉`, saturating.
pub fn default_rejection_cap(d: usize, kappa: usize) -> u64 {
    let cap = 10.0 * ((kappa * d) as f64).exp();
    if cap >= u64::MAX as f64 {
        u64::MAX
    } else {
        cap.ceil() as u64
    }
}

/// An accepted sample of `Λ_d`.
#[derive(Clone, Debug)]
pub struct LambdaSample {
    pub configuration: Configuration,
    /// The `dm` projected edges with multiplicity, in block order.
    pub edges: Vec<Edge>,
    /// Number of spoiled configurations discarded before acceptance.
    pub rejections: u64,
}

impl LambdaSample {
    pub fn scheme(&self) -> &PartitionScheme {
        self.configuration.scheme()
    }

    /// `Λ_d` as a simple hypergraph (duplicate edges collapse) on
    /// `2m + 2κm` vertices.
    pub fn hypergraph(&self) -> KUniformHypergraph {
        let s = self.scheme();
        KUniformHypergraph::from_edges(s.vertex_count(), s.k(), self.edges.iter().cloned())
            .expect("projected edges are valid k-sets")
    }
}

/// Samples `Λ_d` by regenerating the whole configuration until `𝒰` holds,
/// with the default rejection cap.
pub fn sample_lambda_d(m: usize, d: usize, kappa: usize, seed: u64) -> Result<LambdaSample> {
    sample_lambda_d_with_cap(m, d, kappa, seed, default_rejection_cap(d, kappa))
}

/// As [`sample_lambda_d`] with an explicit cap on the number of attempts.
pub fn sample_lambda_d_with_cap(
    m: usize,
    d: usize,
    kappa: usize,
    seed: u64,
    cap: u64,
) -> Result<LambdaSample> {
    let scheme = PartitionScheme::new(m, d, kappa)?;
    let mut rng = rng_from_seed(seed);
    for attempt in 0..cap {
        let c = draw_configuration(scheme, &mut rng);
        if c.is_unspoiled() {
            let edges = project_psi(&c)?;
            return Ok(LambdaSample { configuration: c, edges, rejections: attempt });
        }
    }
    Err(Error::RejectionCapExceeded { cap })
}

/// Empirical spoiled-edge statistics over independent configurations.
#[derive(Clone, Debug, PartialEq)]
pub struct SpoiledStats {
    pub trials: usize,
    pub mean_s1: f64,
    pub mean_s2: f64,
    /// `histogram[s]` = number of trials with `S₁ + S₂ = s`.
    pub histogram: Vec<u64>,
    /// `s1_histogram[s]` = number of trials with `S₁ = s`.
    pub s1_histogram: Vec<u64>,
}

impl SpoiledStats {
    /// Fraction of trials in which `𝒰` held.
    pub fn unspoiled_frequency(&self) -> f64 {
        self.histogram.first().copied().unwrap_or(0) as f64 / self.trials as f64
    }

    /// Chi-square goodness of fit of the `S₁ + S₂` histogram against
    /// Poisson(`mean`).
    pub fn chi_square_vs_poisson(&self, mean: f64) -> stats::ChiSquareTest {
        stats::chi_square_poisson(&self.histogram, mean)
    }
}

/// Limiting mean of `S₁`, `(d−1)/2`.
pub fn poisson_mean_s1(d: usize) -> f64 {
    (d as f64 - 1.0) / 2.0
}

/// Limiting mean of `S₂`, `(κ−1)(d−2)/4`.
pub fn poisson_mean_s2(d: usize, kappa: usize) -> f64 {
    (kappa as f64 - 1.0) * (d as f64 - 2.0) / 4.0
}

/// Limiting `Pr(𝒰) = exp{−(d−1)/2 − (κ−1)(d−2)/4}`.
pub fn limiting_unspoiled_probability(d: usize, kappa: usize) -> f64 {
    (-poisson_mean_s1(d) - poisson_mean_s2(d, kappa)).exp()
}

/// Samples `trials` configurations (trial `t` seeded with
/// `trial_seed(seed, 0, t)`) and collects `S₁`, `S₂` statistics.
pub fn spoiled_statistics_experiment(
    m: usize,
    d: usize,
    kappa: usize,
    trials: usize,
    seed: u64,
) -> Result<SpoiledStats> {
    if trials < 1 {
        return Err(Error::invalid("trials must be at least 1"));
    }
    let scheme = PartitionScheme::new(m, d, kappa)?;
    let counts: Vec<(usize, usize)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let c = draw_configuration(scheme, &mut rng_from_seed(trial_seed(seed, 0, t as u64)));
            (c.s1, c.s2)
        })
        .collect();
    let mut histogram = Vec::new();
    let mut s1_histogram = Vec::new();
    let (mut sum1, mut sum2) = (0u64, 0u64);
    for &(s1, s2) in &counts {
        sum1 += s1 as u64;
        sum2 += s2 as u64;
        bump(&mut histogram, s1 + s2);
        bump(&mut s1_histogram, s1);
    }
    Ok(SpoiledStats {
        trials,
        mean_s1: sum1 as f64 / trials as f64,
        mean_s2: sum2 as f64 / trials as f64,
        histogram,
        s1_histogram,
    })
}

fn bump(h: &mut Vec<u64>, i: usize) {
    if h.len() <= i {
        h.resize(i + 1, 0);
    }
    h[i] += 1;
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    #[test]
    fn scheme_maps() {
        let s = PartitionScheme::new(2, 4, 2).unwrap();
        assert_eq!(s.x_point_count(), 16);
        assert_eq!(s.y_point_count(), 16);
        assert_eq!(s.psi1(1), Some(1));
        assert_eq!(s.psi1(4), Some(1));
        assert_eq!(s.psi1(5), Some(2));
        assert_eq!(s.psi1(17), None);
        // 𝒴 cells have d/2 = 2 points; first Y-cell label is 2m+1 = 5.
        assert_eq!(s.psi2(17), Some(5));
        assert_eq!(s.psi2(18), Some(5));
        assert_eq!(s.psi2(19), Some(6));
        assert_eq!(s.psi2(32), Some(12));
        assert_eq!(s.copy_number(6), Some(2));
        assert_eq!(s.copy_number(18), Some(2));
        for p in s.x_points().chain(s.y_points()) {
            let cell = s.psi(p).unwrap();
            assert_eq!(s.point_of(cell, s.copy_number(p).unwrap()), Some(p));
        }
    }

    #[test]
    fn scheme_rejects_odd_d() {
        assert!(PartitionScheme::new(1, 3, 1).is_err());
        assert!(sample_configuration(1, 5, 1, 0).is_err());
        assert!(PartitionScheme::new(0, 2, 1).is_err());
    }

    #[test]
    fn sample_is_a_partition() {
        let c = sample_configuration(3, 6, 3, 17).unwrap();
        let s = c.scheme();
        let mut xs: Vec<u32> = c.x_pairs().iter().flatten().copied().collect();
        xs.sort_unstable();
        assert_eq!(xs, s.x_points().collect::<Vec<_>>());
        let mut ys: Vec<u32> = c.y_blocks().iter().flatten().copied().collect();
        ys.sort_unstable();
        assert_eq!(ys, s.y_points().collect::<Vec<_>>());
    }

    #[test]
    fn kappa_one_never_spoils_y() {
        for seed in 0..200 {
            assert_eq!(sample_configuration(4, 6, 1, seed).unwrap().s2(), 0);
        }
    }

    #[test]
    fn s2_counts_unordered_pairs_within_block() {
        // d = 6 gives 3 points per Y-cell; one block holds all three copies
        // of the first Y-cell.
        let scheme = PartitionScheme::new(1, 6, 3).unwrap();
        let x_pairs: Vec<[u32; 2]> = (0..6).map(|i| [i + 1, i + 7]).collect();
        let ys: Vec<u32> = scheme.y_points().collect();
        let y_blocks: Vec<Vec<u32>> = ys.chunks(3).map(<[u32]>::to_vec).collect();
        let c = Configuration::from_parts(scheme, x_pairs, y_blocks).unwrap();
        assert_eq!(c.s1(), 0);
        // every block is one whole cell: 3 pairs per block, 6 blocks
        assert_eq!(c.s2(), 18);
    }

    #[test]
    fn spoiled_detection_and_projection() {
        let scheme = PartitionScheme::new(1, 2, 1).unwrap();
        // X points 1,2 in cell 1 and 3,4 in cell 2; Y point 5 in cell 3, 6 in cell 4.
        let good = Configuration::from_parts(scheme, vec![[1, 3], [2, 4]], vec![vec![5], vec![6]]).unwrap();
        assert!(is_unspoiled(&good));
        let edges = project_psi(&good).unwrap();
        assert_eq!(edges, vec![Edge::from(&[1, 2, 3][..]), Edge::from(&[1, 2, 4][..])]);

        let bad = Configuration::from_parts(scheme, vec![[1, 2], [3, 4]], vec![vec![5], vec![6]]).unwrap();
        assert!(!is_unspoiled(&bad));
        assert_eq!(bad.s1(), 2);
        assert!(matches!(project_psi(&bad), Err(Error::Spoiled { .. })));
    }

    #[test]
    fn from_parts_rejects_non_partitions() {
        let scheme = PartitionScheme::new(1, 2, 1).unwrap();
        assert!(Configuration::from_parts(scheme, vec![[1, 3], [1, 4]], vec![vec![5], vec![6]]).is_err());
        assert!(Configuration::from_parts(scheme, vec![[1, 3], [2, 4]], vec![vec![5], vec![5]]).is_err());
        assert!(Configuration::from_parts(scheme, vec![[1, 3]], vec![vec![5]]).is_err());
    }

    #[test]
    fn pairings_of_four_points_are_uniform() {
        // m=1, d=2: 4 points, 3 perfect pairings, each read in either order.
        let trials = 30_000;
        let mut freq: BTreeMap<Vec<[u32; 2]>, usize> = BTreeMap::new();
        for seed in 0..trials {
            let c = sample_configuration(1, 2, 1, seed).unwrap();
            let mut pairs: Vec<[u32; 2]> = c
                .x_pairs()
                .iter()
                .map(|&[a, b]| if a < b { [a, b] } else { [b, a] })
                .collect();
            pairs.sort_unstable();
            *freq.entry(pairs).or_default() += 1;
        }
        assert_eq!(freq.len(), 3);
        let p = 1.0 / 3.0;
        let sigma = (p * (1.0 - p) / trials as f64).sqrt();
        for (pairing, count) in freq {
            let f = count as f64 / trials as f64;
            assert!((f - p).abs() < 4.0 * sigma, "{pairing:?}: {f}");
        }
    }

    #[test]
    fn matchings_are_consecutive_ranges() {
        let c = sample_configuration(3, 4, 2, 1).unwrap();
        let m2 = c.matching(2).unwrap();
        assert_eq!(m2.len(), 3);
        assert_eq!(m2[0].0, c.x_pairs()[3]);
        assert!(c.matching(0).is_none());
        assert!(c.matching(5).is_none());
    }

    #[test]
    fn lambda_sample_shape() {
        for seed in 0..20 {
            let l = sample_lambda_d(3, 4, 2, seed).unwrap();
            let s = l.scheme();
            assert_eq!(l.edges.len(), s.block_count());
            let mut x_deg = vec![0usize; s.vertex_count() + 1];
            for e in &l.edges {
                assert_eq!(e.len(), 4);
                let xs = e.vertices().iter().filter(|&&v| (v as usize) <= s.x_cell_count()).count();
                assert_eq!(xs, 2);
                for &v in e.vertices() {
                    x_deg[v as usize] += 1;
                }
            }
            for v in 1..=s.vertex_count() {
                let expected = if v <= s.x_cell_count() { s.d() } else { s.d() / 2 };
                assert_eq!(x_deg[v], expected, "label {v}");
            }
            assert!(l.hypergraph().edge_count() <= s.block_count());
        }
    }

    #[test]
    fn rejection_cap_is_reported() {
        // κ=2, d=6, m=1: two X cells of six points; a spoiled pair is very likely.
        let err = sample_lambda_d_with_cap(1, 6, 2, 3, 1);
        match err {
            Err(Error::RejectionCapExceeded { cap }) => assert_eq!(cap, 1),
            Ok(l) => assert_eq!(l.rejections, 0),
            Err(e) => panic!("unexpected {e}"),
        }
        assert!(matches!(
            sample_lambda_d_with_cap(1, 6, 2, 3, 0),
            Err(Error::RejectionCapExceeded { cap: 0 })
        ));
        assert_eq!(default_rejection_cap(4, 1), (10.0 * 4f64.exp()).ceil() as u64);
    }

    #[test]
    fn exchangeable_under_within_cell_relabeling() {
        // Swapping the roles of copies inside every cell changes point labels
        // but never the spoil counts.
        let scheme = PartitionScheme::new(5, 6, 3).unwrap();
        let relabel = |p: u32| {
            let cell = scheme.psi(p).unwrap();
            let copy = scheme.copy_number(p).unwrap();
            let size = if scheme.is_x_point(p) { scheme.d() } else { scheme.y_cell_size() };
            scheme.point_of(cell, size + 1 - copy).unwrap()
        };
        for seed in 0..300 {
            let c = sample_configuration(5, 6, 3, seed).unwrap();
            let pairs = c.x_pairs().iter().map(|&[a, b]| [relabel(a), relabel(b)]).collect();
            let blocks = c.y_blocks().iter().map(|b| b.iter().map(|&p| relabel(p)).collect()).collect();
            let r = Configuration::from_parts(scheme, pairs, blocks).unwrap();
            assert_eq!((r.s1(), r.s2()), (c.s1(), c.s2()));
        }
    }

    #[test]
    fn experiment_small_d_means() {
        let st = spoiled_statistics_experiment(500, 2, 1, 2000, 5).unwrap();
        assert_eq!(st.mean_s2, 0.0);
        assert!((st.mean_s1 - 0.5).abs() < 0.05 * 0.5 + 0.02, "{}", st.mean_s1);
        assert_eq!(st.histogram.iter().sum::<u64>(), 2000);
        assert!(spoiled_statistics_experiment(5, 2, 1, 0, 5).is_err());
    }

    #[test]
    fn experiment_is_deterministic() {
        let a = spoiled_statistics_experiment(20, 4, 2, 100, 9).unwrap();
        let b = spoiled_statistics_experiment(20, 4, 2, 100, 9).unwrap();
        assert_eq!(a, b);
    }
}
