//! Goodness-of-fit helpers for the Monte Carlo checks.

use statrs::distribution::{ChiSquared, ContinuousCDF, Discrete, Poisson};

/// Result of a Pearson chi-square test.
#[derive(Clone, Debug, PartialEq)]
pub struct ChiSquareTest {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
    /// Number of bins after merging.
    pub bins: usize,
}

impl ChiSquareTest {
    pub fn passes(&self, significance: f64) -> bool {
        self.p_value >= significance
    }
}

/// Pearson statistic for observed counts against expected counts.
pub fn pearson(observed: &[f64], expected: &[f64]) -> f64 {
    observed
        .iter()
        .zip(expected)
        .map(|(o, e)| (o - e) * (o - e) / e)
        .sum()
}

fn chi_square_sf(statistic: f64, dof: usize) -> f64 {
    if dof == 0 {
        return 1.0;
    }
    ChiSquared::new(dof as f64)
        .expect("positive degrees of freedom")
        .sf(statistic)
}

/// Chi-square test of `counts` against a uniform distribution over the bins.
pub fn chi_square_uniform(counts: &[u64]) -> ChiSquareTest {
    let total: u64 = counts.iter().sum();
    let e = total as f64 / counts.len() as f64;
    let observed: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
    let expected = vec![e; counts.len()];
    let statistic = pearson(&observed, &expected);
    let dof = counts.len().saturating_sub(1);
    ChiSquareTest { statistic, dof, p_value: chi_square_sf(statistic, dof), bins: counts.len() }
}

/// Poisson probability mass function.
pub fn poisson_pmf(mean: f64, k: u64) -> f64 {
    if mean == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    Poisson::new(mean).expect("positive mean").pmf(k)
}

/// Chi-square test of a histogram (`histogram[s]` = count of value `s`)
/// against Poisson(`mean`) with a known mean.
///
/// Bins are merged left to right until each holds an expected count of at
/// least 5; the last bin absorbs the whole upper tail.
pub fn chi_square_poisson(histogram: &[u64], mean: f64) -> ChiSquareTest {
    let n: u64 = histogram.iter().sum();
    let n = n as f64;
    let mut observed = Vec::new();
    let mut expected = Vec::new();
    let (mut o_acc, mut e_acc, mut cdf) = (0.0, 0.0, 0.0);
    let mut s = 0u64;
    // Stop opening new bins once the remaining tail is too small to fill one.
    while n * (1.0 - cdf) >= 10.0 {
        let p = poisson_pmf(mean, s);
        cdf += p;
        o_acc += histogram.get(s as usize).copied().unwrap_or(0) as f64;
        e_acc += n * p;
        s += 1;
        if e_acc >= 5.0 && n * (1.0 - cdf) >= 5.0 {
            observed.push(o_acc);
            expected.push(e_acc);
            o_acc = 0.0;
            e_acc = 0.0;
        }
    }
    let tail_obs: f64 = histogram.iter().skip(s as usize).map(|&c| c as f64).sum::<f64>() + o_acc;
    let tail_exp = n * (1.0 - cdf).max(0.0) + e_acc;
    if tail_exp > 0.0 {
        observed.push(tail_obs);
        expected.push(tail_exp);
    }
    let statistic = pearson(&observed, &expected);
    let dof = observed.len().saturating_sub(1);
    ChiSquareTest { statistic, dof, p_value: chi_square_sf(statistic, dof), bins: observed.len() }
}

/// Total-variation distance between the empirical distribution of a
/// histogram and Poisson(`mean`), over values `0..=cutoff`, with all mass
/// above `cutoff` lumped into one tail cell on both sides.
pub fn tv_distance_poisson(histogram: &[u64], mean: f64, cutoff: usize) -> f64 {
    let n: u64 = histogram.iter().sum();
    let n = n as f64;
    let mut tv = 0.0;
    let (mut emp_head, mut pois_head) = (0.0, 0.0);
    for s in 0..=cutoff {
        let e = histogram.get(s).copied().unwrap_or(0) as f64 / n;
        let p = poisson_pmf(mean, s as u64);
        emp_head += e;
        pois_head += p;
        tv += (e - p).abs();
    }
    tv += ((1.0 - emp_head) - (1.0 - pois_head)).abs();
    tv / 2.0
}

/// Mean and standard error of a sample.
pub fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0).max(1.0);
    (mean, (var / n).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng as _;
    use rand_distr::Distribution;

    #[test]
    fn uniform_test_known_value() {
        // 28, 31, 40, 35 against uniform: statistic 2.41791..., p ≈ 0.4903
        let t = chi_square_uniform(&[28, 31, 40, 35]);
        assert!((t.statistic - 2.417_910_447_761_194).abs() < 1e-12);
        assert!((t.p_value - 0.490_309_306_965_388_3).abs() < 1e-9);
        assert_eq!(t.dof, 3);
    }

    #[test]
    fn exact_poisson_histogram_fits() {
        let mean = 3.5;
        let n = 2000.0;
        let hist: Vec<u64> = (0..20).map(|s| (n * poisson_pmf(mean, s)).round() as u64).collect();
        let t = chi_square_poisson(&hist, mean);
        assert!(t.p_value > 0.99, "{t:?}");
        assert!(t.bins >= 6);
    }

    #[test]
    fn shifted_histogram_is_rejected() {
        let n = 2000.0;
        let hist: Vec<u64> = (0..25).map(|s| (n * poisson_pmf(5.0, s)).round() as u64).collect();
        assert!(chi_square_poisson(&hist, 3.5).p_value < 1e-6);
    }

    #[test]
    fn sampled_poisson_passes_usually() {
        let mut rng = crate::rng::rng_from_seed(3);
        let pois = rand_distr::Poisson::new(2.5).unwrap();
        let mut hist = vec![0u64; 30];
        for _ in 0..5000 {
            let x: f64 = pois.sample(&mut rng);
            hist[x as usize] += 1;
        }
        let _: f64 = rng.random();
        assert!(chi_square_poisson(&hist, 2.5).p_value > 0.001);
        assert!(tv_distance_poisson(&hist, 2.5, 15) < 0.03);
    }

    #[test]
    fn pmf_matches_closed_form() {
        let m: f64 = 3.5;
        let p3 = (-m).exp() * m.powi(3) / 6.0;
        assert!((poisson_pmf(m, 3) - p3).abs() < 1e-15);
        assert_eq!(poisson_pmf(0.0, 0), 1.0);
        assert_eq!(poisson_pmf(0.0, 2), 0.0);
    }
}
