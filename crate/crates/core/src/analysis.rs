//! Closed forms of the first and second moment of the restricted cycle count,
//! and numerical verification of the critical-point analysis of the exponent
//! function `g`.
//!
//! Factorial-type quantities come in two flavours: exact big integers, and
//! `f64` natural logarithms built from `ln Γ`. The asymptotic expressions
//! keep their `e`-prefactors as written.

use std::f64::consts::{LN_2, PI};
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

// ---------------------------------------------------------------------------
// exact and log-space combinatorics

fn big_factorial(n: u64) -> BigUint {
    (2..=n).fold(BigUint::one(), |acc, i| acc * i)
}

/// `n!!` for odd `n`, with `(−1)!! = 1`.
fn big_odd_double_factorial(n: i64) -> BigUint {
    assert!(n >= -1 && n % 2 != 0, "odd argument ≥ −1 required, got {n}");
    (1..=n.max(0) as u64).step_by(2).fold(BigUint::one(), |acc, i| acc * i)
}

fn big_binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Natural logarithm of a positive big integer.
pub fn ln_big(x: &BigUint) -> f64 {
    assert!(!x.is_zero(), "logarithm of zero");
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().expect("fits in f64").ln();
    }
    let shift = bits - 64;
    (x >> shift).to_f64().expect("fits in f64").ln() + shift as f64 * LN_2
}

fn ln_factorial(n: u64) -> f64 {
    ln_gamma(n as f64 + 1.0)
}

/// `ln (n!!)` for odd `n ≥ −1`.
pub fn ln_odd_double_factorial(n: i64) -> f64 {
    assert!(n >= -1 && n % 2 != 0, "odd argument ≥ −1 required, got {n}");
    let big_n = ((n + 1) / 2) as u64;
    ln_factorial(2 * big_n) - big_n as f64 * LN_2 - ln_factorial(big_n)
}

/// `ln C(n, k)`; `−∞` when `k > n`.
pub fn ln_binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

fn log_sum_exp(terms: &[f64]) -> f64 {
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + terms.iter().map(|t| (t - max).exp()).sum::<f64>().ln()
}

fn check_even_d(d: u32, min: u32) -> Result<()> {
    if d < min || d % 2 != 0 {
        return Err(Error::invalid(format!("d = {d} must be even and at least {min}")));
    }
    Ok(())
}

fn check_m(m: u64) -> Result<()> {
    if m == 0 {
        return Err(Error::invalid("m must be positive"));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// first moment

/// Number of `2m`-cycles in the point space `𝒳`:
/// `(d(d−1))^{2m} (2m)! / (4m)`.
pub fn a_2m(m: u64, d: u32) -> Result<BigUint> {
    check_m(m)?;
    if d < 2 {
        return Err(Error::invalid("d must be at least 2"));
    }
    let base = BigUint::from(d as u64 * (d as u64 - 1));
    Ok(base.pow(2 * m as u32) * big_factorial(2 * m) / (4 * m))
}

/// `ln a_2m` in floating point.
pub fn ln_a_2m(m: u64, d: u32) -> Result<f64> {
    check_m(m)?;
    if d < 2 {
        return Err(Error::invalid("d must be at least 2"));
    }
    let d = d as f64;
    Ok(2.0 * m as f64 * (d * (d - 1.0)).ln() + ln_factorial(2 * m) - (4.0 * m as f64).ln())
}

/// `ln p_2m` with `p_2m = e (2dm−4m−1)!! / (2dm−1)!!`.
pub fn ln_p_2m(m: u64, d: u32) -> Result<f64> {
    check_m(m)?;
    if d < 2 {
        return Err(Error::invalid("d must be at least 2"));
    }
    let (m, d) = (m as i64, d as i64);
    Ok(1.0 + ln_odd_double_factorial(2 * d * m - 4 * m - 1) - ln_odd_double_factorial(2 * d * m - 1))
}

/// `ln q_2m` with `q_2m = e^{(κ−1)/2} (d/2)^{2κm} / C(κdm, 2κm)`.
pub fn ln_q_2m(m: u64, kappa: u32, d: u32) -> Result<f64> {
    check_m(m)?;
    check_even_d(d, 2)?;
    check_kappa(kappa)?;
    let (k, df) = (kappa as f64, d as f64);
    let km = kappa as u64 * m;
    Ok((k - 1.0) / 2.0 + 2.0 * km as f64 * (df / 2.0).ln() - ln_binomial(km * d as u64, 2 * km))
}

/// `ln p_2m(b)` with `p_2m(b) = e² (2dm−8m+2b−1)!! / (2dm−1)!!`.
pub fn ln_p_2m_b(m: u64, d: u32, b: u64) -> Result<f64> {
    check_m(m)?;
    check_b(m, b, true)?;
    let (mi, di, bi) = (m as i64, d as i64, b as i64);
    let top = 2 * di * mi - 8 * mi + 2 * bi - 1;
    if top < -1 {
        return Err(Error::invalid(format!("negative double factorial argument {top}")));
    }
    Ok(2.0 + ln_odd_double_factorial(top) - ln_odd_double_factorial(2 * di * mi - 1))
}

/// `ln r_2m(b)` with
/// `r_2m(b) = e^{(κ−1)/2} q_2m (d/2−1)^{2κm−κb} / C(κdm−2κm, 2κm−κb)`.
pub fn ln_r_2m_b(m: u64, kappa: u32, d: u32, b: u64) -> Result<f64> {
    check_b(m, b, true)?;
    let ln_q = ln_q_2m(m, kappa, d)?;
    let k = kappa as u64;
    let n = k * d as u64 * m;
    let (pool, pick) = (n.checked_sub(2 * k * m), 2 * k * m - k * b);
    let pool = pool.filter(|&p| p >= pick).ok_or_else(|| {
        Error::invalid(format!("binomial C(κdm−2κm, 2κm−κb) undefined for m={m}, d={d}, b={b}"))
    })?;
    let base = d as f64 / 2.0 - 1.0;
    let power = if pick == 0 { 0.0 } else { pick as f64 * base.ln() };
    Ok((kappa as f64 - 1.0) / 2.0 + ln_q + power - ln_binomial(pool, pick))
}

fn check_kappa(kappa: u32) -> Result<()> {
    if kappa == 0 {
        return Err(Error::invalid("κ must be at least 1"));
    }
    Ok(())
}

fn check_b(m: u64, b: u64, inclusive: bool) -> Result<()> {
    let ok = if inclusive { b <= 2 * m } else { b < 2 * m };
    if !ok {
        return Err(Error::invalid(format!("b = {b} out of range for m = {m}")));
    }
    Ok(())
}

/// The base `(d−1)((d−2)/d)^{(κ+1)(d−2)/2}` of the exponential growth of
/// `E(H)`.
pub fn expectation_ratio(d: u32, kappa: u32) -> f64 {
    let d = d as f64;
    let k = kappa as f64;
    (d - 1.0) * ((d - 2.0) / d).powf((k + 1.0) * (d - 2.0) / 2.0)
}

/// `E(H)` in logarithmic form.
#[derive(Clone, Debug, PartialEq)]
pub struct Expectation {
    /// `ln` of `e^{(κ+1)/2} π √(κ(d−2)/d) r^{2m}`.
    pub ln_asymptotic: f64,
    /// `ln(a_2m p_2m q_2m)` from exact big-integer factorials.
    pub ln_product: f64,
    /// The same product evaluated with `ln Γ`.
    pub ln_product_float: f64,
    pub ratio: f64,
}

/// `E(H)` both from the Stirling-reduced formula and from the product
/// `a_2m p_2m q_2m`.
pub fn expected_h_asym(m: u64, d: u32, kappa: u32) -> Result<Expectation> {
    check_m(m)?;
    check_even_d(d, 4)?;
    check_kappa(kappa)?;
    let (df, k) = (d as f64, kappa as f64);
    let ratio = expectation_ratio(d, kappa);
    let ln_asymptotic =
        (k + 1.0) / 2.0 + PI.ln() + 0.5 * (k * (df - 2.0) / df).ln() + 2.0 * m as f64 * ratio.ln();

    let (mi, di) = (m as i64, d as i64);
    let km = kappa as u64 * m;
    let ln_p_exact = 1.0 + ln_big(&big_odd_double_factorial(2 * di * mi - 4 * mi - 1))
        - ln_big(&big_odd_double_factorial(2 * di * mi - 1));
    let ln_q_exact = (k - 1.0) / 2.0 + 2.0 * km as f64 * (df / 2.0).ln()
        - ln_big(&big_binomial(km * d as u64, 2 * km));
    let ln_product = ln_big(&a_2m(m, d)?) + ln_p_exact + ln_q_exact;
    let ln_product_float = ln_a_2m(m, d)? + ln_p_2m(m, d)? + ln_q_2m(m, kappa, d)?;
    Ok(Expectation { ln_asymptotic, ln_product, ln_product_float, ratio })
}

// ---------------------------------------------------------------------------
// overlap counts

fn check_n_b(m: u64, d: u32, b: u64) -> Result<()> {
    check_m(m)?;
    if d < 3 {
        return Err(Error::invalid("d must be at least 3"));
    }
    check_b(m, b, false)
}

/// Number of `2m`-cycles meeting a fixed one in exactly `b` pairs, by the
/// closed-form sum
/// `Σ_a 2am/(b(2m−b)) 2^{a−1} (d−2)^{2m+a−b} (d−3)^{2m−a−b} (2m−b−1)! C(b,a) C(2m−b,a)`
/// over `a = 0..=min(b, 2m−b)`, with `a/b = 1` at `a = b = 0`.
///
/// Errors if the sum is not an integer.
pub fn n_b(m: u64, d: u32, b: u64) -> Result<BigUint> {
    check_n_b(m, d, b)?;
    let (d2, d3) = (BigUint::from(d as u64 - 2), BigUint::from(d as u64 - 3));
    let two_m = 2 * m;
    if b == 0 {
        let num = d2.pow(two_m as u32) * d3.pow(two_m as u32) * big_factorial(two_m - 1);
        return exact_quotient(num, BigUint::from(2u32), m, b);
    }
    let mut num = BigUint::zero();
    for a in 1..=b.min(two_m - b) {
        num += BigUint::from(2 * a * m)
            * BigUint::from(2u32).pow(a as u32)
            * d2.pow((two_m + a - b) as u32)
            * d3.pow((two_m - a - b) as u32)
            * big_factorial(two_m - b - 1)
            * big_binomial(b, a)
            * big_binomial(two_m - b, a);
    }
    exact_quotient(num, BigUint::from(2 * b * (two_m - b)), m, b)
}

fn exact_quotient(num: BigUint, den: BigUint, m: u64, b: u64) -> Result<BigUint> {
    if !(&num % &den).is_zero() {
        return Err(Error::invalid(format!("overlap sum is not integral at m={m}, b={b}")));
    }
    Ok(num / den)
}

/// `ln` of the `a`-th summand of [`n_b`], or `None` if it vanishes.
pub fn ln_n_b_term(m: u64, d: u32, a: u64, b: u64) -> Option<f64> {
    let two_m = 2 * m;
    if b >= two_m || a > b.min(two_m - b) || d < 3 {
        return None;
    }
    if a == 0 && b > 0 {
        return None;
    }
    let d3_exp = two_m - a - b;
    if d == 3 && d3_exp > 0 {
        return None;
    }
    let df = d as f64;
    let ln_d3 = if d3_exp == 0 { 0.0 } else { d3_exp as f64 * (df - 3.0).ln() };
    let ratio = if a == 0 {
        0.0
    } else {
        (2.0 * a as f64 * m as f64).ln() - (b as f64).ln() - ((two_m - b) as f64).ln()
    };
    Some(
        ratio + (a as f64 - 1.0) * LN_2 + (two_m + a - b) as f64 * (df - 2.0).ln() + ln_d3
            + ln_factorial(two_m - b - 1)
            + ln_binomial(b, a)
            + ln_binomial(two_m - b, a),
    )
}

/// `ln N(b)` in floating point; `−∞` when `N(b) = 0`.
pub fn ln_n_b(m: u64, d: u32, b: u64) -> Result<f64> {
    check_n_b(m, d, b)?;
    let terms: Vec<f64> = (0..=b.min(2 * m - b)).filter_map(|a| ln_n_b_term(m, d, a, b)).collect();
    Ok(log_sum_exp(&terms))
}

// ---------------------------------------------------------------------------
// the exponent function g

/// `z ln z`, continuously extended by `0` at `z = 0`.
fn zlogz(z: f64) -> f64 {
    if z <= 0.0 {
        0.0
    } else {
        z * z.ln()
    }
}

fn check_d_for_g(d: u32) -> Result<()> {
    if d < 5 {
        return Err(Error::invalid(format!("d = {d} must be at least 5")));
    }
    Ok(())
}

/// Whether `(x, y)` lies in `T = {0 ≤ x ≤ y ≤ 1−x}`.
pub fn in_closed_domain(x: f64, y: f64) -> bool {
    x >= 0.0 && y >= x && x + y <= 1.0
}

/// Whether `(x, y)` lies in `S = {0 < x < y < 1−x}`.
pub fn in_open_domain(x: f64, y: f64) -> bool {
    x > 0.0 && y > x && x + y < 1.0
}

fn check_closed(x: f64, y: f64) -> Result<()> {
    if !in_closed_domain(x, y) {
        return Err(Error::OutsideDomain { x, y });
    }
    Ok(())
}

fn check_open(x: f64, y: f64) -> Result<()> {
    if !in_open_domain(x, y) {
        return Err(Error::OutsideDomain { x, y });
    }
    Ok(())
}

/// The exponent `g(x, y)` of the variance summand, continuously extended to
/// the closed domain `T`.
pub fn g(x: f64, y: f64, d: u32, kappa: u32) -> Result<f64> {
    check_d_for_g(d)?;
    check_closed(x, y)?;
    Ok(g_unchecked(x, y, d as f64, kappa as f64))
}

fn g_unchecked(x: f64, y: f64, d: f64, k: f64) -> f64 {
    let l4 = (d - 4.0 + 2.0 * y).ln();
    x * LN_2 - d.ln() - (d - 1.0).ln()
        + (1.0 + x - y) * (d - 2.0).ln()
        + (1.0 - x - y) * (d - 3.0).ln()
        + zlogz(y)
        + 2.0 * zlogz(1.0 - y)
        - zlogz(y - x)
        - 2.0 * zlogz(x)
        - zlogz(1.0 - x - y)
        + (d / 2.0 - 2.0 + y) * l4
        + (d / 2.0) * d.ln()
        - (d - 2.0) * (d - 2.0).ln()
        + k * (d / 2.0 - 1.0) * d.ln()
        + k * zlogz(1.0 - y)
        + k * (d / 2.0 - 2.0 + y) * l4
        - k * (d - 3.0 + y) * (d - 2.0).ln()
}

/// The prefactor `h(x, y) = √(d(d−4+2y)) / √((d−2)² y(1−y)(1−x−y)(y−x))` on `S`.
pub fn h(x: f64, y: f64, d: u32) -> Result<f64> {
    check_d_for_g(d)?;
    check_open(x, y)?;
    let d = d as f64;
    Ok((d * (d - 4.0 + 2.0 * y)).sqrt()
        / ((d - 2.0).powi(2) * y * (1.0 - y) * (1.0 - x - y) * (y - x)).sqrt())
}

/// `h(x₀, y₀) = (d−1)d² / (2(d−2)√(d−3))`.
pub fn h_at_critical_closed_form(d: u32) -> f64 {
    let d = d as f64;
    (d - 1.0) * d * d / (2.0 * (d - 2.0) * (d - 3.0).sqrt())
}

/// Gradient of `g` on `S`.
pub fn grad_g(x: f64, y: f64, d: u32, kappa: u32) -> Result<(f64, f64)> {
    check_d_for_g(d)?;
    check_open(x, y)?;
    let (d, k) = (d as f64, kappa as f64);
    let gx = LN_2 - (d - 3.0).ln() + (d - 2.0).ln() - 2.0 * x.ln() + (y - x).ln() + (1.0 - x - y).ln();
    let gy = -(d - 3.0).ln() - (1.0 + k) * (d - 2.0).ln() - (2.0 + k) * (1.0 - y).ln()
        + (1.0 - x - y).ln()
        + y.ln()
        - (y - x).ln()
        + (1.0 + k) * (d - 4.0 + 2.0 * y).ln();
    Ok((gx, gy))
}

/// Hessian of `g` on `S`.
pub fn hessian_g(x: f64, y: f64, d: u32, kappa: u32) -> Result<[[f64; 2]; 2]> {
    check_d_for_g(d)?;
    check_open(x, y)?;
    let (d, k) = (d as f64, kappa as f64);
    let gxx = -2.0 / x + 1.0 / (x - y) + 1.0 / (-1.0 + x + y);
    let gxy = 1.0 / (y - x) + 1.0 / (-1.0 + x + y);
    let gyy = (2.0 + k) / (1.0 - y) + 1.0 / (x - y) + 1.0 / y + 1.0 / (-1.0 + x + y)
        + 2.0 * (1.0 + k) / (d - 4.0 + 2.0 * y);
    Ok([[gxx, gxy], [gxy, gyy]])
}

/// The critical point `(x₀, y₀) = (2(d−2)/(d(d−1)), 2/d)`.
pub fn critical_point(d: u32) -> (f64, f64) {
    let d = d as f64;
    (2.0 * (d - 2.0) / (d * (d - 1.0)), 2.0 / d)
}

/// `Det D²g(x₀, y₀) = d³(d−1)²(d−2(1+κ)) / (4(d−3)(d−2)²)`.
pub fn hessian_det_closed_form(d: u32, kappa: u32) -> f64 {
    let (d, k) = (d as f64, kappa as f64);
    d.powi(3) * (d - 1.0).powi(2) * (d - 2.0 * (1.0 + k)) / (4.0 * (d - 3.0) * (d - 2.0).powi(2))
}

/// `g₁(y) = g(0, y)`.
pub fn g1(y: f64, d: u32, kappa: u32) -> Result<f64> {
    g(0.0, y, d, kappa)
}

/// `g₂(y) = g(y, y)`.
pub fn g2(y: f64, d: u32, kappa: u32) -> Result<f64> {
    g(y, y, d, kappa)
}

/// `g₂''(y) = (2+κ)/(1−y) − 1/y + 4/(2y−1) + 2(1+κ)/(d−4+2y)`.
pub fn g2_second_derivative(y: f64, d: u32, kappa: u32) -> f64 {
    let (d, k) = (d as f64, kappa as f64);
    (2.0 + k) / (1.0 - y) - 1.0 / y + 4.0 / (-1.0 + 2.0 * y) + 2.0 * (1.0 + k) / (d - 4.0 + 2.0 * y)
}

/// `g₃(y) = g₂(y) − (2/3)(d/2)² ln((d−4)/(d−3)) y³`.
pub fn g3(y: f64, d: u32, kappa: u32) -> Result<f64> {
    let df = d as f64;
    Ok(g2(y, d, kappa)? - (2.0 / 3.0) * (df / 2.0).powi(2) * ((df - 4.0) / (df - 3.0)).ln() * y.powi(3))
}

/// `g₃(2/d) = (8/(3d) − 1) ln((d−4)/(d−3)) + ln((d−2)/(d−1))`.
pub fn g3_at_two_over_d(d: u32) -> f64 {
    let d = d as f64;
    (8.0 / (3.0 * d) - 1.0) * ((d - 4.0) / (d - 3.0)).ln() + ((d - 2.0) / (d - 1.0)).ln()
}

/// Upper end `1/(2(3+2κ))` of the `y`-range examined near the boundary.
pub fn y_cutoff(kappa: u32) -> f64 {
    1.0 / (2.0 * (3.0 + 2.0 * kappa as f64))
}

// ---------------------------------------------------------------------------
// ψ and the elimination of x

/// The four summands of `ψ(y)`.
pub fn psi_terms(y: f64, d: u32, kappa: u32) -> [f64; 4] {
    let (d, k) = (d as f64, kappa as f64);
    let w = d - 4.0 + 2.0 * y;
    [
        2.0 * (1.0 - 2.0 * y).powi(2) * (1.0 - y).powf(k) * w.powf(k + 1.0) * (d - 2.0).powf(k + 2.0),
        -y * (1.0 - y).powf(2.0 * k + 2.0) * (d * d - 5.0 * d + 6.0).powi(2) * (d - 2.0).powf(2.0 * k),
        2.0 * y * (1.0 - y).powf(k + 1.0) * w.powf(k + 1.0) * (d - 3.0) * (d - 2.0).powf(k + 1.0),
        -y * w.powf(2.0 * k + 2.0),
    ]
}

/// `ψ(y)`, whose root in `(0, 1/(2(3+2κ))]` is `y₀ = 2/d`.
pub fn psi_y(y: f64, d: u32, kappa: u32) -> f64 {
    // sum in a fixed order of increasing magnitude for reproducibility
    let t = psi_terms(y, d, kappa);
    (t[3] + t[2]) + (t[1] + t[0])
}

/// The solution `x(y)` of `∂g/∂y = 0`.
pub fn x_of_y(y: f64, d: u32, kappa: u32) -> f64 {
    let (d, k) = (d as f64, kappa as f64);
    let w = (d - 4.0 + 2.0 * y).powf(k + 1.0);
    let c = (d - 3.0) * (d - 2.0).powf(k + 1.0);
    y * (1.0 - y) * (c * (1.0 - y).powf(k + 1.0) - w) / ((1.0 - y).powf(k + 2.0) * c - y * w)
}

/// `exp(∂g/∂x) − 1` along the curve `x = x(y)`.
pub fn eliminated_x_residual(y: f64, d: u32, kappa: u32) -> Result<f64> {
    let x = x_of_y(y, d, kappa);
    Ok(grad_g(x, y, d, kappa)?.0.exp() - 1.0)
}

/// Numerical check of the root of `ψ` and of its monotonicity.
#[derive(Clone, Debug, PartialEq)]
pub struct PsiRootReport {
    pub d: u32,
    pub kappa: u32,
    pub y0: f64,
    pub psi_at_y0: f64,
    pub max_term: f64,
    pub relative_residual: f64,
    pub samples: usize,
    /// First sample where `ψ` fails to decrease, if any.
    pub first_non_decrease: Option<f64>,
    pub x_of_y0: f64,
    pub eliminated_residual: f64,
}

impl PsiRootReport {
    pub fn strictly_decreasing(&self) -> bool {
        self.first_non_decrease.is_none()
    }
}

impl fmt::Display for PsiRootReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "d = {}", self.d)?;
        writeln!(f, "kappa = {}", self.kappa)?;
        writeln!(f, "y0 = {:.17e}", self.y0)?;
        writeln!(f, "psi_y0 = {:.6e}", self.psi_at_y0)?;
        writeln!(f, "max_term = {:.6e}", self.max_term)?;
        writeln!(f, "relative_residual = {:.6e}", self.relative_residual)?;
        writeln!(f, "samples = {}", self.samples)?;
        writeln!(f, "strictly_decreasing = {}", self.strictly_decreasing())?;
        if let Some(y) = self.first_non_decrease {
            writeln!(f, "first_non_decrease = {y:.17e}")?;
        }
        writeln!(f, "x_of_y0 = {:.17e}", self.x_of_y0)?;
        writeln!(f, "eliminated_residual = {:.6e}", self.eliminated_residual)
    }
}

/// Evaluates `ψ(2/d)` relative to its largest summand and samples `ψ` on
/// `(0, 1/(2(3+2κ))]` for strict decrease.
pub fn verify_psi_root(d: u32, kappa: u32, samples: usize) -> Result<PsiRootReport> {
    check_d_for_g(d)?;
    check_kappa(kappa)?;
    if samples < 2 {
        return Err(Error::invalid("need at least two samples"));
    }
    let y0 = 2.0 / d as f64;
    let psi_at_y0 = psi_y(y0, d, kappa);
    let max_term = psi_terms(y0, d, kappa).iter().fold(0.0f64, |acc, t| acc.max(t.abs()));
    let cutoff = y_cutoff(kappa);
    let mut prev = f64::INFINITY;
    let mut first_non_decrease = None;
    for i in 1..=samples {
        let y = cutoff * i as f64 / samples as f64;
        let v = psi_y(y, d, kappa);
        if v >= prev {
            first_non_decrease = Some(y);
            break;
        }
        prev = v;
    }
    let x_of_y0 = x_of_y(y0, d, kappa);
    Ok(PsiRootReport {
        d,
        kappa,
        y0,
        psi_at_y0,
        max_term,
        relative_residual: psi_at_y0.abs() / max_term,
        samples,
        first_non_decrease,
        x_of_y0,
        eliminated_residual: eliminated_x_residual(y0, d, kappa)?,
    })
}

// ---------------------------------------------------------------------------
// critical point and global maximum

/// Grid-search outcome over the closed domain `T`.
#[derive(Clone, Debug, PartialEq)]
pub struct GlobalSearch {
    pub resolution: usize,
    pub exclusion_radius: f64,
    pub tolerance: f64,
    /// Location and value of the overall maximum after refinement.
    pub max_point: (f64, f64),
    pub max_value: f64,
    /// Location and value of the largest `g` outside the exclusion disc.
    pub outside_point: (f64, f64),
    pub outside_value: f64,
    pub cutoff: f64,
    pub boundary_samples: usize,
    /// Largest sampled `g₁` and `g₂` on `(0, cutoff]`.
    pub g1_max: f64,
    pub g2_max: f64,
}

impl GlobalSearch {
    pub fn verified(&self) -> bool {
        self.outside_value <= self.tolerance && self.g1_max < 0.0 && self.g2_max < 0.0
    }
}

/// Analytic data at `(x₀, y₀)` and, optionally, the global grid search.
#[derive(Clone, Debug, PartialEq)]
pub struct CriticalPointReport {
    pub d: u32,
    pub kappa: u32,
    pub point: (f64, f64),
    pub value: f64,
    pub gradient: (f64, f64),
    pub gradient_norm: f64,
    pub hessian: [[f64; 2]; 2],
    pub determinant: f64,
    pub determinant_closed_form: f64,
    pub negative_definite: bool,
    pub h_value: f64,
    pub h_closed_form: f64,
    pub search: Option<GlobalSearch>,
}

impl CriticalPointReport {
    pub fn determinant_rel_error(&self) -> f64 {
        ((self.determinant - self.determinant_closed_form) / self.determinant_closed_form).abs()
    }

    pub fn global_max_verified(&self) -> bool {
        self.search.as_ref().is_some_and(GlobalSearch::verified)
    }
}

impl fmt::Display for CriticalPointReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "d = {}", self.d)?;
        writeln!(f, "kappa = {}", self.kappa)?;
        writeln!(f, "x0 = {:.17e}", self.point.0)?;
        writeln!(f, "y0 = {:.17e}", self.point.1)?;
        writeln!(f, "g = {:.6e}", self.value)?;
        writeln!(f, "grad_x = {:.6e}", self.gradient.0)?;
        writeln!(f, "grad_y = {:.6e}", self.gradient.1)?;
        writeln!(f, "grad_norm = {:.6e}", self.gradient_norm)?;
        writeln!(f, "hessian_xx = {:.17e}", self.hessian[0][0])?;
        writeln!(f, "hessian_xy = {:.17e}", self.hessian[0][1])?;
        writeln!(f, "hessian_yy = {:.17e}", self.hessian[1][1])?;
        writeln!(f, "det = {:.17e}", self.determinant)?;
        writeln!(f, "det_closed_form = {:.17e}", self.determinant_closed_form)?;
        writeln!(f, "det_rel_error = {:.6e}", self.determinant_rel_error())?;
        writeln!(f, "negative_definite = {}", self.negative_definite)?;
        writeln!(f, "h = {:.17e}", self.h_value)?;
        writeln!(f, "h_closed_form = {:.17e}", self.h_closed_form)?;
        if let Some(s) = &self.search {
            writeln!(f, "grid_resolution = {}", s.resolution)?;
            writeln!(f, "exclusion_radius = {}", s.exclusion_radius)?;
            writeln!(f, "max_x = {:.17e}", s.max_point.0)?;
            writeln!(f, "max_y = {:.17e}", s.max_point.1)?;
            writeln!(f, "max_g = {:.6e}", s.max_value)?;
            writeln!(f, "outside_x = {:.17e}", s.outside_point.0)?;
            writeln!(f, "outside_y = {:.17e}", s.outside_point.1)?;
            writeln!(f, "outside_g = {:.6e}", s.outside_value)?;
            writeln!(f, "cutoff = {:.17e}", s.cutoff)?;
            writeln!(f, "g1_max = {:.6e}", s.g1_max)?;
            writeln!(f, "g2_max = {:.6e}", s.g2_max)?;
        }
        writeln!(f, "global_max_verified = {}", self.global_max_verified())
    }
}

fn check_definite_regime(d: u32, kappa: u32) -> Result<()> {
    check_d_for_g(d)?;
    check_kappa(kappa)?;
    if d <= 2 * (1 + kappa) {
        return Err(Error::invalid(format!("d = {d} must exceed 2(1+κ) = {}", 2 * (1 + kappa))));
    }
    Ok(())
}

/// Evaluates `g`, its gradient and Hessian at `(x₀, y₀)`.
pub fn critical_point_report(d: u32, kappa: u32) -> Result<CriticalPointReport> {
    check_definite_regime(d, kappa)?;
    let (x0, y0) = critical_point(d);
    let gradient = grad_g(x0, y0, d, kappa)?;
    let hessian = hessian_g(x0, y0, d, kappa)?;
    let determinant = hessian[0][0] * hessian[1][1] - hessian[0][1] * hessian[1][0];
    Ok(CriticalPointReport {
        d,
        kappa,
        point: (x0, y0),
        value: g(x0, y0, d, kappa)?,
        gradient,
        gradient_norm: gradient.0.hypot(gradient.1),
        hessian,
        determinant,
        determinant_closed_form: hessian_det_closed_form(d, kappa),
        negative_definite: hessian[0][0] < 0.0 && determinant > 0.0,
        h_value: h(x0, y0, d)?,
        h_closed_form: h_at_critical_closed_form(d),
        search: None,
    })
}

/// Grid point `(i, j)` of the triangle `T` at the given resolution.
fn grid_point(i: usize, j: usize, res: usize) -> (f64, f64) {
    let x = 0.5 * i as f64 / res as f64;
    let y = x + (1.0 - 2.0 * x) * j as f64 / res as f64;
    (x, y.min(1.0 - x))
}

/// Values of `g` on the `(resolution+1)²` grid covering `T`, in row order.
pub fn g_grid(d: u32, kappa: u32, resolution: usize) -> Result<Vec<(f64, f64, f64)>> {
    check_d_for_g(d)?;
    let (df, k) = (d as f64, kappa as f64);
    Ok((0..=resolution)
        .into_par_iter()
        .flat_map_iter(|i| {
            (0..=resolution).map(move |j| {
                let (x, y) = grid_point(i, j, resolution);
                (x, y, g_unchecked(x, y, df, k))
            })
        })
        .collect())
}

fn clamp_to_t(x: f64, y: f64) -> (f64, f64) {
    let x = x.clamp(0.0, 0.5);
    let y = y.clamp(x, 1.0 - x);
    (x, y)
}

/// Pattern-search refinement of a maximum of `g` restricted to points
/// accepted by `keep`.
fn refine(
    start: (f64, f64, f64),
    step: f64,
    df: f64,
    k: f64,
    keep: &dyn Fn(f64, f64) -> bool,
) -> (f64, f64, f64) {
    let mut best = start;
    let mut step = step;
    while step > 1e-12 {
        let mut improved = false;
        for (dx, dy) in [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0), (1.0, 1.0), (-1.0, -1.0), (1.0, -1.0), (-1.0, 1.0)] {
            let (x, y) = clamp_to_t(best.0 + dx * step, best.1 + dy * step);
            if !keep(x, y) {
                continue;
            }
            let v = g_unchecked(x, y, df, k);
            if v > best.2 {
                best = (x, y, v);
                improved = true;
            }
        }
        if !improved {
            step /= 2.0;
        }
    }
    best
}

/// Dense grid search over `T` plus local refinement, together with the
/// analytic report at `(x₀, y₀)` and samples of the boundary functions
/// `g₁`, `g₂` on `(0, 1/(2(3+2κ))]`.
pub fn verify_global_max(d: u32, kappa: u32, resolution: usize) -> Result<CriticalPointReport> {
    const RADIUS: f64 = 0.01;
    const TOLERANCE: f64 = 1e-6;
    const BOUNDARY_SAMPLES: usize = 1000;
    if resolution < 200 {
        return Err(Error::invalid(format!("grid resolution {resolution} is below 200")));
    }
    let mut report = critical_point_report(d, kappa)?;
    let (x0, y0) = report.point;
    let (df, k) = (d as f64, kappa as f64);
    let grid = g_grid(d, kappa, resolution)?;

    let outside = |x: f64, y: f64| (x - x0).hypot(y - y0) >= RADIUS;
    let anywhere = |_: f64, _: f64| true;
    let argmax = |filter: &dyn Fn(f64, f64) -> bool| {
        grid.iter()
            .copied()
            .filter(|&(x, y, _)| filter(x, y))
            .fold((f64::NAN, f64::NAN, f64::NEG_INFINITY), |b, c| if c.2 > b.2 { c } else { b })
    };
    let step = 0.5 / resolution as f64;
    let overall = refine(argmax(&anywhere), step, df, k, &anywhere);
    let outer = refine(argmax(&outside), step, df, k, &outside);

    let cutoff = y_cutoff(kappa);
    let sample = |f: &dyn Fn(f64) -> f64| {
        (1..=BOUNDARY_SAMPLES)
            .map(|i| f(cutoff * i as f64 / BOUNDARY_SAMPLES as f64))
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let g1_max = sample(&|y| g_unchecked(0.0, y, df, k));
    let g2_max = sample(&|y| g_unchecked(y, y, df, k));

    report.search = Some(GlobalSearch {
        resolution,
        exclusion_radius: RADIUS,
        tolerance: TOLERANCE,
        max_point: (overall.0, overall.1),
        max_value: overall.2,
        outside_point: (outer.0, outer.1),
        outside_value: outer.2,
        cutoff,
        boundary_samples: BOUNDARY_SAMPLES,
        g1_max,
        g2_max,
    });
    Ok(report)
}

// ---------------------------------------------------------------------------
// variance

/// `√(d/(d−2(κ+1)))`, the limit of `E(H²)/E(H)²`.
pub fn variance_ratio_bound(d: u32, kappa: u32) -> Result<f64> {
    check_kappa(kappa)?;
    if d <= 2 * (kappa + 1) {
        return Err(Error::invalid(format!("d = {d} must exceed 2(κ+1) = {}", 2 * (kappa + 1))));
    }
    let (d, k) = (d as f64, kappa as f64);
    Ok((d / (d - 2.0 * (k + 1.0))).sqrt())
}

/// `1 − 3κ/d`, the stated lower bound on the probability that `Λ_d` has a
/// loose Hamilton cycle.
pub fn hc_probability_bound(d: u32, kappa: u32) -> Result<f64> {
    variance_ratio_bound(d, kappa)?;
    Ok(1.0 - 3.0 * kappa as f64 / d as f64)
}

/// Smallest even `d > 2(κ+1)` such that `2 − √(d/(d−2(κ+1))) ≥ 1 − 3κ/d`
/// holds for every even `d'` from `d` up to `limit`.
pub fn hc_bound_threshold(kappa: u32, limit: u32) -> Result<Option<u32>> {
    check_kappa(kappa)?;
    let start = 2 * (kappa + 1) + 2;
    let mut threshold = None;
    let mut d = start;
    while d <= limit {
        let holds = 2.0 - variance_ratio_bound(d, kappa)? >= hc_probability_bound(d, kappa)?;
        match (holds, threshold) {
            (true, None) => threshold = Some(d),
            (false, _) => threshold = None,
            _ => {}
        }
        d += 2;
    }
    Ok(threshold)
}

/// Finite-size evaluation of `1/E(H) + Σ_b N(b) p_2m(b) r_2m(b) / (a_2m p_2m² q_2m²)`.
#[derive(Clone, Debug, PartialEq)]
pub struct VarianceSum {
    pub m: u64,
    pub d: u32,
    pub kappa: u32,
    pub inverse_expectation: f64,
    /// The double sum over `(a, b)`.
    pub sum: f64,
    pub total: f64,
    pub limit: f64,
    /// Location of the largest summand.
    pub dominant: (u64, u64),
    /// Share of the double sum carried by `a = 0`, `a = b` or `a + b = 2m`.
    pub boundary_share: f64,
    /// The `b = 0` summand.
    pub b0_term: f64,
}

impl VarianceSum {
    /// `(a, b) / (2m)` of the dominant summand.
    pub fn dominant_point(&self) -> (f64, f64) {
        let two_m = 2.0 * self.m as f64;
        (self.dominant.0 as f64 / two_m, self.dominant.1 as f64 / two_m)
    }

    pub fn relative_to_limit(&self) -> f64 {
        self.total / self.limit
    }
}

impl fmt::Display for VarianceSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (x, y) = self.dominant_point();
        writeln!(f, "m = {}", self.m)?;
        writeln!(f, "d = {}", self.d)?;
        writeln!(f, "kappa = {}", self.kappa)?;
        writeln!(f, "inverse_expectation = {:.6e}", self.inverse_expectation)?;
        writeln!(f, "double_sum = {:.12}", self.sum)?;
        writeln!(f, "total = {:.12}", self.total)?;
        writeln!(f, "limit = {:.12}", self.limit)?;
        writeln!(f, "ratio_to_limit = {:.12}", self.relative_to_limit())?;
        writeln!(f, "dominant_a = {}", self.dominant.0)?;
        writeln!(f, "dominant_b = {}", self.dominant.1)?;
        writeln!(f, "dominant_x = {x:.6}")?;
        writeln!(f, "dominant_y = {y:.6}")?;
        writeln!(f, "boundary_share = {:.6e}", self.boundary_share)?;
        writeln!(f, "b0_term = {:.6e}", self.b0_term)
    }
}

/// Evaluates the second-moment ratio bound at finite `m`, including the
/// boundary cases `a = 0`, `a = b`, `a + b = 2m` and reporting their share.
pub fn variance_sum_upper(m: u64, d: u32, kappa: u32) -> Result<VarianceSum> {
    check_m(m)?;
    check_even_d(d, 6)?;
    let limit = variance_ratio_bound(d, kappa)?;
    let ln_a = ln_a_2m(m, d)?;
    let ln_p = ln_p_2m(m, d)?;
    let ln_q = ln_q_2m(m, kappa, d)?;
    let ln_expectation = ln_a + ln_p + ln_q;
    let denominator = ln_a + 2.0 * ln_p + 2.0 * ln_q;

    let mut terms: Vec<(u64, u64, f64)> = Vec::new();
    for b in 0..2 * m {
        let ln_pr = ln_p_2m_b(m, d, b)? + ln_r_2m_b(m, kappa, d, b)? - denominator;
        for a in 0..=b.min(2 * m - b) {
            if let Some(t) = ln_n_b_term(m, d, a, b) {
                terms.push((a, b, t + ln_pr));
            }
        }
    }
    let &(da, db, max) = terms
        .iter()
        .fold(&(0, 0, f64::NEG_INFINITY), |best, t| if t.2 > best.2 { t } else { best });
    let mut scaled = 0.0;
    let mut boundary = 0.0;
    let mut b0 = 0.0;
    for &(a, b, t) in &terms {
        let v = (t - max).exp();
        scaled += v;
        if a == 0 || a == b || a + b == 2 * m {
            boundary += v;
        }
        if b == 0 {
            b0 += v;
        }
    }
    let scale = max.exp();
    let sum = scaled * scale;
    let inverse_expectation = (-ln_expectation).exp();
    Ok(VarianceSum {
        m,
        d,
        kappa,
        inverse_expectation,
        sum,
        total: inverse_expectation + sum,
        limit,
        dominant: (da, db),
        boundary_share: boundary / scaled,
        b0_term: b0 * scale,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamilton::brute_force_n_b;
    use rand::Rng as _;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn a_2m_values() {
        assert_eq!(a_2m(1, 3).unwrap(), BigUint::from(18u32));
        assert_eq!(a_2m(2, 2).unwrap(), BigUint::from(48u32));
        assert_eq!(a_2m(2, 3).unwrap(), BigUint::from(3888u32));
        for (m, d) in [(1, 3), (5, 6), (40, 10), (200, 10)] {
            assert!(rel(ln_big(&a_2m(m, d).unwrap()), ln_a_2m(m, d).unwrap()) < 1e-9);
        }
    }

    #[test]
    fn small_probabilities() {
        let e = std::f64::consts::E;
        assert!(rel(ln_p_2m(1, 4).unwrap().exp(), e * 3.0 / 105.0) < 1e-12);
        assert!(rel(ln_q_2m(1, 1, 4).unwrap().exp(), 4.0 / 6.0) < 1e-12);
        for (m, d) in [(1, 4), (3, 6), (50, 10)] {
            let r = ln_p_2m_b(m, d, 2 * m).unwrap() - ln_p_2m(m, d).unwrap();
            assert!((r - 1.0).abs() < 1e-9);
        }
        assert!(ln_p_2m_b(2, 2, 0).is_err());
        assert!(ln_p_2m_b(2, 4, 5).is_err());
    }

    #[test]
    fn double_factorial_modes_agree() {
        for n in [-1i64, 1, 7, 39, 1999, 7999] {
            let exact = ln_big(&big_odd_double_factorial(n).max(BigUint::one()));
            let float = ln_odd_double_factorial(n);
            assert!((exact - float).abs() <= 1e-9 * exact.abs().max(1.0), "n={n}");
        }
        assert_eq!(big_odd_double_factorial(7), BigUint::from(105u32));
        assert_eq!(big_binomial(10, 3), BigUint::from(120u32));
    }

    #[test]
    fn expectation_ratio_regimes() {
        assert!(expectation_ratio(16, 1) > 1.0);
        assert!((expectation_ratio(4, 1) - 0.75).abs() < 1e-15);
    }

    #[test]
    fn expectation_modes_and_stirling() {
        let mut prev = f64::INFINITY;
        for m in [50, 100, 200] {
            let e = expected_h_asym(m, 10, 1).unwrap();
            assert!(rel(e.ln_product, e.ln_product_float) < 1e-9);
            let gap = (e.ln_product - e.ln_asymptotic).abs() / (2 * m) as f64;
            assert!(gap < prev, "m={m}: {gap}");
            prev = gap;
        }
    }

    #[test]
    fn n_b_matches_brute_force_compatible_counts() {
        for d in [3u32, 4] {
            let brute = brute_force_n_b(2, d as usize).unwrap();
            for b in 0..4u64 {
                assert_eq!(n_b(2, d, b).unwrap(), BigUint::from(brute.compatible[b as usize]), "d={d} b={b}");
            }
        }
    }

    #[test]
    fn n_b_modes_agree() {
        for (m, d) in [(2, 4), (5, 6), (30, 10)] {
            for b in 0..2 * m {
                let exact = n_b(m, d, b).unwrap();
                if exact.is_zero() {
                    assert_eq!(ln_n_b(m, d, b).unwrap(), f64::NEG_INFINITY);
                } else {
                    let l = ln_big(&exact);
                    assert!((l - ln_n_b(m, d, b).unwrap()).abs() <= 1e-9 * l.abs().max(1.0));
                }
            }
        }
        assert!(n_b(2, 4, 4).is_err());
        // the a = b = 0 convention gives a nonzero b = 0 count
        assert!(!n_b(3, 6, 0).unwrap().is_zero());
    }

    #[test]
    fn critical_point_values() {
        for d in [6, 8, 10, 12] {
            for kappa in 1..=3 {
                if d <= 2 * (1 + kappa) {
                    assert!(critical_point_report(d, kappa).is_err());
                    continue;
                }
                let r = critical_point_report(d, kappa).unwrap();
                assert!(r.value.abs() <= 1e-10, "{r}");
                assert!(r.gradient_norm <= 1e-10, "{r}");
                assert!(r.determinant_rel_error() <= 1e-9, "{r}");
                assert!(r.negative_definite);
                assert!(rel(r.h_value, r.h_closed_form) < 1e-12);
            }
        }
        assert!((h_at_critical_closed_form(6) - 5.0 * 36.0 / (8.0 * 3f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn determinant_sign_at_definiteness_boundary() {
        let k = 2;
        let d = 2 * (1 + k);
        let (x0, y0) = critical_point(d);
        let hm = hessian_g(x0, y0, d, k).unwrap();
        let det = hm[0][0] * hm[1][1] - hm[0][1] * hm[1][0];
        assert!(det.abs() < 1e-9 * hm[0][0].abs().powi(2));
        assert!(critical_point_report(d, k).is_err());
        assert!(critical_point_report(d + 2, k).unwrap().negative_definite);
    }

    #[test]
    fn finite_differences() {
        let mut rng = crate::rng::rng_from_seed(7);
        let (d, k) = (10, 1);
        let step = 1e-6;
        let mut n = 0;
        while n < 20 {
            let x: f64 = rng.random_range(0.02..0.48);
            let y: f64 = rng.random_range(x + 0.02..1.0 - x - 0.02);
            if !in_open_domain(x, y) {
                continue;
            }
            n += 1;
            let gr = grad_g(x, y, d, k).unwrap();
            let fx = (g(x + step, y, d, k).unwrap() - g(x - step, y, d, k).unwrap()) / (2.0 * step);
            let fy = (g(x, y + step, d, k).unwrap() - g(x, y - step, d, k).unwrap()) / (2.0 * step);
            assert!((fx - gr.0).abs() <= 1e-5 * gr.0.abs().max(1.0));
            assert!((fy - gr.1).abs() <= 1e-5 * gr.1.abs().max(1.0));
            let hm = hessian_g(x, y, d, k).unwrap();
            let gp = grad_g(x + step, y, d, k).unwrap();
            let gm = grad_g(x - step, y, d, k).unwrap();
            let hxx = (gp.0 - gm.0) / (2.0 * step);
            let hxy = (gp.1 - gm.1) / (2.0 * step);
            assert!((hxx - hm[0][0]).abs() <= 1e-5 * hm[0][0].abs().max(1.0));
            assert!((hxy - hm[0][1]).abs() <= 1e-5 * hm[0][1].abs().max(1.0));
            assert_eq!(hm[0][1], hm[1][0]);
        }
    }

    #[test]
    fn continuous_extension_at_origin() {
        let (d, k) = (10, 1);
        let origin = g(0.0, 0.0, d, k).unwrap();
        let along_diag = g(1e-12, 1e-12, d, k).unwrap();
        let along_axis = g(0.0, 1e-12, d, k).unwrap();
        assert!((origin - along_diag).abs() < 1e-8);
        assert!((origin - along_axis).abs() < 1e-8);
        assert!(g(0.3, 0.2, d, k).is_err());
        assert!(g(0.6, 0.7, d, k).is_err());
        assert!(grad_g(0.0, 0.2, d, k).is_err());
    }

    #[test]
    fn g3_closed_form_matches_direct() {
        for d in [20, 50, 100] {
            let direct = g3(2.0 / d as f64, d, 1).unwrap();
            assert!((direct - g3_at_two_over_d(d)).abs() < 1e-12);
            assert!(g3_at_two_over_d(d) < 0.0);
        }
    }

    #[test]
    fn g2_second_derivative_negative() {
        let (d, k) = (50, 1);
        let c = y_cutoff(k);
        for i in 1..=1000 {
            assert!(g2_second_derivative(c * i as f64 / 1000.0, d, k) < 0.0);
        }
    }

    #[test]
    fn psi_root_and_sign_change() {
        for d in [20, 50] {
            for k in [1, 2] {
                let r = verify_psi_root(d, k, 1000).unwrap();
                assert!(r.relative_residual <= 1e-8, "{r}");
                assert!(rel(r.x_of_y0, critical_point(d).0) < 1e-9);
                assert!(r.eliminated_residual.abs() < 1e-9);
            }
        }
        let (d, k) = (50, 1);
        let y0 = 2.0 / d as f64;
        assert!(psi_y(y0 / 2.0, d, k) > 0.0);
        assert!(psi_y((2.0 * y0).min(y_cutoff(k)), d, k) < 0.0);
        assert!(verify_psi_root(d, k, 1000).unwrap().strictly_decreasing());
    }

    #[test]
    fn bounds() {
        assert!((variance_ratio_bound(10, 1).unwrap() - 1.290_994_448_735_805_6).abs() < 1e-12);
        assert!(2.0 - variance_ratio_bound(100, 1).unwrap() >= hc_probability_bound(100, 1).unwrap());
        assert!((variance_ratio_bound(1_000_000, 1).unwrap() - 1.0).abs() < 1e-5);
        assert!(variance_ratio_bound(4, 1).is_err());
        let d0 = hc_bound_threshold(1, 10_000).unwrap().unwrap();
        assert!(d0 <= 100);
    }

    #[test]
    fn variance_sum_small() {
        let v = variance_sum_upper(5, 10, 1).unwrap();
        assert!(v.b0_term <= v.sum);
        assert!(v.total > 0.0 && v.boundary_share >= 0.0 && v.boundary_share <= 1.0);
    }
}
