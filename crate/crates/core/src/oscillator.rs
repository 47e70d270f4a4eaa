//! Harmonic-oscillator eigenfunctions and the quadrature rules built on them.
//!
//! The orbitals are the dimensionless eigenfunctions of `-½ d²/dx² + ½ x²`,
//!
//! ```text
//! χ_n(x) = (2ⁿ n! √π)^{-1/2} H_n(x) e^{-x²/2},
//! ```
//!
//! always evaluated through the normalized three-term recurrence so that no
//! factorial or raw Hermite polynomial is ever formed.

use std::f64::consts::PI;

use crate::error::{invalid, Error, Result};

/// Largest supported Gauss–Hermite order (and orbital index bound).
pub const MAX_ORDER: usize = 512;

/// π^{-1/4}, the value of χ₀ at the origin.
pub const PI_M_QUARTER: f64 = 0.751_125_544_464_942_5;

/// A Gauss–Hermite rule for the weight function `e^{-x²}`.
///
/// Nodes are stored in ascending order. Alongside the raw weights the rule
/// keeps `w_i e^{x_i²}`, computed directly in normalized form so it stays
/// finite at orders where the raw outer weights underflow.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    scaled_weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Weights multiplied by `e^{+x²}`, for integrands that already carry
    /// their own Gaussian decay.
    pub fn scaled_weights(&self) -> &[f64] {
        &self.scaled_weights
    }

    /// `Σ w_i f(x_i)`, approximating `∫ e^{-x²} f(x) dx`.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Builds the Gauss–Hermite rule of the given order.
///
/// Roots are found by Newton iteration on the normalized Hermite functions,
/// seeded with the classical asymptotic guesses from the largest root inward;
/// the negative half is the mirror image of the positive half.
pub fn gauss_hermite_rule(order: usize) -> Result<QuadratureRule> {
    if order == 0 || order > MAX_ORDER {
        return invalid(format!(
            "Gauss-Hermite order must be in 1..={MAX_ORDER}, got {order}"
        ));
    }
    let n = order;
    let nf = n as f64;
    let half = (n + 1) / 2;
    // Positive roots, largest first.
    let mut roots: Vec<f64> = Vec::with_capacity(half);
    let mut z = 0.0_f64;
    for i in 0..half {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.855_75 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * roots[0],
            3 => 1.91 * z - 0.91 * roots[1],
            _ => 2.0 * z - roots[i - 2],
        };
        if n % 2 == 1 && i == half - 1 {
            z = 0.0;
        } else {
            z = newton_hermite_root(n, z)?;
        }
        roots.push(z);
    }

    let mut nodes = Vec::with_capacity(n);
    let mut scaled_weights = Vec::with_capacity(n);
    for &r in &roots {
        nodes.push(-r);
    }
    for &r in roots.iter().rev().skip(n % 2) {
        nodes.push(r);
    }
    for &x in &nodes {
        let (_, prev) = hermite_pair(n, x);
        scaled_weights.push(1.0 / (nf * prev * prev));
    }
    let weights = nodes
        .iter()
        .zip(&scaled_weights)
        .map(|(&x, &s)| s * (-x * x).exp())
        .collect();
    Ok(QuadratureRule {
        nodes,
        weights,
        scaled_weights,
    })
}

fn newton_hermite_root(n: usize, mut z: f64) -> Result<f64> {
    let scale = (2.0 * n as f64).sqrt();
    for _ in 0..100 {
        let (p, prev) = hermite_pair(n, z);
        let dp = scale * prev - z * p;
        let dz = p / dp;
        z -= dz;
        if dz.abs() <= 1e-15 * z.abs().max(1.0) {
            let (p, _) = hermite_pair(n, z);
            if p.abs() < 1e-13 {
                return Ok(z);
            }
        }
    }
    Err(Error::NumericalFailure(format!(
        "Hermite root iteration did not converge for order {n} near {z}"
    )))
}

/// Returns `(χ_n(x), χ_{n-1}(x))`; for `n == 0` the second entry is 0.
fn hermite_pair(n: usize, x: f64) -> (f64, f64) {
    let mut prev = 0.0;
    let mut cur = PI_M_QUARTER * (-0.5 * x * x).exp();
    for k in 0..n {
        let kf = k as f64;
        let next = x * (2.0 / (kf + 1.0)).sqrt() * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    (cur, prev)
}

/// Fills `out[k] = χ_k(x)` for `k < out.len()`.
pub fn ho_fill(x: f64, out: &mut [f64]) {
    let Some(first) = out.first_mut() else {
        return;
    };
    *first = PI_M_QUARTER * (-0.5 * x * x).exp();
    if out.len() > 1 {
        out[1] = std::f64::consts::SQRT_2 * x * out[0];
    }
    for k in 1..out.len().saturating_sub(1) {
        let kf = k as f64;
        out[k + 1] = x * (2.0 / (kf + 1.0)).sqrt() * out[k] - (kf / (kf + 1.0)).sqrt() * out[k - 1];
    }
}

/// `χ_k(x)` for `k = 0..count`.
pub fn ho_table(x: f64, count: usize) -> Vec<f64> {
    let mut out = vec![0.0; count];
    ho_fill(x, &mut out);
    out
}

/// The oscillator eigenfunction `χ_n(x)`.
pub fn ho_eigenfunction(n: usize, x: f64) -> f64 {
    debug_assert!(n < MAX_ORDER);
    hermite_pair(n, x).0
}

/// `(χ_n(x), χ_n'(x), χ_n''(x))`.
///
/// The first derivative comes from the ladder identity and the second from
/// the oscillator equation itself.
pub fn ho_derivatives(n: usize, x: f64) -> (f64, f64, f64) {
    debug_assert!(n < MAX_ORDER);
    let t = ho_table(x, n + 2);
    let nf = n as f64;
    let below = if n == 0 { 0.0 } else { t[n - 1] };
    let d1 = (nf / 2.0).sqrt() * below - ((nf + 1.0) / 2.0).sqrt() * t[n + 1];
    let d2 = (x * x - 2.0 * nf - 1.0) * t[n];
    (t[n], d1, d2)
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, ascending.
pub fn gauss_legendre(order: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if order == 0 || order > 4096 {
        return invalid(format!("Gauss-Legendre order must be in 1..=4096, got {order}"));
    }
    let n = order;
    let nf = n as f64;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for iter in 0.. {
            let (p, pm1) = legendre_pair(n, z);
            dp = nf * (z * p - pm1) / (z * z - 1.0);
            let dz = p / dp;
            z -= dz;
            if dz.abs() <= 1e-16 || iter == 100 {
                break;
            }
        }
        if n % 2 == 1 && i == n / 2 {
            z = 0.0;
            let (p, pm1) = legendre_pair(n, z);
            dp = nf * (z * p - pm1) / (z * z - 1.0);
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    Ok((nodes, weights))
}

fn legendre_pair(n: usize, x: f64) -> (f64, f64) {
    let mut prev = 0.0;
    let mut cur = 1.0;
    for k in 0..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0) * x * cur - kf * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    (cur, prev)
}

/// A rule for `∫₀^L g(x) dx` whose nodes cluster quadratically at the origin.
///
/// Built from Gauss–Legendre on `t ∈ [0, 1]` under `x = L t²`. Integrands with
/// structure on a short length scale near `x = 0` (a regularized Coulomb
/// spike, a pair-coalescence boundary layer) converge rapidly on it, while
/// Gauss–Hermite nodes are far too coarse there.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfLineRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    length: f64,
}

impl HalfLineRule {
    pub fn graded(order: usize, length: f64) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) {
            return invalid(format!("half-line rule length must be positive, got {length}"));
        }
        let (t, w) = gauss_legendre(order)?;
        let mut nodes = Vec::with_capacity(order);
        let mut weights = Vec::with_capacity(order);
        for (&ti, &wi) in t.iter().zip(&w) {
            let s = 0.5 * (ti + 1.0);
            nodes.push(length * s * s);
            weights.push(0.5 * wi * 2.0 * length * s);
        }
        Ok(Self {
            nodes,
            weights,
            length,
        })
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const SQRT_PI: f64 = 1.772_453_850_905_516;

    fn gamma_half_moment(k: usize) -> f64 {
        // ∫ x^k e^{-x²} dx = Γ((k+1)/2) for even k, 0 for odd k.
        if k % 2 == 1 {
            return 0.0;
        }
        // Γ(m + 1/2) = (2m-1)!! / 2^m √π
        let m = k / 2;
        let mut v = SQRT_PI;
        for j in 0..m {
            v *= (2 * j + 1) as f64 / 2.0;
        }
        v
    }

    #[test]
    fn low_orders_match_closed_form() {
        let r1 = gauss_hermite_rule(1).unwrap();
        assert_eq!(r1.nodes(), &[0.0]);
        assert_abs_diff_eq!(r1.weights()[0], SQRT_PI, epsilon = 1e-14);

        let r2 = gauss_hermite_rule(2).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(r2.nodes()[0], -h, epsilon = 1e-14);
        assert_abs_diff_eq!(r2.nodes()[1], h, epsilon = 1e-14);
        for &w in r2.weights() {
            assert_abs_diff_eq!(w, SQRT_PI / 2.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn order_out_of_range_is_rejected() {
        assert!(matches!(gauss_hermite_rule(0), Err(Error::InvalidArgument(_))));
        assert!(matches!(
            gauss_hermite_rule(MAX_ORDER + 1),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn second_moment_order_40() {
        let r = gauss_hermite_rule(40).unwrap();
        assert_abs_diff_eq!(r.integrate(|x| x * x), SQRT_PI / 2.0, epsilon = 1e-10);
    }

    #[test]
    fn rules_are_symmetric_sorted_and_normalized() {
        for order in [1, 2, 3, 7, 16, 40, 64, 97, 128, 200, 256, 400, 512] {
            let r = gauss_hermite_rule(order).unwrap();
            let x = r.nodes();
            for i in 0..order {
                assert!((x[i] + x[order - 1 - i]).abs() < 1e-12, "order {order}");
                if i > 0 {
                    assert!(x[i] > x[i - 1], "order {order} not increasing");
                }
                let (p, _) = hermite_pair(order, x[i]);
                assert!(p.abs() < 1e-13, "order {order} residual {p}");
            }
            let total: f64 = r.weights().iter().sum();
            assert!((total - SQRT_PI).abs() < 1e-10, "order {order}: {total}");
        }
    }

    #[test]
    fn monomials_integrated_exactly() {
        for order in [5, 8, 11, 20] {
            let r = gauss_hermite_rule(order).unwrap();
            for k in 0..=20.min(2 * order - 1) {
                let exact = gamma_half_moment(k);
                let got = r.integrate(|x| x.powi(k as i32));
                let magnitude = r.integrate(|x| x.abs().powi(k as i32));
                assert!(
                    (got - exact).abs() <= 1e-13 * magnitude.max(1.0),
                    "order {order} k {k}: {got} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn orbitals_are_orthonormal() {
        let r = gauss_hermite_rule(40).unwrap();
        let tables: Vec<Vec<f64>> = r.nodes().iter().map(|&x| ho_table(x, 15)).collect();
        for m in 0..15 {
            for n in 0..15 {
                let s: f64 = tables
                    .iter()
                    .zip(r.scaled_weights())
                    .map(|(t, &w)| w * t[m] * t[n])
                    .sum();
                let expected = if m == n { 1.0 } else { 0.0 };
                assert!((s - expected).abs() < 1e-9, "({m},{n}) = {s}");
            }
        }
    }

    #[test]
    fn eigenfunction_reference_values() {
        assert_abs_diff_eq!(ho_eigenfunction(0, 0.0), PI_M_QUARTER, epsilon = 1e-15);
        assert_eq!(ho_eigenfunction(1, 0.0), 0.0);
        // 40-digit evaluation of the defining formula with H₇.
        assert_abs_diff_eq!(
            ho_eigenfunction(7, 1.3),
            0.406_098_664_251_905_4,
            epsilon = 1e-12
        );
    }

    #[test]
    fn parity_is_exact() {
        for n in 0..40 {
            for &x in &[0.1, 0.77, 1.9, 3.3, 6.0] {
                let a = ho_eigenfunction(n, x);
                let b = ho_eigenfunction(n, -x);
                let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                assert!((a - sign * b).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn derivatives_at_origin() {
        let (v, d1, d2) = ho_derivatives(0, 0.0);
        assert_abs_diff_eq!(v, PI_M_QUARTER, epsilon = 1e-15);
        assert_eq!(d1, 0.0);
        assert_abs_diff_eq!(d2, -PI_M_QUARTER, epsilon = 1e-15);

        let (v, d1, d2) = ho_derivatives(1, 0.0);
        assert_eq!(v, 0.0);
        assert_abs_diff_eq!(d1, 1.062_251_932_027_196_9, epsilon = 1e-14);
        assert_eq!(d2, 0.0);
        let h = 1e-5;
        let fd = (ho_eigenfunction(1, h) - ho_eigenfunction(1, -h)) / (2.0 * h);
        assert_abs_diff_eq!(d1, fd, epsilon = 1e-8);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let h = 1e-4;
        for n in 0..=15 {
            for &x in &[-2.0, 0.7, 3.1] {
                let (v, d1, d2) = ho_derivatives(n, x);
                assert_abs_diff_eq!(v, ho_eigenfunction(n, x), epsilon = 1e-15);
                let f = |y| ho_eigenfunction(n, y);
                let fd1 = (f(x + 1e-5) - f(x - 1e-5)) / 2e-5;
                let fd2 = (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
                assert!((d1 - fd1).abs() < 1e-8, "n {n} x {x}: {d1} vs {fd1}");
                assert!((d2 - fd2).abs() < 1e-6, "n {n} x {x}: {d2} vs {fd2}");
            }
        }
    }

    #[test]
    fn table_agrees_with_single_evaluation() {
        let t = ho_table(1.7, 30);
        for (n, &v) in t.iter().enumerate() {
            assert_eq!(v, ho_eigenfunction(n, 1.7));
        }
    }

    #[test]
    fn legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(12).unwrap();
        for k in 0..24 {
            let got: f64 = x.iter().zip(&w).map(|(&x, &w)| w * x.powi(k)).sum();
            let exact = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
            assert_abs_diff_eq!(got, exact, epsilon = 1e-14);
        }
    }

    #[test]
    fn graded_rule_resolves_narrow_peak() {
        // ∫₀^∞ e^{-x/ε} dx = ε with ε much smaller than the node spacing of
        // any comparable Gauss-Hermite rule.
        let eps = 0.05;
        let rule = HalfLineRule::graded(64, 40.0).unwrap();
        assert_abs_diff_eq!(rule.integrate(|x| (-x / eps).exp()), eps, epsilon = 1e-12);
        assert_abs_diff_eq!(
            rule.integrate(|x| (-x * x).exp()),
            SQRT_PI / 2.0,
            epsilon = 1e-13
        );
    }
}
