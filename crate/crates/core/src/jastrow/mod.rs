//! The pair-product trial wavefunction
//!
//! ```text
//! ψ(x₁…x_N) = Π_k e^{-x_k²/2} · Π_{i<j} f((x_i − x_j)/√2),   f(u) = e^{u²/2} φ(αu),
//! ```
//!
//! where `φ` is the two-body relative ground state and `α` dilates it. The
//! module evaluates `log|ψ|`, the analytic local energy, the variational
//! energy by quadrature and the scan over `α`.

mod energy;
mod scan;

use std::f64::consts::FRAC_1_SQRT_2;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::twobody::{Parity, TwoBodySolution};

pub use energy::{
    energy_expectation, energy_expectation_hermite, sector_extent, EnergyEstimate,
    CONVERGENCE_TOL, MIN_QUAD_ORDER,
};
pub use scan::{scan_alpha, ScanPoint, ScanResult, ALPHA_MARGIN, GOLDEN_TOL};

/// Supported particle numbers.
pub const MAX_PARTICLES: usize = 4;

/// Slack added to the normalizability bound on α².
const NORMALIZABILITY_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Statistics {
    Bosons,
    Fermions,
}

impl Statistics {
    /// Parity the pair factor must have.
    pub fn pair_parity(self) -> Parity {
        match self {
            Statistics::Bosons => Parity::Even,
            Statistics::Fermions => Parity::Odd,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Statistics::Bosons => "bosons",
            Statistics::Fermions => "fermions",
        }
    }
}

impl std::fmt::Display for Statistics {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Statistics {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bosons" | "boson" => Ok(Statistics::Bosons),
            "fermions" | "fermion" => Ok(Statistics::Fermions),
            _ => invalid(format!("unknown statistics {s:?} (expected bosons or fermions)")),
        }
    }
}

/// `√max(0, 1 − 2/N)`: at or below this α the trial state is not
/// normalizable.
///
/// In centre-of-mass/relative form `ψ²` carries `exp(−(1 − (1−α²) N/2) ρ²)`
/// with `ρ² = Σ(x_k − x̄)²`, because `Σ_{i<j} (x_i − x_j)² = N ρ²`.
pub fn alpha_lower_bound(particles: usize) -> f64 {
    (1.0 - 2.0 / particles as f64).max(0.0).sqrt()
}

/// Log-derivatives of the pair factor at one argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairFactor {
    pub log_abs: f64,
    pub sign: f64,
    /// `f'/f`
    pub ratio1: f64,
    /// `f''/f`
    pub ratio2: f64,
}

/// `log|ψ|` and the sign of ψ; `sign == 0` marks a node, with
/// `log_abs == −∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogPsi {
    pub log_abs: f64,
    pub sign: i8,
}

impl LogPsi {
    pub fn is_node(&self) -> bool {
        self.sign == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JastrowAnsatz {
    particles: usize,
    statistics: Statistics,
    alpha: f64,
    pair: TwoBodySolution,
}

/// Per-pair quantities shared by `log ψ` and the local energy.
#[derive(Debug, Clone, Copy)]
struct PairTerms {
    log_abs: f64,
    negative: bool,
    ratio1: f64,
    /// `f''/f − (f'/f)²`, even in its argument.
    curvature: f64,
}

impl JastrowAnsatz {
    pub fn new(
        particles: usize,
        statistics: Statistics,
        alpha: f64,
        pair: TwoBodySolution,
    ) -> Result<Self> {
        if !(2..=MAX_PARTICLES).contains(&particles) {
            return invalid(format!(
                "particle number must be in 2..={MAX_PARTICLES}, got {particles}"
            ));
        }
        if pair.parity() != statistics.pair_parity() {
            return invalid(format!(
                "{statistics} need a {} pair solution, got {}",
                statistics.pair_parity().name(),
                pair.parity().name()
            ));
        }
        check_alpha(particles, alpha)?;
        Ok(Self {
            particles,
            statistics,
            alpha,
            pair,
        })
    }

    /// The same ansatz with a different scaling factor.
    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        check_alpha(self.particles, alpha)?;
        Ok(Self {
            alpha,
            ..self.clone()
        })
    }

    pub fn particles(&self) -> usize {
        self.particles
    }

    pub fn statistics(&self) -> Statistics {
        self.statistics
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn pair_solution(&self) -> &TwoBodySolution {
        &self.pair
    }

    fn pair_terms(&self, u: f64) -> Option<PairTerms> {
        let a = self.alpha;
        let v = self.pair.eval(a * u);
        if v.phi == 0.0 {
            return None;
        }
        let d1 = v.dphi / v.phi;
        let d2 = v.d2phi / v.phi;
        Some(PairTerms {
            log_abs: 0.5 * u * u + v.phi.abs().ln(),
            negative: v.phi < 0.0,
            ratio1: u + a * d1,
            curvature: 1.0 + a * a * (d2 - d1 * d1),
        })
    }

    /// `log|f(u)|`, its sign and the ratios `f'/f`, `f''/f`.
    pub fn pair_log_factor(&self, u: f64) -> Result<PairFactor> {
        let t = self.pair_terms(u).ok_or(Error::NodeSingularity(u))?;
        Ok(PairFactor {
            log_abs: t.log_abs,
            sign: if t.negative { -1.0 } else { 1.0 },
            ratio1: t.ratio1,
            ratio2: t.curvature + t.ratio1 * t.ratio1,
        })
    }

    pub fn log_psi(&self, config: &[f64]) -> LogPsi {
        assert_eq!(config.len(), self.particles, "configuration length");
        let mut log_abs = -0.5 * config.iter().map(|x| x * x).sum::<f64>();
        let mut negative = false;
        for i in 0..config.len() {
            for j in i + 1..config.len() {
                match self.pair_terms((config[i] - config[j]) * FRAC_1_SQRT_2) {
                    Some(t) => {
                        log_abs += t.log_abs;
                        negative ^= t.negative;
                    }
                    None => {
                        return LogPsi {
                            log_abs: f64::NEG_INFINITY,
                            sign: 0,
                        }
                    }
                }
            }
        }
        LogPsi {
            log_abs,
            sign: if negative { -1 } else { 1 },
        }
    }

    /// `(Hψ)/ψ` at a configuration that is not a node of ψ.
    ///
    /// Contact interactions contribute nothing pointwise here; their
    /// expectation is a boundary term handled by [`energy_expectation`].
    pub fn local_energy(&self, config: &[f64]) -> Result<f64> {
        assert_eq!(config.len(), self.particles, "configuration length");
        let n = self.particles;
        let mut grad = [0.0; MAX_PARTICLES];
        let mut lap = [-1.0; MAX_PARTICLES];
        let mut potential = 0.0;
        for k in 0..n {
            grad[k] = -config[k];
            potential += 0.5 * config[k] * config[k];
        }
        let inter = self.pair.interaction();
        for i in 0..n {
            for j in i + 1..n {
                let dx = config[i] - config[j];
                let u = dx * FRAC_1_SQRT_2;
                let t = self.pair_terms(u).ok_or(Error::NodeSingularity(u))?;
                let g = t.ratio1 * FRAC_1_SQRT_2;
                grad[i] += g;
                grad[j] -= g;
                lap[i] += 0.5 * t.curvature;
                lap[j] += 0.5 * t.curvature;
                potential += inter.smooth_part(dx);
            }
        }
        let kinetic: f64 = (0..n).map(|k| lap[k] + grad[k] * grad[k]).sum();
        Ok(potential - 0.5 * kinetic)
    }
}

fn check_alpha(particles: usize, alpha: f64) -> Result<()> {
    let bound = 1.0 - 2.0 / particles as f64 + NORMALIZABILITY_SLACK;
    if !(alpha.is_finite() && alpha > 0.0 && alpha * alpha > bound) {
        return invalid(format!(
            "alpha = {alpha} is not normalizable for N = {particles} (need alpha^2 > {bound:.6})"
        ));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interaction::Interaction;
    use crate::oscillator::PI_M_QUARTER;
    use crate::twobody::solve_relative;
    use approx::assert_abs_diff_eq;

    pub(crate) fn ansatz(
        n: usize,
        stats: Statistics,
        alpha: f64,
        inter: Interaction,
    ) -> JastrowAnsatz {
        let pair = solve_relative(&inter, 15, stats.pair_parity()).unwrap();
        JastrowAnsatz::new(n, stats, alpha, pair).unwrap()
    }

    fn lcg(seed: u64) -> impl FnMut() -> f64 {
        let mut state = seed;
        move || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        }
    }

    /// `(Hψ)/ψ` with a 7-point Laplacian on ψ itself.
    fn finite_difference_local_energy(a: &JastrowAnsatz, x: &[f64]) -> f64 {
        let h = 1e-4;
        let psi = |y: &[f64]| {
            let l = a.log_psi(y);
            f64::from(l.sign) * l.log_abs.exp()
        };
        let center = psi(x);
        let mut lap = 0.0;
        let mut y = x.to_vec();
        for k in 0..x.len() {
            let mut f = [0.0; 7];
            for (s, slot) in (-3..=3).zip(f.iter_mut()) {
                y[k] = x[k] + s as f64 * h;
                *slot = psi(&y);
            }
            y[k] = x[k];
            lap += (2.0 * (f[0] + f[6]) - 27.0 * (f[1] + f[5]) + 270.0 * (f[2] + f[4])
                - 490.0 * f[3])
                / (180.0 * h * h);
        }
        let inter = a.pair_solution().interaction();
        let mut v = 0.5 * x.iter().map(|x| x * x).sum::<f64>();
        for i in 0..x.len() {
            for j in i + 1..x.len() {
                v += inter.value(x[i] - x[j]).unwrap();
            }
        }
        -0.5 * lap / center + v
    }

    #[test]
    fn normalizability_bound() {
        assert_eq!(alpha_lower_bound(2), 0.0);
        assert_abs_diff_eq!(alpha_lower_bound(3), (1.0f64 / 3.0).sqrt(), epsilon = 1e-15);
        let a = ansatz(3, Statistics::Bosons, 1.0, Interaction::none());
        assert!(a.with_alpha(0.577).is_err());
        assert!(a.with_alpha(0.58).is_ok());
        assert!(a.with_alpha(-1.0).is_err());
    }

    #[test]
    fn statistics_must_match_parity() {
        let even = solve_relative(&Interaction::none(), 8, Parity::Even).unwrap();
        assert!(JastrowAnsatz::new(3, Statistics::Fermions, 1.0, even.clone()).is_err());
        assert!(JastrowAnsatz::new(5, Statistics::Bosons, 1.0, even.clone()).is_err());
        assert!(JastrowAnsatz::new(1, Statistics::Bosons, 1.0, even).is_err());
    }

    #[test]
    fn free_boson_pair_factor_is_flat() {
        let a = ansatz(3, Statistics::Bosons, 1.0, Interaction::none());
        for u in [-2.0, -0.3, 0.0, 0.8, 3.0] {
            let p = a.pair_log_factor(u).unwrap();
            assert!(p.ratio1.abs() < 1e-13);
            assert!(p.ratio2.abs() < 1e-12);
            assert_abs_diff_eq!(p.log_abs, PI_M_QUARTER.ln(), epsilon = 1e-13);
        }
    }

    #[test]
    fn free_fermion_pair_factor_is_linear() {
        let a = ansatz(3, Statistics::Fermions, 1.0, Interaction::none());
        for u in [-2.0, -0.3, 0.8, 3.0] {
            let p = a.pair_log_factor(u).unwrap();
            assert_abs_diff_eq!(p.ratio1, 1.0 / u, epsilon = 1e-12);
            assert!(p.ratio2.abs() < 1e-12);
            assert_eq!(p.sign, u.signum());
        }
        assert!(matches!(a.pair_log_factor(0.0), Err(Error::NodeSingularity(_))));
    }

    #[test]
    fn pair_ratio_matches_finite_difference() {
        let inter = Interaction::quasi1d_coulomb(0.5, 0.1).unwrap();
        for stats in [Statistics::Bosons, Statistics::Fermions] {
            let a = ansatz(3, stats, 0.9, inter);
            let h = 1e-5;
            let u = 0.8;
            let p = a.pair_log_factor(u).unwrap();
            let lp = a.pair_log_factor(u + h).unwrap().log_abs;
            let lm = a.pair_log_factor(u - h).unwrap().log_abs;
            assert!((p.ratio1 - (lp - lm) / (2.0 * h)).abs() < 1e-7);
        }
    }

    #[test]
    fn free_bosons_at_origin() {
        let a = ansatz(3, Statistics::Bosons, 1.0, Interaction::none());
        let l = a.log_psi(&[0.0, 0.0, 0.0]);
        assert_eq!(l.sign, 1);
        assert_abs_diff_eq!(l.log_abs, 3.0 * PI_M_QUARTER.ln(), epsilon = 1e-13);
    }

    #[test]
    fn fermion_coalescence_is_a_node() {
        let a = ansatz(3, Statistics::Fermions, 1.0, Interaction::quasi1d_coulomb(5.0, 0.1).unwrap());
        let l = a.log_psi(&[0.4, 0.4, -1.0]);
        assert!(l.is_node());
        assert_eq!(l.log_abs, f64::NEG_INFINITY);
        assert!(a.local_energy(&[0.4, 0.4, -1.0]).is_err());
    }

    #[test]
    fn exchange_symmetry() {
        let inter = Interaction::quasi1d_coulomb(0.5, 0.1).unwrap();
        let mut rng = lcg(7);
        for stats in [Statistics::Bosons, Statistics::Fermions] {
            let a = ansatz(3, stats, 0.9, inter);
            for _ in 0..20 {
                let x: Vec<f64> = (0..3).map(|_| 4.0 * rng() - 2.0).collect();
                let base = a.log_psi(&x);
                for (i, j) in [(0, 1), (0, 2), (1, 2)] {
                    let mut y = x.clone();
                    y.swap(i, j);
                    let swapped = a.log_psi(&y);
                    assert!((swapped.log_abs - base.log_abs).abs() < 1e-12);
                    let expected = match stats {
                        Statistics::Bosons => base.sign,
                        Statistics::Fermions => -base.sign,
                    };
                    assert_eq!(swapped.sign, expected);
                }
            }
        }
    }

    #[test]
    fn exact_eigenstates_have_constant_local_energy() {
        let mut rng = lcg(11);
        let bosons = ansatz(3, Statistics::Bosons, 1.0, Interaction::none());
        let fermions = ansatz(3, Statistics::Fermions, 1.0, Interaction::none());
        for _ in 0..25 {
            let x: Vec<f64> = (0..3).map(|_| 5.0 * rng() - 2.5).collect();
            assert_abs_diff_eq!(bosons.local_energy(&x).unwrap(), 1.5, epsilon = 1e-11);
            assert_abs_diff_eq!(fermions.local_energy(&x).unwrap(), 4.5, epsilon = 1e-10);
        }
    }

    #[test]
    fn local_energy_matches_finite_difference_hamiltonian() {
        let mut rng = lcg(3);
        for inter in [
            Interaction::quasi1d_coulomb(0.5, 0.1).unwrap(),
            Interaction::soft_coulomb(5.0, 0.1).unwrap(),
        ] {
            for stats in [Statistics::Bosons, Statistics::Fermions] {
                let a = ansatz(3, stats, 0.85, inter);
                for _ in 0..10 {
                    let x: Vec<f64> = (0..3).map(|_| 3.0 * rng() - 1.5).collect();
                    let exact = a.local_energy(&x).unwrap();
                    let fd = finite_difference_local_energy(&a, &x);
                    assert!(
                        ((exact - fd) / exact).abs() < 1e-5,
                        "{stats:?} {x:?}: {exact} vs {fd}"
                    );
                }
            }
        }
    }
}
