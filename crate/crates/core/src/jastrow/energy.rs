//! Quadrature evaluation of `E = ∫ψ Hψ / ∫ψ²`.
//!
//! The main route integrates the analytic local energy over the ordered
//! sector `x₁ ≤ … ≤ x_N` in gap coordinates `d_k = x_{k+1} − x_k ≥ 0`, with
//! the centre of mass factored out. `|ψ|²` and `E_L` are permutation
//! invariant for both statistics and `E_L` does not depend on the centre of
//! mass, so the restricted ratio equals the full one. Pair coalescences sit on
//! the faces `d_k = 0`, where each gap is resolved by a rule clustered at the
//! origin; a contact interaction becomes an exact face integral.
//!
//! A tensor Gauss–Hermite route over all of `ℝᴺ` is kept as an independent
//! check for smooth interactions.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{JastrowAnsatz, MAX_PARTICLES};
use crate::error::{invalid, Error, Result};
use crate::oscillator::{gauss_hermite_rule, HalfLineRule};

/// Smallest accepted quadrature order.
pub const MIN_QUAD_ORDER: usize = 20;

/// Estimates whose order-halving change exceeds this are flagged.
pub const CONVERGENCE_TOL: f64 = 1e-6;

/// `ln(1e-280)`: grid points weighted below this, relative to the largest
/// weight, are dropped without evaluating the local energy.
const LOG_WEIGHT_FLOOR: f64 = -644.723_551_860_7;

/// Grid points per deterministic partial sum.
const CHUNK: usize = 2048;

/// How far below its maximum `ln ψ²` must fall before the sector is cut.
const EXTENT_LOG_DROP: f64 = 110.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyEstimate {
    pub energy: f64,
    /// `ln ∫ψ² dx₁⋯dx_N` of the unnormalized trial state.
    pub log_norm: f64,
    pub quad_order: usize,
    /// `|E(order) − E(order/2)|`.
    pub convergence_delta: f64,
    /// Weighted variance of the pointwise local energy; zero for exact
    /// eigenstates.
    pub variance: f64,
}

impl EnergyEstimate {
    pub fn converged(&self) -> bool {
        self.convergence_delta <= CONVERGENCE_TOL
    }
}

#[derive(Debug, Clone, Copy)]
struct Moments {
    energy: f64,
    log_norm: f64,
    variance: f64,
}

/// Variational energy of the ansatz on the ordered-sector grid with
/// `quad_order` nodes per gap coordinate.
pub fn energy_expectation(ansatz: &JastrowAnsatz, quad_order: usize) -> Result<EnergyEstimate> {
    check_order(ansatz, quad_order)?;
    let extent = sector_extent(ansatz);
    let full = sector_moments(ansatz, quad_order, extent)?;
    let half = sector_moments(ansatz, quad_order / 2, extent)?;
    Ok(EnergyEstimate {
        energy: full.energy,
        log_norm: full.log_norm,
        quad_order,
        convergence_delta: (full.energy - half.energy).abs(),
        variance: full.variance,
    })
}

/// Energy from a tensor Gauss–Hermite grid of `quad_order^N` points.
///
/// Contact interactions are rejected: a delta function has no pointwise
/// value on the grid.
pub fn energy_expectation_hermite(
    ansatz: &JastrowAnsatz,
    quad_order: usize,
) -> Result<EnergyEstimate> {
    check_order(ansatz, quad_order)?;
    if ansatz.pair_solution().interaction().is_contact() {
        return invalid("the Gauss-Hermite route cannot integrate a contact interaction");
    }
    let full = hermite_moments(ansatz, quad_order)?;
    let half = hermite_moments(ansatz, quad_order / 2)?;
    Ok(EnergyEstimate {
        energy: full.energy,
        log_norm: full.log_norm,
        quad_order,
        convergence_delta: (full.energy - half.energy).abs(),
        variance: full.variance,
    })
}

fn check_order(ansatz: &JastrowAnsatz, quad_order: usize) -> Result<()> {
    if quad_order < MIN_QUAD_ORDER {
        return invalid(format!(
            "quadrature order must be at least {MIN_QUAD_ORDER}, got {quad_order}"
        ));
    }
    if ansatz.particles() > MAX_PARTICLES {
        return invalid(format!("at most {MAX_PARTICLES} particles are supported"));
    }
    Ok(())
}

/// Positions with zero mean for the given gaps.
fn config_from_gaps(gaps: &[f64]) -> [f64; MAX_PARTICLES] {
    let mut x = [0.0; MAX_PARTICLES];
    let n = gaps.len() + 1;
    for k in 0..gaps.len() {
        x[k + 1] = x[k] + gaps[k];
    }
    let mean = x[..n].iter().sum::<f64>() / n as f64;
    x[..n].iter_mut().for_each(|v| *v -= mean);
    x
}

fn log_density(ansatz: &JastrowAnsatz, x: &[f64]) -> f64 {
    let l = ansatz.log_psi(x);
    if l.is_node() {
        f64::NEG_INFINITY
    } else {
        2.0 * l.log_abs
    }
}

/// Length of the gap interval outside which `ψ²` is negligible.
///
/// Walks outward along the all-equal-gaps diagonal and along each gap axis
/// (tilted slightly off the faces, where fermionic states vanish) until
/// `ln ψ²` has dropped by [`EXTENT_LOG_DROP`] from the largest value seen.
pub fn sector_extent(ansatz: &JastrowAnsatz) -> f64 {
    let gaps = ansatz.particles() - 1;
    let mut directions = vec![vec![1.0; gaps]];
    if gaps > 1 {
        for k in 0..gaps {
            let mut v = vec![0.25; gaps];
            v[k] = 1.0;
            directions.push(v);
        }
    }
    let mut extent: f64 = 4.0;
    let mut point = vec![0.0; gaps];
    for dir in &directions {
        let mut best = f64::NEG_INFINITY;
        let mut t = 0.0;
        while t < 200.0 {
            t += 0.1;
            for (p, d) in point.iter_mut().zip(dir) {
                *p = t * d;
            }
            let x = config_from_gaps(&point);
            let ld = log_density(ansatz, &x[..gaps + 1]);
            best = best.max(ld);
            if t > 1.0 && ld < best - EXTENT_LOG_DROP {
                break;
            }
        }
        extent = extent.max(t);
    }
    extent * 1.05
}

/// Weighted sums over one chunk of grid points.
#[derive(Debug, Clone, Copy, Default)]
struct Partial {
    weight: f64,
    weighted_energy: f64,
    weighted_square: f64,
}

/// Shared two-pass reduction: log-weights first, then the local energy at
/// every point whose weight survives the global max-shift.
fn reduce<C>(
    ansatz: &JastrowAnsatz,
    points: usize,
    point: C,
    extra: &[f64],
    contact_scale: f64,
    log_norm_offset: f64,
) -> Result<Moments>
where
    C: Fn(usize) -> ([f64; MAX_PARTICLES], f64) + Sync,
{
    let n = ansatz.particles();
    let log_weights: Vec<f64> = (0..points)
        .into_par_iter()
        .map(|p| {
            let (x, lw) = point(p);
            log_density(ansatz, &x[..n]) + lw
        })
        .collect();
    let (arg_max, shift) = log_weights
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |(bi, bv), (i, v)| {
            if v > bv {
                (i, v)
            } else {
                (bi, bv)
            }
        });
    let shift = extra.iter().copied().fold(shift, f64::max);
    if !shift.is_finite() {
        return Err(Error::NumericalFailure(
            "trial state vanishes on every quadrature point".into(),
        ));
    }
    let reference = ansatz.local_energy(&point(arg_max).0[..n])?;

    let partials: Vec<Partial> = (0..points.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| -> Result<Partial> {
            let mut acc = Partial::default();
            for p in c * CHUNK..((c + 1) * CHUNK).min(points) {
                let rel = log_weights[p] - shift;
                if rel < LOG_WEIGHT_FLOOR {
                    continue;
                }
                let w = rel.exp();
                let el = ansatz.local_energy(&point(p).0[..n])?;
                let dev = el - reference;
                acc.weight += w;
                acc.weighted_energy += w * dev;
                acc.weighted_square += w * dev * dev;
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    let mut total = Partial::default();
    for p in &partials {
        total.weight += p.weight;
        total.weighted_energy += p.weighted_energy;
        total.weighted_square += p.weighted_square;
    }
    if !(total.weight > 0.0 && total.weight.is_finite()) {
        return Err(Error::NumericalFailure(
            "normalization integral underflowed".into(),
        ));
    }
    let mean_dev = total.weighted_energy / total.weight;
    let variance = (total.weighted_square / total.weight - mean_dev * mean_dev).max(0.0);
    let face_sum: f64 = extra
        .iter()
        .filter(|&&lw| lw - shift >= LOG_WEIGHT_FLOOR)
        .map(|&lw| (lw - shift).exp())
        .sum();
    let energy = reference + mean_dev + contact_scale * face_sum / total.weight;
    if !energy.is_finite() {
        return Err(Error::NumericalFailure(format!(
            "energy evaluated to {energy}"
        )));
    }
    Ok(Moments {
        energy,
        log_norm: log_norm_offset + shift + total.weight.ln(),
        variance,
    })
}

fn sector_moments(ansatz: &JastrowAnsatz, order: usize, extent: f64) -> Result<Moments> {
    let n = ansatz.particles();
    let gaps = n - 1;
    let rule = HalfLineRule::graded(order, extent)?;
    let nodes = rule.nodes();
    let log_w: Vec<f64> = rule.weights().iter().map(|w| w.ln()).collect();
    let points = order.pow(gaps as u32);

    let point = |mut p: usize| {
        let mut d = [0.0; MAX_PARTICLES - 1];
        let mut lw = 0.0;
        for slot in d.iter_mut().take(gaps) {
            let i = p % order;
            p /= order;
            *slot = nodes[i];
            lw += log_w[i];
        }
        (config_from_gaps(&d[..gaps]), lw)
    };

    // A contact interaction g Σ δ(x_i − x_j) contributes
    // g Σ_k ∫_{d_k=0} ψ² / (2 ∫_sector ψ²): each sector face is shared by two
    // orderings of the coalescing pair.
    let inter = ansatz.pair_solution().interaction();
    let mut faces = Vec::new();
    let mut contact_scale = 0.0;
    if inter.is_contact() && !inter.is_free() {
        contact_scale = 0.5 * inter.strength;
        let face_points = order.pow(gaps as u32 - 1);
        for k in 0..gaps {
            for mut p in 0..face_points {
                let mut d = [0.0; MAX_PARTICLES - 1];
                let mut lw = 0.0;
                for (j, slot) in d.iter_mut().enumerate().take(gaps) {
                    if j == k {
                        continue;
                    }
                    let i = p % order;
                    p /= order;
                    *slot = nodes[i];
                    lw += log_w[i];
                }
                let x = config_from_gaps(&d[..gaps]);
                faces.push(log_density(ansatz, &x[..n]) + lw);
            }
        }
    }

    // ∫ψ² over ℝᴺ = N! · √(π/N) · ∫_sector ψ²(x̄ = 0) d(gaps).
    let log_factorial: f64 = (2..=n).map(|k| (k as f64).ln()).sum();
    let offset = log_factorial + 0.5 * (std::f64::consts::PI / n as f64).ln();
    reduce(ansatz, points, point, &faces, contact_scale, offset)
}

fn hermite_moments(ansatz: &JastrowAnsatz, order: usize) -> Result<Moments> {
    let n = ansatz.particles();
    let rule = gauss_hermite_rule(order)?;
    let nodes = rule.nodes();
    // ψ² already carries e^{-Σx²}, so the rule is used with e^{+x²} folded in.
    let log_w: Vec<f64> = rule.scaled_weights().iter().map(|w| w.ln()).collect();
    let points = order.pow(n as u32);
    let point = |mut p: usize| {
        let mut x = [0.0; MAX_PARTICLES];
        let mut lw = 0.0;
        for slot in x.iter_mut().take(n) {
            let i = p % order;
            p /= order;
            *slot = nodes[i];
            lw += log_w[i];
        }
        (x, lw)
    };
    reduce(ansatz, points, point, &[], 0.0, 0.0)
}
