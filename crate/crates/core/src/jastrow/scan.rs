//! One-parameter variational search over the scaling factor α.

use serde::{Deserialize, Serialize};

use super::energy::{energy_expectation, EnergyEstimate};
use super::{alpha_lower_bound, JastrowAnsatz};
use crate::error::{invalid, Result};

/// Required clearance between the scan window and the normalizability bound.
pub const ALPHA_MARGIN: f64 = 1e-3;

/// Bracket width at which golden-section refinement stops.
pub const GOLDEN_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub alpha: f64,
    pub estimate: EnergyEstimate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    /// The uniform grid, in increasing α.
    pub points: Vec<ScanPoint>,
    pub alpha_star: f64,
    pub energy_star: f64,
    /// The lowest grid energy sits on an end of the window, so the true
    /// minimizer may lie outside it.
    pub boundary_minimum: bool,
    /// Grid energies fall and then rise with no other turning point.
    pub unimodal: bool,
    /// Golden-section optimum inside the bracket around the best grid point.
    pub refined: Option<ScanPoint>,
}

/// Evaluates the energy on `steps` equally spaced α in `[alpha_min,
/// alpha_max]` and, if the lowest value is interior, refines it by golden
/// section on the two neighbouring grid intervals.
pub fn scan_alpha(
    template: &JastrowAnsatz,
    alpha_min: f64,
    alpha_max: f64,
    steps: usize,
    quad_order: usize,
) -> Result<ScanResult> {
    let floor = alpha_lower_bound(template.particles()) + ALPHA_MARGIN;
    if !(alpha_min.is_finite() && alpha_max.is_finite()) {
        return invalid("alpha window must be finite");
    }
    if alpha_min < floor {
        return invalid(format!(
            "alpha_min = {alpha_min} is below {floor:.6} for N = {}",
            template.particles()
        ));
    }
    if alpha_max <= alpha_min {
        return invalid(format!(
            "alpha_max = {alpha_max} must exceed alpha_min = {alpha_min}"
        ));
    }
    if steps < 3 {
        return invalid(format!("at least 3 alpha steps are needed, got {steps}"));
    }

    let evaluate = |alpha: f64| -> Result<ScanPoint> {
        let estimate = energy_expectation(&template.with_alpha(alpha)?, quad_order)?;
        Ok(ScanPoint { alpha, estimate })
    };

    let h = (alpha_max - alpha_min) / (steps - 1) as f64;
    let points = (0..steps)
        .map(|i| {
            let alpha = if i + 1 == steps {
                alpha_max
            } else {
                alpha_min + h * i as f64
            };
            evaluate(alpha)
        })
        .collect::<Result<Vec<_>>>()?;

    let energies: Vec<f64> = points.iter().map(|p| p.estimate.energy).collect();
    let best = energies
        .iter()
        .enumerate()
        .fold(0, |b, (i, &e)| if e < energies[b] { i } else { b });
    let boundary_minimum = best == 0 || best + 1 == steps;
    let unimodal = energies[..=best].windows(2).all(|w| w[1] <= w[0])
        && energies[best..].windows(2).all(|w| w[1] >= w[0]);

    let mut refined = None;
    if !boundary_minimum {
        let (a, b) = (points[best - 1].alpha, points[best + 1].alpha);
        let candidate = golden_section(a, b, &evaluate)?;
        refined = Some(candidate);
    }
    let grid_best = points[best];
    let star = match refined {
        Some(p) if p.estimate.energy < grid_best.estimate.energy => p,
        _ => grid_best,
    };
    Ok(ScanResult {
        alpha_star: star.alpha,
        energy_star: star.estimate.energy,
        points,
        boundary_minimum,
        unimodal,
        refined,
    })
}

fn golden_section<F>(mut a: f64, mut b: f64, evaluate: &F) -> Result<ScanPoint>
where
    F: Fn(f64) -> Result<ScanPoint>,
{
    let inv_phi = (5.0_f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut pc = evaluate(c)?;
    let mut pd = evaluate(d)?;
    while b - a > GOLDEN_TOL {
        if pc.estimate.energy <= pd.estimate.energy {
            b = d;
            d = c;
            pd = pc;
            c = b - inv_phi * (b - a);
            pc = evaluate(c)?;
        } else {
            a = c;
            c = d;
            pc = pd;
            d = a + inv_phi * (b - a);
            pd = evaluate(d)?;
        }
    }
    Ok(if pc.estimate.energy <= pd.estimate.energy {
        pc
    } else {
        pd
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interaction::Interaction;
    use crate::jastrow::tests::ansatz;
    use crate::jastrow::Statistics;

    #[test]
    fn free_particles_are_optimal_at_unit_alpha() {
        for (stats, exact) in [(Statistics::Bosons, 1.5), (Statistics::Fermions, 4.5)] {
            let a = ansatz(3, stats, 1.0, Interaction::none());
            let scan = scan_alpha(&a, 0.7, 1.1, 9, 32).unwrap();
            assert!(!scan.boundary_minimum);
            assert!(scan.unimodal);
            assert!((scan.alpha_star - 1.0).abs() < 1e-3, "{}", scan.alpha_star);
            assert!((scan.energy_star - exact).abs() < 1e-9);
        }
    }

    #[test]
    fn window_below_bound_rejected() {
        let a = ansatz(3, Statistics::Bosons, 1.0, Interaction::none());
        assert!(scan_alpha(&a, 0.3, 1.1, 5, 32).is_err());
        assert!(scan_alpha(&a, 0.9, 0.8, 5, 32).is_err());
        assert!(scan_alpha(&a, 0.8, 0.9, 2, 32).is_err());
    }

    #[test]
    fn boundary_minimum_detected() {
        let a = ansatz(3, Statistics::Bosons, 1.0, Interaction::none());
        let scan = scan_alpha(&a, 1.05, 1.2, 4, 32).unwrap();
        assert!(scan.boundary_minimum);
        assert!(scan.refined.is_none());
        assert_eq!(scan.alpha_star, 1.05);
    }
}
