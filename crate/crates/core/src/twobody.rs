//! The two-particle relative problem
//! `(-½ d²/dx² + ½x² + V(√2 x)) φ = E φ`, solved by diagonalization in a
//! parity-restricted oscillator basis.

use std::f64::consts::SQRT_2;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::interaction::{matrix_element_rule, potential_matrix, Interaction};
use crate::linalg::jacobi_eigen;
use crate::oscillator::{ho_fill, HalfLineRule};

/// Largest relative basis accepted.
pub const MAX_BASIS: usize = 64;

/// Relative eigenvalues closer than this are treated as degenerate.
const DEGENERACY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn admits(self, n: usize) -> bool {
        match self {
            Parity::Even => n % 2 == 0,
            Parity::Odd => n % 2 == 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        }
    }
}

/// Ground state of the relative Hamiltonian within one parity sector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoBodySolution {
    coeffs: Vec<f64>,
    energy: f64,
    parity: Parity,
    interaction: Interaction,
    basis_size: usize,
}

/// `φ(x)` with its first two derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiValue {
    pub phi: f64,
    pub dphi: f64,
    pub d2phi: f64,
}

impl TwoBodySolution {
    /// Expansion over `χ_0 … χ_{M-1}`; wrong-parity entries are exactly 0.
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn interaction(&self) -> &Interaction {
        &self.interaction
    }

    pub fn basis_size(&self) -> usize {
        self.basis_size
    }

    /// Evaluates `φ`, `φ'` and `φ''` at `x`.
    pub fn eval(&self, x: f64) -> PhiValue {
        let m = self.basis_size;
        let mut chi = [0.0; MAX_BASIS + 1];
        ho_fill(x, &mut chi[..=m]);
        let mut phi = 0.0;
        let mut dphi = 0.0;
        let mut d2phi = 0.0;
        let start = if self.parity == Parity::Even { 0 } else { 1 };
        for n in (start..m).step_by(2) {
            let c = self.coeffs[n];
            let nf = n as f64;
            let below = if n == 0 { 0.0 } else { chi[n - 1] };
            phi += c * chi[n];
            dphi += c * ((nf / 2.0).sqrt() * below - ((nf + 1.0) / 2.0).sqrt() * chi[n + 1]);
            d2phi += c * (x * x - 2.0 * nf - 1.0) * chi[n];
        }
        PhiValue { phi, dphi, d2phi }
    }

    /// `φ(x)` alone.
    pub fn value(&self, x: f64) -> f64 {
        let m = self.basis_size;
        let mut chi = [0.0; MAX_BASIS + 1];
        ho_fill(x, &mut chi[..m]);
        self.coeffs.iter().zip(&chi[..m]).map(|(c, v)| c * v).sum()
    }
}

/// `H_{mn} = (n + ½) δ_{mn} + ⟨m|V(√2 x)|n⟩` over the first `basis_size`
/// orbitals.
pub fn relative_hamiltonian(
    inter: &Interaction,
    basis_size: usize,
    rule: &HalfLineRule,
) -> Result<DMatrix<f64>> {
    check_basis(basis_size)?;
    let mut h = potential_matrix(inter, basis_size, rule, SQRT_2)?;
    for n in 0..basis_size {
        h[(n, n)] += n as f64 + 0.5;
    }
    Ok(h)
}

fn check_basis(basis_size: usize) -> Result<()> {
    if !(2..=MAX_BASIS).contains(&basis_size) {
        return invalid(format!(
            "relative basis size must be in 2..={MAX_BASIS}, got {basis_size}"
        ));
    }
    Ok(())
}

/// Lowest relative eigenstate of the given parity, using the default
/// matrix-element rule.
pub fn solve_relative(
    inter: &Interaction,
    basis_size: usize,
    parity: Parity,
) -> Result<TwoBodySolution> {
    check_basis(basis_size)?;
    let rule = matrix_element_rule(basis_size)?;
    solve_relative_with_rule(inter, basis_size, parity, &rule)
}

pub fn solve_relative_with_rule(
    inter: &Interaction,
    basis_size: usize,
    parity: Parity,
    rule: &HalfLineRule,
) -> Result<TwoBodySolution> {
    let full = relative_hamiltonian(inter, basis_size, rule)?;
    let sector: Vec<usize> = (0..basis_size).filter(|&n| parity.admits(n)).collect();
    let block = DMatrix::from_fn(sector.len(), sector.len(), |i, j| {
        full[(sector[i], sector[j])]
    });
    let eig = jacobi_eigen(&block, true)?;
    let vectors = eig.vectors.expect("eigenvectors requested");

    let lowest = eig.values[0];
    let tol = DEGENERACY_TOL * lowest.abs().max(1.0);
    let pick = (0..eig.values.len())
        .take_while(|&k| eig.values[k] - lowest <= tol)
        .max_by(|&a, &b| {
            vectors[(0, a)]
                .abs()
                .total_cmp(&vectors[(0, b)].abs())
                .then(b.cmp(&a))
        })
        .unwrap_or(0);

    let mut coeffs = vec![0.0; basis_size];
    for (i, &n) in sector.iter().enumerate() {
        coeffs[n] = vectors[(i, pick)];
    }
    let norm = coeffs.iter().map(|c| c * c).sum::<f64>().sqrt();
    coeffs.iter_mut().for_each(|c| *c /= norm);

    let mut sol = TwoBodySolution {
        coeffs,
        energy: eig.values[pick],
        parity,
        interaction: *inter,
        basis_size,
    };
    let orientation = match parity {
        Parity::Even => sol.value(0.1),
        Parity::Odd => {
            let c1 = sol.coeffs[1];
            if c1 != 0.0 {
                c1
            } else {
                sol.coeffs.iter().copied().find(|&c| c != 0.0).unwrap_or(1.0)
            }
        }
    };
    if orientation < 0.0 {
        sol.coeffs.iter_mut().for_each(|c| *c = -*c);
    }
    Ok(sol)
}

/// `‖H c − E c‖_∞` for a solution against the matrix it came from.
pub fn eigen_residual(h: &DMatrix<f64>, sol: &TwoBodySolution) -> f64 {
    let c = DVector::from_column_slice(sol.coeffs());
    (h * &c - c * sol.energy()).amax()
}
