//! Configuration interaction in a truncated oscillator Fock space.
//!
//! The many-body Hamiltonian
//!
//! ```text
//! H = Σ_n (n + ½) a†_n a_n + ½ Σ_{abcd} V_{abcd} a†_a a†_b a_d a_c
//! ```
//!
//! is assembled densely over every `N`-particle configuration of the lowest
//! `M` orbitals and diagonalized block by block.

use std::collections::HashMap;
use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::interaction::{matrix_element_rule, Interaction};
use crate::jastrow::Statistics;
use crate::linalg::{decoupled_blocks, jacobi_eigen};
use crate::oscillator::{ho_fill, QuadratureRule};

/// Largest supported particle number.
pub const MAX_CI_PARTICLES: usize = 4;

/// Largest supported orbital count.
pub const MAX_CI_ORBITALS: usize = 20;

/// Default number of eigenvalues reported.
pub const DEFAULT_EIGENVALUES: usize = 4;

/// All occupation configurations of `N` particles in `M` orbitals.
#[derive(Debug, Clone)]
pub struct FockBasis {
    particles: usize,
    orbitals: usize,
    statistics: Statistics,
    /// Orbital indices per configuration, non-decreasing for bosons and
    /// strictly increasing for fermions, in lexicographic order.
    states: Vec<Vec<u8>>,
    index: HashMap<Vec<u8>, usize>,
}

impl FockBasis {
    pub fn new(particles: usize, orbitals: usize, statistics: Statistics) -> Result<Self> {
        if !(1..=MAX_CI_PARTICLES).contains(&particles) {
            return invalid(format!(
                "particle count must be in 1..={MAX_CI_PARTICLES}, got {particles}"
            ));
        }
        if orbitals > MAX_CI_ORBITALS || orbitals == 0 {
            return invalid(format!(
                "orbital count must be in 1..={MAX_CI_ORBITALS}, got {orbitals}"
            ));
        }
        if statistics == Statistics::Fermions && orbitals < particles {
            return invalid(format!(
                "{particles} fermions need at least {particles} orbitals, got {orbitals}"
            ));
        }
        let mut states = Vec::new();
        let mut current = Vec::with_capacity(particles);
        enumerate(particles, orbitals, statistics, 0, &mut current, &mut states);
        let index = states
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
        Ok(Self {
            particles,
            orbitals,
            statistics,
            states,
            index,
        })
    }

    pub fn particles(&self) -> usize {
        self.particles
    }

    pub fn orbitals(&self) -> usize {
        self.orbitals
    }

    pub fn statistics(&self) -> Statistics {
        self.statistics
    }

    pub fn dimension(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[Vec<u8>] {
        &self.states
    }

    /// Position of a configuration given as sorted orbital indices.
    pub fn position(&self, state: &[u8]) -> Option<usize> {
        self.index.get(state).copied()
    }
}

fn enumerate(
    left: usize,
    orbitals: usize,
    statistics: Statistics,
    start: usize,
    current: &mut Vec<u8>,
    out: &mut Vec<Vec<u8>>,
) {
    if left == 0 {
        out.push(current.clone());
        return;
    }
    for n in start..orbitals {
        current.push(n as u8);
        let next = match statistics {
            Statistics::Bosons => n,
            Statistics::Fermions => n + 1,
        };
        enumerate(left - 1, orbitals, statistics, next, current, out);
        current.pop();
    }
}

/// `V_{abcd} = ∬ χ_a(x) χ_b(y) V(x − y) χ_c(x) χ_d(y) dx dy`.
#[derive(Debug, Clone)]
pub struct TwoBodyTensor {
    orbitals: usize,
    values: Vec<f64>,
}

impl TwoBodyTensor {
    pub fn orbitals(&self) -> usize {
        self.orbitals
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize, c: usize, d: usize) -> f64 {
        let m = self.orbitals;
        self.values[((a * m + b) * m + c) * m + d]
    }
}

/// Interaction matrix elements over the first `orbitals` oscillator states.
///
/// The double integral is taken in the rotated frame `s = (x + y)/√2`,
/// `u = (x − y)/√2`: `rule` (Gauss–Hermite) handles `s`, where the integrand
/// is a polynomial times `e^{-s²}`, and a rule clustered at `u = 0` handles
/// the interaction, whose structure is concentrated there. Contact elements
/// reduce to `g ∫ χ_a χ_b χ_c χ_d dx`, integrated exactly by `rule` after
/// the substitution `x = t/√2`. Entries with odd `a + b + c + d` vanish by
/// parity and are stored as exact zeros.
pub fn two_body_tensor(
    inter: &Interaction,
    orbitals: usize,
    rule: &QuadratureRule,
) -> Result<TwoBodyTensor> {
    let m = orbitals;
    if m == 0 {
        return invalid("orbital count must be positive");
    }
    if rule.order() < 2 * m + 20 {
        return invalid(format!(
            "quadrature order {} too low for {m} orbitals (need at least {})",
            rule.order(),
            2 * m + 20
        ));
    }
    let mut values = vec![0.0; m * m * m * m];
    if inter.is_free() {
        return Ok(TwoBodyTensor {
            orbitals: m,
            values,
        });
    }
    let idx = |a: usize, b: usize, c: usize, d: usize| ((a * m + b) * m + c) * m + d;

    if inter.is_contact() {
        let tables: Vec<Vec<f64>> = rule
            .nodes()
            .iter()
            .map(|&t| {
                let mut row = vec![0.0; m];
                ho_fill(t * FRAC_1_SQRT_2, &mut row);
                row
            })
            .collect();
        let scale = inter.strength * FRAC_1_SQRT_2;
        // The integrand is fully symmetric, so one sorted quadruple stands
        // for all of its permutations.
        for a in 0..m {
            for b in a..m {
                for c in b..m {
                    for d in c..m {
                        if (a + b + c + d) % 2 == 1 {
                            continue;
                        }
                        let v: f64 = tables
                            .iter()
                            .zip(rule.scaled_weights())
                            .map(|(row, &w)| w * row[a] * row[b] * row[c] * row[d])
                            .sum::<f64>()
                            * scale;
                        for (p, q, r, s) in permutations(a, b, c, d) {
                            values[idx(p, q, r, s)] = v;
                        }
                    }
                }
            }
        }
        return Ok(TwoBodyTensor {
            orbitals: m,
            values,
        });
    }

    // Pair index (a ≤ c) into the symmetric product χ_a χ_c.
    let pairs: Vec<(usize, usize)> = (0..m)
        .flat_map(|a| (a..m).map(move |c| (a, c)))
        .collect();
    let u_rule = matrix_element_rule(m)?;
    let s_count = rule.order();
    let u_count = u_rule.order();
    let points = s_count * u_count;
    // Each (s, u > 0) node stands for itself and its mirror u → −u, which
    // swaps x and y; the mirror is folded in by symmetrizing the product.
    let mut x_products = DMatrix::zeros(points, pairs.len());
    let mut y_products = DMatrix::zeros(points, pairs.len());
    let mut row_x = vec![0.0; m];
    let mut row_y = vec![0.0; m];
    for (i, (&s, &ws)) in rule.nodes().iter().zip(rule.scaled_weights()).enumerate() {
        for (j, (&u, &wu)) in u_rule.nodes().iter().zip(u_rule.weights()).enumerate() {
            let p = i * u_count + j;
            ho_fill((s + u) * FRAC_1_SQRT_2, &mut row_x);
            ho_fill((s - u) * FRAC_1_SQRT_2, &mut row_y);
            let w = ws * wu * inter.smooth_part(SQRT_2 * u);
            for (k, &(a, c)) in pairs.iter().enumerate() {
                x_products[(p, k)] = row_x[a] * row_x[c];
                y_products[(p, k)] = w * row_y[a] * row_y[c];
            }
        }
    }
    let half = x_products.transpose() * &y_products;
    for (k1, &(a, c)) in pairs.iter().enumerate() {
        for (k2, &(b, d)) in pairs.iter().enumerate() {
            if (a + b + c + d) % 2 == 1 {
                continue;
            }
            let v = half[(k1, k2)] + half[(k2, k1)];
            for (p, r) in [(a, c), (c, a)] {
                for (q, s) in [(b, d), (d, b)] {
                    values[idx(p, q, r, s)] = v;
                }
            }
        }
    }
    Ok(TwoBodyTensor {
        orbitals: m,
        values,
    })
}

/// All orderings of an index quadruple (with repeats when indices coincide).
fn permutations(
    a: usize,
    b: usize,
    c: usize,
    d: usize,
) -> impl Iterator<Item = (usize, usize, usize, usize)> {
    const PERMS: [[usize; 4]; 24] = [
        [0, 1, 2, 3], [0, 1, 3, 2], [0, 2, 1, 3], [0, 2, 3, 1], [0, 3, 1, 2], [0, 3, 2, 1],
        [1, 0, 2, 3], [1, 0, 3, 2], [1, 2, 0, 3], [1, 2, 3, 0], [1, 3, 0, 2], [1, 3, 2, 0],
        [2, 0, 1, 3], [2, 0, 3, 1], [2, 1, 0, 3], [2, 1, 3, 0], [2, 3, 0, 1], [2, 3, 1, 0],
        [3, 0, 1, 2], [3, 0, 2, 1], [3, 1, 0, 2], [3, 1, 2, 0], [3, 2, 0, 1], [3, 2, 1, 0],
    ];
    let v = [a, b, c, d];
    PERMS.into_iter().map(move |p| (v[p[0]], v[p[1]], v[p[2]], v[p[3]]))
}

/// Occupation-number state with its running amplitude.
struct Ket {
    occ: Vec<u8>,
    amp: f64,
}

impl Ket {
    fn annihilate(&mut self, n: usize, statistics: Statistics) -> bool {
        if self.occ[n] == 0 {
            return false;
        }
        match statistics {
            Statistics::Bosons => self.amp *= f64::from(self.occ[n]).sqrt(),
            Statistics::Fermions => {
                if self.occ[..n].iter().map(|&k| k as u32).sum::<u32>() % 2 == 1 {
                    self.amp = -self.amp;
                }
            }
        }
        self.occ[n] -= 1;
        true
    }

    fn create(&mut self, n: usize, statistics: Statistics) -> bool {
        match statistics {
            Statistics::Bosons => self.amp *= f64::from(self.occ[n] + 1).sqrt(),
            Statistics::Fermions => {
                if self.occ[n] == 1 {
                    return false;
                }
                if self.occ[..n].iter().map(|&k| k as u32).sum::<u32>() % 2 == 1 {
                    self.amp = -self.amp;
                }
            }
        }
        self.occ[n] += 1;
        true
    }

    fn indices(&self) -> Vec<u8> {
        let mut out = Vec::new();
        for (n, &k) in self.occ.iter().enumerate() {
            out.extend(std::iter::repeat(n as u8).take(k as usize));
        }
        out
    }
}

/// Dense Hamiltonian matrix over `basis`, exactly symmetric.
pub fn build_hamiltonian(basis: &FockBasis, tensor: &TwoBodyTensor) -> Result<DMatrix<f64>> {
    let m = basis.orbitals();
    if tensor.orbitals() != m {
        return invalid(format!(
            "tensor has {} orbitals, basis has {m}",
            tensor.orbitals()
        ));
    }
    let stats = basis.statistics();
    let dim = basis.dimension();
    let rows: Vec<Vec<(usize, f64)>> = basis
        .states()
        .par_iter()
        .map(|state| {
            let mut occ = vec![0u8; m];
            for &n in state {
                occ[n as usize] += 1;
            }
            let mut row: Vec<(usize, f64)> = Vec::new();
            let one_body: f64 = state.iter().map(|&n| n as f64 + 0.5).sum();
            let own = basis.position(state).expect("state belongs to basis");
            row.push((own, one_body));
            for c in 0..m {
                for d in 0..m {
                    let mut base = Ket {
                        occ: occ.clone(),
                        amp: 1.0,
                    };
                    if !base.annihilate(c, stats) || !base.annihilate(d, stats) {
                        continue;
                    }
                    for b in 0..m {
                        for a in 0..m {
                            let v = tensor.get(a, b, c, d);
                            if v == 0.0 {
                                continue;
                            }
                            let mut ket = Ket {
                                occ: base.occ.clone(),
                                amp: base.amp,
                            };
                            if !ket.create(b, stats) || !ket.create(a, stats) {
                                continue;
                            }
                            let target = basis
                                .position(&ket.indices())
                                .expect("particle-conserving operator stays in basis");
                            row.push((target, 0.5 * v * ket.amp));
                        }
                    }
                }
            }
            row
        })
        .collect();
    let mut h = DMatrix::zeros(dim, dim);
    for (col, row) in rows.iter().enumerate() {
        for &(target, v) in row {
            h[(target, col)] += v;
        }
    }
    for i in 0..dim {
        for j in i + 1..dim {
            let v = 0.5 * (h[(i, j)] + h[(j, i)]);
            h[(i, j)] = v;
            h[(j, i)] = v;
        }
    }
    Ok(h)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CISpectrum {
    pub energies: Vec<f64>,
    pub gap: f64,
    pub dimension: usize,
}

/// The `count` lowest eigenvalues of a symmetric matrix, found by
/// diagonalizing each decoupled block (for instance each parity sector)
/// separately.
pub fn solve_spectrum(matrix: &DMatrix<f64>, count: usize) -> Result<CISpectrum> {
    let dim = matrix.nrows();
    if count < 2 || count > dim {
        return invalid(format!(
            "eigenvalue count must lie in 2..={dim}, got {count}"
        ));
    }
    let blocks = decoupled_blocks(matrix);
    let mut values: Vec<f64> = blocks
        .par_iter()
        .map(|idx| {
            let sub = DMatrix::from_fn(idx.len(), idx.len(), |i, j| matrix[(idx[i], idx[j])]);
            jacobi_eigen(&sub, false).map(|e| e.values)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    values.sort_by(f64::total_cmp);
    values.truncate(count);
    let gap = values[1] - values[0];
    Ok(CISpectrum {
        energies: values,
        gap,
        dimension: dim,
    })
}

/// Lowest eigenvalue and a unit eigenvector, embedded in the full space.
pub fn ground_state(matrix: &DMatrix<f64>) -> Result<(f64, DVector<f64>)> {
    let dim = matrix.nrows();
    let mut best: Option<(f64, DVector<f64>)> = None;
    for idx in decoupled_blocks(matrix) {
        let sub = DMatrix::from_fn(idx.len(), idx.len(), |i, j| matrix[(idx[i], idx[j])]);
        let eig = jacobi_eigen(&sub, true)?;
        let value = eig.values[0];
        if best.as_ref().map_or(true, |(b, _)| value < *b) {
            let vecs = eig.vectors.expect("vectors requested");
            let mut full = DVector::zeros(dim);
            for (k, &i) in idx.iter().enumerate() {
                full[i] = vecs[(k, 0)];
            }
            best = Some((value, full));
        }
    }
    best.ok_or_else(|| Error::InvalidArgument("empty matrix".into()))
}

/// `‖H v − λ v‖∞`.
pub fn eigen_residual(matrix: &DMatrix<f64>, value: f64, vector: &DVector<f64>) -> f64 {
    (matrix * vector - vector * value).amax()
}

/// Everything needed for one CI run.
#[derive(Debug, Clone)]
pub struct CIProblem {
    pub basis: FockBasis,
    pub tensor: TwoBodyTensor,
    pub hamiltonian: DMatrix<f64>,
}

impl CIProblem {
    pub fn new(
        inter: &Interaction,
        particles: usize,
        orbitals: usize,
        statistics: Statistics,
    ) -> Result<Self> {
        let basis = FockBasis::new(particles, orbitals, statistics)?;
        let rule = crate::oscillator::gauss_hermite_rule(2 * orbitals + 20)?;
        let tensor = two_body_tensor(inter, orbitals, &rule)?;
        let hamiltonian = build_hamiltonian(&basis, &tensor)?;
        Ok(Self {
            basis,
            tensor,
            hamiltonian,
        })
    }

    pub fn spectrum(&self, count: usize) -> Result<CISpectrum> {
        solve_spectrum(&self.hamiltonian, count.min(self.basis.dimension()))
    }
}
