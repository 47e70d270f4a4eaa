//! Pair potentials `V(x_i - x_j)` and their oscillator-basis matrix elements.

use std::f64::consts::{PI, SQRT_2};

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::oscillator::{ho_fill, ho_table, HalfLineRule};
use crate::special::erfcx;

/// Default transverse length: one tenth of the axial oscillator length.
pub const DEFAULT_RANGE: f64 = 0.1;

/// Default Gauss–Legendre order for one-dimensional matrix elements.
pub const DEFAULT_MATRIX_ORDER: usize = 128;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InteractionKind {
    None,
    Contact,
    SoftCoulomb,
    Quasi1dCoulomb,
    Gaussian,
}

impl InteractionKind {
    pub const ALL: [InteractionKind; 5] = [
        InteractionKind::None,
        InteractionKind::Contact,
        InteractionKind::SoftCoulomb,
        InteractionKind::Quasi1dCoulomb,
        InteractionKind::Gaussian,
    ];

    pub fn name(self) -> &'static str {
        match self {
            InteractionKind::None => "none",
            InteractionKind::Contact => "contact",
            InteractionKind::SoftCoulomb => "soft_coulomb",
            InteractionKind::Quasi1dCoulomb => "quasi1d_coulomb",
            InteractionKind::Gaussian => "gaussian",
        }
    }

    /// Whether the kind has a finite range parameter.
    pub fn uses_range(self) -> bool {
        matches!(
            self,
            InteractionKind::SoftCoulomb | InteractionKind::Quasi1dCoulomb | InteractionKind::Gaussian
        )
    }
}

impl std::fmt::Display for InteractionKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for InteractionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        InteractionKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "unknown interaction kind {s:?} (expected one of none, contact, soft_coulomb, quasi1d_coulomb, gaussian)"
                ))
            })
    }
}

/// A pair potential with strength `g` and range `b`.
///
/// - `none`: 0
/// - `contact`: `g δ(x)`
/// - `soft_coulomb`: `g / √(x² + b²)`
/// - `quasi1d_coulomb`: `g/|x|` averaged over a transverse Gaussian of
///   oscillator length `b`, i.e. `g √(π/2)/b · erfcx(|x|/(√2 b))`
/// - `gaussian`: `g/(√(2π) b) · e^{-x²/(2b²)}`
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interaction {
    pub kind: InteractionKind,
    #[serde(rename = "g")]
    pub strength: f64,
    #[serde(rename = "b")]
    pub range: f64,
}

impl Interaction {
    pub fn new(kind: InteractionKind, strength: f64, range: f64) -> Result<Self> {
        if !strength.is_finite() {
            return invalid(format!("interaction strength must be finite, got {strength}"));
        }
        if kind.uses_range() && !(range.is_finite() && range > 0.0) {
            return invalid(format!("{kind} needs a positive range b, got {range}"));
        }
        Ok(Self {
            kind,
            strength,
            range,
        })
    }

    pub fn none() -> Self {
        Self {
            kind: InteractionKind::None,
            strength: 0.0,
            range: DEFAULT_RANGE,
        }
    }

    pub fn contact(g: f64) -> Result<Self> {
        Self::new(InteractionKind::Contact, g, DEFAULT_RANGE)
    }

    pub fn soft_coulomb(g: f64, b: f64) -> Result<Self> {
        Self::new(InteractionKind::SoftCoulomb, g, b)
    }

    pub fn quasi1d_coulomb(g: f64, b: f64) -> Result<Self> {
        Self::new(InteractionKind::Quasi1dCoulomb, g, b)
    }

    pub fn gaussian(g: f64, b: f64) -> Result<Self> {
        Self::new(InteractionKind::Gaussian, g, b)
    }

    /// True when the potential vanishes identically.
    pub fn is_free(&self) -> bool {
        self.kind == InteractionKind::None || self.strength == 0.0
    }

    pub fn is_contact(&self) -> bool {
        self.kind == InteractionKind::Contact
    }

    /// `V(x)`. Contact interactions have no pointwise value.
    pub fn value(&self, x: f64) -> Result<f64> {
        if self.is_contact() {
            return Err(Error::UnsupportedPointwise);
        }
        Ok(self.smooth_part(x))
    }

    /// `V(x)` for every kind except contact, which contributes 0 here and
    /// must be accounted for separately.
    pub(crate) fn smooth_part(&self, x: f64) -> f64 {
        let g = self.strength;
        let b = self.range;
        match self.kind {
            InteractionKind::None | InteractionKind::Contact => 0.0,
            InteractionKind::SoftCoulomb => g / (x * x + b * b).sqrt(),
            InteractionKind::Quasi1dCoulomb => {
                g * ((PI / 2.0).sqrt() / b) * erfcx(x.abs() / (SQRT_2 * b))
            }
            InteractionKind::Gaussian => {
                g / ((2.0 * PI).sqrt() * b) * (-x * x / (2.0 * b * b)).exp()
            }
        }
    }
}

/// The rule used for one-dimensional matrix elements over `M` orbitals.
///
/// Integration runs over the half line up to where the highest orbital has
/// decayed below double precision.
pub fn matrix_element_rule(basis_size: usize) -> Result<HalfLineRule> {
    let order = DEFAULT_MATRIX_ORDER.max(4 * basis_size + 40);
    HalfLineRule::graded(order, half_line_extent(basis_size))
}

/// Distance beyond which `χ_n(x)²` for `n < basis_size` is below ~1e-32.
pub(crate) fn half_line_extent(basis_size: usize) -> f64 {
    (2.0 * basis_size as f64 + 1.0).sqrt() + 9.0
}

/// `⟨m|V(scale·x)|n⟩` over the first `basis_size` oscillator orbitals.
///
/// Every potential here is even, so the integral is folded onto `x ≥ 0`
/// and parity-forbidden entries are exactly zero. Contact elements are
/// analytic: `δ(s x) = δ(x)/s`.
pub fn potential_matrix(
    inter: &Interaction,
    basis_size: usize,
    rule: &HalfLineRule,
    scale: f64,
) -> Result<DMatrix<f64>> {
    if basis_size < 1 {
        return invalid("basis size must be at least 1");
    }
    if !(scale.is_finite() && scale > 0.0) {
        return invalid(format!("scale must be positive, got {scale}"));
    }
    if rule.order() < 2 * basis_size + 20 {
        return invalid(format!(
            "quadrature order {} too low for {basis_size} orbitals (need at least {})",
            rule.order(),
            2 * basis_size + 20
        ));
    }
    if rule.length() < half_line_extent(basis_size) {
        return invalid(format!(
            "quadrature extent {} too short for {basis_size} orbitals (need at least {:.3})",
            rule.length(),
            half_line_extent(basis_size)
        ));
    }
    let m = basis_size;
    let mut out = DMatrix::zeros(m, m);
    if inter.is_free() {
        return Ok(out);
    }
    if inter.is_contact() {
        let at_zero = ho_table(0.0, m);
        let c = inter.strength / scale;
        for i in 0..m {
            for j in i..m {
                if (i + j) % 2 == 0 {
                    let v = c * at_zero[i] * at_zero[j];
                    out[(i, j)] = v;
                    out[(j, i)] = v;
                }
            }
        }
        return Ok(out);
    }

    let points = rule.order();
    let mut tables = vec![0.0; points * m];
    let mut weighted_v = vec![0.0; points];
    for (k, (&x, &w)) in rule.nodes().iter().zip(rule.weights()).enumerate() {
        ho_fill(x, &mut tables[k * m..(k + 1) * m]);
        weighted_v[k] = 2.0 * w * inter.smooth_part(scale * x);
    }
    let rows: Vec<Vec<f64>> = (0..m)
        .into_par_iter()
        .map(|i| {
            (0..m)
                .map(|j| {
                    if j < i || (i + j) % 2 == 1 {
                        return 0.0;
                    }
                    let mut s = 0.0;
                    for k in 0..points {
                        s += weighted_v[k] * tables[k * m + i] * tables[k * m + j];
                    }
                    s
                })
                .collect()
        })
        .collect();
    for i in 0..m {
        for j in i..m {
            out[(i, j)] = rows[i][j];
            out[(j, i)] = rows[i][j];
        }
    }
    Ok(out)
}
