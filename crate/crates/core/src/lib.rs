//! Pair-product (Jastrow-type) trial wavefunctions for a few particles in a
//! one-dimensional harmonic trap, with a configuration-interaction reference.

pub mod ci;
pub mod error;
pub mod interaction;
pub mod jastrow;
pub mod linalg;
pub mod oscillator;
pub mod special;
pub mod twobody;

pub use error::{Error, Result};
pub use interaction::{Interaction, InteractionKind};
pub use oscillator::{gauss_hermite_rule, HalfLineRule, QuadratureRule};
pub use ci::{CIProblem, CISpectrum, FockBasis, TwoBodyTensor};
pub use jastrow::{EnergyEstimate, JastrowAnsatz, ScanPoint, ScanResult, Statistics};
pub use twobody::{Parity, TwoBodySolution};
