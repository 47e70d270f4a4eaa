//! Fixtures shared by the benchmarks.

use jastrow1d::twobody::solve_relative;
use jastrow1d::{Interaction, JastrowAnsatz, Statistics};

/// The quasi-one-dimensional Coulomb interaction at the default range.
pub fn coulomb(g: f64) -> Interaction {
    Interaction::quasi1d_coulomb(g, 0.1).expect("valid interaction")
}

/// Three-particle ansatz built from a pair solution over `orbitals` states.
pub fn three_body(statistics: Statistics, alpha: f64, orbitals: usize) -> JastrowAnsatz {
    let pair = solve_relative(&coulomb(0.5), orbitals, statistics.pair_parity())
        .expect("pair solution");
    JastrowAnsatz::new(3, statistics, alpha, pair).expect("valid ansatz")
}
