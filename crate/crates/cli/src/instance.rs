//! Random Ising instances on a prefix of a hardware graph.
//!
//! Chimera nodes are numbered row-major by cell, then by side, then by index
//! within the side, so an instance of size N uses nodes `0..N` and the graph
//! edges among them.

use forge_core::{HardwareGraph, IsingBuilder, IsingModel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{CliError, Result};

pub const DEFAULT_COEFFICIENTS: [f64; 7] =
    [-1.0, -2.0 / 3.0, -1.0 / 3.0, 0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0];

/// Fields first, then couplings in ascending edge order, each drawn
/// uniformly from `coefficients`.
pub fn random_instance(
    n: usize,
    graph: &HardwareGraph,
    coefficients: &[f64],
    seed: u64,
) -> Result<IsingModel> {
    if n > graph.num_nodes() {
        return Err(CliError::Validation(format!(
            "{n} spins exceed the {} graph nodes",
            graph.num_nodes()
        )));
    }
    if coefficients.is_empty() || coefficients.iter().any(|c| !c.is_finite()) {
        return Err(CliError::Validation(
            "coefficient set must be non-empty and finite".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = || coefficients[rng.gen_range(0..coefficients.len())];
    let mut b = IsingBuilder::new(n);
    for i in 0..n {
        b.add_field(i, draw());
    }
    for (i, j) in graph.induced_edges(n) {
        b.add_coupling(i, j, draw());
    }
    b.try_build().map_err(CliError::validation)
}
