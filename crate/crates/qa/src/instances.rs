//! Random test instances on small Chimera fragments.

use forge_core::{chimera_graph, IsingBuilder, IsingModel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;

/// Every field and coupling of `chimera(rows, cols, shore)` gets a random sign
/// and a magnitude uniform in `[0.2, 1)`.
pub fn signed_chimera_instance(
    rows: usize,
    cols: usize,
    shore: usize,
    seed: u64,
) -> Result<IsingModel> {
    let g = chimera_graph(rows, cols, shore)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = || {
        let mag: f64 = rng.gen_range(0.2..1.0);
        if rng.gen_bool(0.5) {
            mag
        } else {
            -mag
        }
    };
    let mut b = IsingBuilder::new(g.num_nodes());
    for i in 0..g.num_nodes() {
        b.add_field(i, draw());
    }
    for &(i, j) in g.edges() {
        b.add_coupling(i, j, draw());
    }
    Ok(b.build())
}
