//! Classical ground-state search.
//!
//! Every solver works on the spin form internally and reports the best
//! configuration in the caller's form, with the energy re-evaluated on the
//! caller's model so offsets and conventions are preserved.

mod anneal;
mod exact;
mod tabu;
mod tts;

use std::time::Duration;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::assignment::Assignment;
use crate::model::{IsingModel, QuadraticModel};

pub use anneal::{simulated_annealing, simulated_annealing_with, SaOptions, SaSchedule};
pub use exact::{branch_and_bound, brute_force, exact_minimum, BRUTE_FORCE_LIMIT};
pub use tabu::{tabu_search, tabu_search_with, TabuParams};
pub use tts::{
    first_hit_times, median_across_instances, run_quantile, time_to_target, RunRecord,
    SolverConfig, TtsStatistic,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub best_assignment: Assignment,
    pub best_energy: f64,
    pub samples: Option<Vec<(Assignment, f64)>>,
    /// Sweeps (annealing) or iterations (tabu) actually performed.
    pub sweeps_used: u64,
    pub seed: u64,
    pub elapsed: Duration,
    /// Sweep or iteration at which the best configuration was first seen.
    pub best_found_at: u64,
    /// Number of optimal configurations, when the solver is exhaustive.
    pub optimal_count: Option<u64>,
}

/// Energy tolerance used for tie detection and target checks.
pub fn energy_tolerance<M: QuadraticModel + ?Sized>(m: &M) -> f64 {
    1e-9 * m.coefficient_scale().max(1.0)
}

/// RNG for run `run` of a batch seeded with `seed`. Each run owns its stream,
/// so results do not depend on scheduling.
pub fn rng_for(seed: u64, run: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(run);
    rng
}

/// Compressed adjacency view of an Ising model for local-field updates.
#[derive(Debug, Clone)]
pub struct SpinSystem {
    pub h: Vec<f64>,
    start: Vec<usize>,
    nbr: Vec<(usize, f64)>,
    pub offset: f64,
}

impl SpinSystem {
    pub fn new(m: &IsingModel) -> Self {
        let n = m.num_spins();
        let mut deg = vec![0usize; n];
        for (&(i, j), _) in m.couplings() {
            deg[i] += 1;
            deg[j] += 1;
        }
        let mut start = vec![0usize; n + 1];
        for i in 0..n {
            start[i + 1] = start[i] + deg[i];
        }
        let mut fill = start.clone();
        let mut nbr = vec![(0usize, 0.0); start[n]];
        for (&(i, j), &c) in m.couplings() {
            nbr[fill[i]] = (j, c);
            fill[i] += 1;
            nbr[fill[j]] = (i, c);
            fill[j] += 1;
        }
        Self {
            h: m.h().to_vec(),
            start,
            nbr,
            offset: m.offset(),
        }
    }

    pub fn len(&self) -> usize {
        self.h.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h.is_empty()
    }

    #[inline]
    pub fn neighbors(&self, i: usize) -> &[(usize, f64)] {
        &self.nbr[self.start[i]..self.start[i + 1]]
    }

    pub fn energy(&self, s: &[i8]) -> f64 {
        let mut e = self.offset;
        for i in 0..self.len() {
            e -= self.h[i] * s[i] as f64;
            for &(j, c) in self.neighbors(i) {
                if j > i {
                    e += c * (s[i] * s[j]) as f64;
                }
            }
        }
        e
    }

    /// `f_i = sum_j J_ij s_j` for every spin.
    pub fn local_fields(&self, s: &[i8]) -> Vec<f64> {
        (0..self.len())
            .map(|i| {
                self.neighbors(i)
                    .iter()
                    .map(|&(j, c)| c * s[j] as f64)
                    .sum()
            })
            .collect()
    }

    /// Energy change from flipping spin `i`.
    #[inline]
    pub fn flip_delta(&self, s: &[i8], f: &[f64], i: usize) -> f64 {
        2.0 * s[i] as f64 * (self.h[i] - f[i])
    }

    /// Flips spin `i` and updates the cached local fields.
    #[inline]
    pub fn flip(&self, s: &mut [i8], f: &mut [f64], i: usize) {
        let old = s[i] as f64;
        s[i] = -s[i];
        for &(j, c) in self.neighbors(i) {
            f[j] -= 2.0 * c * old;
        }
    }
}

/// Packs spins into the caller's form and re-evaluates the energy.
pub(crate) fn finish<M: QuadraticModel + ?Sized>(m: &M, spins: &[i8]) -> (Assignment, f64) {
    let a = Assignment::from_spins(spins)
        .expect("solver produced invalid spins")
        .to_form(m.form());
    let e = m.energy(&a).expect("solver assignment matches model");
    (a, e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::IsingBuilder;

    #[test]
    fn local_field_updates_match_recompute() {
        let mut b = IsingBuilder::new(4);
        b.add_field(0, 0.5)
            .add_coupling(0, 1, -1.0)
            .add_coupling(1, 2, 0.75)
            .add_coupling(0, 3, 2.0);
        let sys = SpinSystem::new(&b.build());
        let mut s = vec![1i8, -1, 1, 1];
        let mut f = sys.local_fields(&s);
        for &i in &[0usize, 2, 1, 3, 0] {
            let before = sys.energy(&s);
            let d = sys.flip_delta(&s, &f, i);
            sys.flip(&mut s, &mut f, i);
            assert!((sys.energy(&s) - before - d).abs() < 1e-12);
            assert_eq!(f, sys.local_fields(&s));
        }
    }
}
