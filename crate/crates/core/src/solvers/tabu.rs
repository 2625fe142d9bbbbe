//! Iterated tabu search over single-spin flips.
//!
//! Each iteration takes the best admissible flip. A flip is admissible when
//! its spin is not tabu, or when it would improve on the best energy seen so
//! far (aspiration). After `stall` iterations without a new best the search
//! restarts from the best configuration with a few random spins flipped.

use std::time::Instant;

use rand::seq::index::sample;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{ForgeError, Result};
use crate::model::QuadraticModel;

use super::{energy_tolerance, finish, rng_for, SolveResult, SpinSystem};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TabuParams {
    pub tenure: usize,
    pub max_iters: u64,
    /// Iterations without a new best before a perturbed restart.
    pub stall: u64,
    /// Spins flipped on restart, as a fraction of N (at least 2).
    pub perturb_fraction: f64,
    pub target: Option<f64>,
}

impl TabuParams {
    /// Defaults scaled to the problem size.
    pub fn for_size(n: usize) -> Self {
        Self {
            tenure: (n / 2).clamp(1, 20),
            max_iters: (100 * n as u64).max(1000),
            stall: 5 * n as u64 + 20,
            perturb_fraction: 0.1,
            target: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.tenure == 0 {
            return Err(ForgeError::InvalidParameter(
                "tabu tenure must be at least 1".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.perturb_fraction) {
            return Err(ForgeError::InvalidParameter(
                "perturb_fraction must lie in [0, 1]".into(),
            ));
        }
        Ok(())
    }
}

pub fn tabu_search<M: QuadraticModel + ?Sized>(
    m: &M,
    tenure: usize,
    max_iters: u64,
    seed: u64,
) -> Result<SolveResult> {
    let params = TabuParams {
        tenure,
        max_iters,
        ..TabuParams::for_size(m.num_vars())
    };
    tabu_search_with(m, &params, seed)
}

pub fn tabu_search_with<M: QuadraticModel + ?Sized>(
    m: &M,
    params: &TabuParams,
    seed: u64,
) -> Result<SolveResult> {
    let mut rng = rng_for(seed, 0);
    tabu_run(m, params, seed, &mut rng)
}

pub(crate) fn tabu_run<M: QuadraticModel + ?Sized>(
    m: &M,
    params: &TabuParams,
    seed: u64,
    rng: &mut ChaCha8Rng,
) -> Result<SolveResult> {
    params.validate()?;
    let start = Instant::now();
    let sys = SpinSystem::new(&m.as_ising());
    let n = sys.len();
    let tol = energy_tolerance(m);
    let target = params.target.map(|t| t + tol);
    let reached = |x: f64| target.is_some_and(|t| x <= t);

    let mut s: Vec<i8> = (0..n)
        .map(|_| if rng.gen::<bool>() { 1 } else { -1 })
        .collect();
    let mut f = sys.local_fields(&s);
    let mut e = sys.energy(&s);
    let mut best_e = e;
    let mut best_s = s.clone();
    let mut best_at = 0u64;
    let mut tabu_until = vec![0u64; n];
    let mut since_best = 0u64;
    let mut iters = 0u64;

    while iters < params.max_iters && n > 0 && !reached(best_e) {
        iters += 1;
        // Ties between equally good moves are broken uniformly at random.
        let mut pick: Option<(usize, f64)> = None;
        let mut fallback: Option<(usize, f64)> = None;
        let (mut pick_ties, mut fallback_ties) = (0u32, 0u32);
        for i in 0..n {
            let d = sys.flip_delta(&s, &f, i);
            consider(&mut fallback, &mut fallback_ties, i, d, tol, rng);
            if tabu_until[i] <= iters || e + d < best_e - tol {
                consider(&mut pick, &mut pick_ties, i, d, tol, rng);
            }
        }
        let (i, d) = pick.or(fallback).expect("n > 0");
        sys.flip(&mut s, &mut f, i);
        e += d;
        tabu_until[i] = iters + params.tenure as u64;
        if e < best_e - tol {
            best_e = e;
            best_s.copy_from_slice(&s);
            best_at = iters;
            since_best = 0;
        } else {
            since_best += 1;
        }
        if since_best >= params.stall {
            s.copy_from_slice(&best_s);
            let k = ((params.perturb_fraction * n as f64).round() as usize).clamp(2.min(n), n);
            for i in sample(rng, n, k) {
                s[i] = -s[i];
            }
            f = sys.local_fields(&s);
            e = sys.energy(&s);
            tabu_until.iter_mut().for_each(|t| *t = 0);
            since_best = 0;
        } else if iters % 256 == 0 {
            e = sys.energy(&s);
        }
    }

    let (mut best_assignment, mut best_energy) = finish(m, &best_s);
    let last = finish(m, &s);
    // The tracked best uses a tolerance; settle near-ties on exact energies.
    if last.1 < best_energy {
        (best_assignment, best_energy) = last.clone();
    }
    Ok(SolveResult {
        best_assignment,
        best_energy,
        samples: Some(vec![last]),
        sweeps_used: iters,
        seed,
        elapsed: start.elapsed(),
        best_found_at: best_at,
        optimal_count: None,
    })
}

/// Reservoir-style running argmin with uniform tie-breaking.
#[inline]
fn consider(
    best: &mut Option<(usize, f64)>,
    ties: &mut u32,
    i: usize,
    d: f64,
    tol: f64,
    rng: &mut ChaCha8Rng,
) {
    match *best {
        Some((_, bd)) if d > bd + tol => {}
        Some((_, bd)) if d >= bd - tol => {
            *ties += 1;
            if rng.gen_range(0..*ties) == 0 {
                *best = Some((i, d));
            }
        }
        _ => {
            *best = Some((i, d));
            *ties = 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::IsingBuilder;

    #[test]
    fn separable_model_solved_within_n_iterations() {
        let n = 12;
        let mut b = IsingBuilder::new(n);
        for i in 0..n {
            b.add_field(i, if i % 3 == 0 { -1.5 } else { 0.5 + i as f64 });
        }
        let m = b.build();
        let optimum: f64 = -m.h().iter().map(|h| h.abs()).sum::<f64>();
        for seed in 0..10 {
            let r = tabu_search(&m, 3, 200, seed).unwrap();
            assert_eq!(r.best_energy, optimum);
            assert!(r.best_found_at <= n as u64);
        }
    }

    #[test]
    fn zero_tenure_rejected() {
        let m = crate::model::IsingModel::zero(3);
        assert!(tabu_search(&m, 0, 10, 0).is_err());
    }

    #[test]
    fn tenure_equal_to_budget_terminates() {
        let mut b = IsingBuilder::new(4);
        b.add_coupling(0, 1, 1.0)
            .add_coupling(1, 2, 1.0)
            .add_coupling(2, 3, -1.0);
        let r = tabu_search(&b.build(), 50, 50, 4).unwrap();
        assert_eq!(r.sweeps_used, 50);
    }
}
