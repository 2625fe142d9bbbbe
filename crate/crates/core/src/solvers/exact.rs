//! Exact minimisation: Gray-code enumeration and depth-first branch and bound.

use std::time::Instant;

use rayon::prelude::*;

use crate::assignment::{bit_to_spin, index_to_bits};
use crate::error::{ForgeError, Result};
use crate::model::QuadraticModel;

use super::{energy_tolerance, finish, tabu_search_with, SolveResult, SpinSystem, TabuParams};

/// Largest model `brute_force` accepts.
pub const BRUTE_FORCE_LIMIT: usize = 30;

/// Optimal configurations kept as samples.
const MAX_OPTIMA_KEPT: usize = 256;

/// Exact recompute interval during enumeration, to bound drift.
const RESYNC: u64 = 1 << 12;

#[derive(Debug, Clone)]
struct Tally {
    min: f64,
    count: u64,
    best: u64,
    optima: Vec<u64>,
}

impl Tally {
    fn empty() -> Self {
        Self {
            min: f64::INFINITY,
            count: 0,
            best: u64::MAX,
            optima: Vec::new(),
        }
    }

    #[inline]
    fn consider(&mut self, idx: u64, e: f64, tol: f64) {
        if e < self.min - tol {
            self.min = e;
            self.count = 1;
            self.best = idx;
            self.optima.clear();
            self.optima.push(idx);
        } else if e <= self.min + tol {
            self.count += 1;
            self.best = self.best.min(idx);
            if self.optima.len() < MAX_OPTIMA_KEPT {
                self.optima.push(idx);
            }
        }
    }

    fn merge(mut self, other: Tally, tol: f64) -> Tally {
        if other.count == 0 {
            return self;
        }
        if other.min < self.min - tol {
            return other;
        }
        if other.min <= self.min + tol {
            self.count += other.count;
            self.best = self.best.min(other.best);
            self.optima.extend(other.optima);
        }
        self
    }
}

fn enumerate_chunk(sys: &SpinSystem, n: usize, prefix_bits: usize, chunk: u64, tol: f64) -> Tally {
    let m = n - prefix_bits;
    let base = chunk << m;
    let mut s: Vec<i8> = index_to_bits(base, n)
        .into_iter()
        .map(bit_to_spin)
        .collect();
    let mut f = sys.local_fields(&s);
    let mut e = sys.energy(&s);
    let mut low = 0u64;
    let mut tally = Tally::empty();
    tally.consider(base, e, tol);
    for t in 1..(1u64 << m) {
        let p = t.trailing_zeros() as usize;
        let i = n - 1 - p;
        e += sys.flip_delta(&s, &f, i);
        sys.flip(&mut s, &mut f, i);
        low ^= 1 << p;
        if t % RESYNC == 0 {
            e = sys.energy(&s);
        }
        tally.consider(base | low, e, tol);
    }
    tally
}

/// Exhaustive minimisation for at most [`BRUTE_FORCE_LIMIT`] variables.
///
/// Reports the lexicographically smallest optimum, the number of optimal
/// configurations, and up to 256 optima as samples in ascending index order.
pub fn brute_force<M: QuadraticModel + ?Sized>(m: &M) -> Result<SolveResult> {
    let n = m.num_vars();
    if n > BRUTE_FORCE_LIMIT {
        return Err(ForgeError::TooLarge {
            num_vars: n,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let start = Instant::now();
    let sys = SpinSystem::new(&m.as_ising());
    let tol = energy_tolerance(m);
    let prefix_bits = if n > 16 { (n - 12).min(10) } else { 0 };
    let tallies: Vec<Tally> = (0..1u64 << prefix_bits)
        .into_par_iter()
        .map(|c| enumerate_chunk(&sys, n, prefix_bits, c, tol))
        .collect();
    let tally = tallies
        .into_iter()
        .fold(Tally::empty(), |acc, t| acc.merge(t, tol));

    let spins_of =
        |idx: u64| -> Vec<i8> { index_to_bits(idx, n).into_iter().map(bit_to_spin).collect() };
    let (best_assignment, best_energy) = finish(m, &spins_of(tally.best));
    let mut optima = tally.optima;
    optima.sort_unstable();
    let samples = optima
        .iter()
        .map(|&idx| finish(m, &spins_of(idx)))
        .collect();
    Ok(SolveResult {
        best_assignment,
        best_energy,
        samples: Some(samples),
        sweeps_used: 1u64 << n,
        seed: 0,
        elapsed: start.elapsed(),
        best_found_at: 0,
        optimal_count: Some(tally.count),
    })
}

/// Hard cap for branch and bound; beyond this the search is hopeless anyway.
const BNB_LIMIT: usize = 256;

struct Bnb {
    n: usize,
    /// Couplings to later variables only.
    forward: Vec<Vec<(usize, f64)>>,
    /// `sum_{j>i} min(0, b_ij)`.
    neg_tail: Vec<f64>,
    eff: Vec<f64>,
    z: Vec<u8>,
    best_e: f64,
    best_z: Option<Vec<u8>>,
    tol: f64,
    nodes: u64,
}

impl Bnb {
    fn search(&mut self, k: usize, e_fixed: f64) {
        self.nodes += 1;
        if k == self.n {
            if e_fixed < self.best_e - self.tol {
                self.best_e = e_fixed;
                self.best_z = Some(self.z.clone());
            }
            return;
        }
        let bound: f64 = e_fixed
            + (k..self.n)
                .map(|i| (self.eff[i] + self.neg_tail[i]).min(0.0))
                .sum::<f64>();
        if bound >= self.best_e - self.tol {
            return;
        }
        // z_k = 0 first keeps the first optimum found lexicographically smallest.
        self.z[k] = 0;
        self.search(k + 1, e_fixed);
        self.z[k] = 1;
        let gain = self.eff[k];
        for idx in 0..self.forward[k].len() {
            let (j, b) = self.forward[k][idx];
            self.eff[j] += b;
        }
        self.search(k + 1, e_fixed + gain);
        for idx in 0..self.forward[k].len() {
            let (j, b) = self.forward[k][idx];
            self.eff[j] -= b;
        }
        self.z[k] = 0;
    }
}

/// Exact minimisation by depth-first branch and bound in variable order.
///
/// The incumbent is seeded from a short tabu run. Returns the
/// lexicographically smallest optimum; `optimal_count` is not reported.
/// `sweeps_used` holds the number of search nodes visited.
pub fn branch_and_bound<M: QuadraticModel + ?Sized>(m: &M) -> Result<SolveResult> {
    let n = m.num_vars();
    if n > BNB_LIMIT {
        return Err(ForgeError::TooLarge {
            num_vars: n,
            limit: BNB_LIMIT,
        });
    }
    let start = Instant::now();
    let q = m.as_qubo();
    let tol = energy_tolerance(m);
    let mut forward = vec![Vec::new(); n];
    let mut neg_tail = vec![0.0; n];
    for (&(i, j), &b) in q.quadratic() {
        forward[i].push((j, b));
        neg_tail[i] += b.min(0.0);
    }
    let incumbent = tabu_search_with(m, &TabuParams::for_size(n), 0)?;
    let seed_e = q.energy_bits(&incumbent.best_assignment.bits());
    let mut bnb = Bnb {
        n,
        forward,
        neg_tail,
        eff: q.linear().to_vec(),
        z: vec![0; n],
        best_e: seed_e + 2.0 * tol,
        best_z: None,
        tol,
        nodes: 0,
    };
    bnb.search(0, q.offset());
    let z = bnb
        .best_z
        .unwrap_or_else(|| incumbent.best_assignment.bits());
    let spins: Vec<i8> = z.into_iter().map(bit_to_spin).collect();
    let (best_assignment, best_energy) = finish(m, &spins);
    Ok(SolveResult {
        best_assignment: best_assignment.clone(),
        best_energy,
        samples: Some(vec![(best_assignment, best_energy)]),
        sweeps_used: bnb.nodes,
        seed: 0,
        elapsed: start.elapsed(),
        best_found_at: 0,
        optimal_count: None,
    })
}

/// Brute force for small models, branch and bound otherwise.
pub fn exact_minimum<M: QuadraticModel + ?Sized>(m: &M) -> Result<SolveResult> {
    if m.num_vars() <= 22 {
        brute_force(m)
    } else {
        branch_and_bound(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{IsingBuilder, QuboBuilder};

    #[test]
    fn single_spin() {
        let mut b = IsingBuilder::new(1);
        b.add_field(0, 1.0);
        let r = brute_force(&b.build()).unwrap();
        assert_eq!(r.best_assignment.spins(), vec![1]);
        assert_eq!(r.best_energy, -1.0);
        assert_eq!(r.optimal_count, Some(1));
    }

    #[test]
    fn antiferromagnet_ties_break_lexicographically() {
        let mut b = IsingBuilder::new(2);
        b.add_coupling(0, 1, 1.0);
        let r = brute_force(&b.build()).unwrap();
        assert_eq!(r.optimal_count, Some(2));
        assert_eq!(r.best_energy, -1.0);
        // bit strings 01 and 10; 01 is smaller
        assert_eq!(r.best_assignment.bits(), vec![0, 1]);
    }

    #[test]
    fn size_guard() {
        let q = crate::model::QuboModel::zero(31);
        assert!(matches!(brute_force(&q), Err(ForgeError::TooLarge { .. })));
    }

    #[test]
    fn bnb_agrees_with_enumeration() {
        let mut b = QuboBuilder::new(10);
        let coeffs = [3.0, -2.0, 1.0, -1.0, 2.0, -3.0, 1.0, 0.5, -0.5, 2.5];
        for i in 0..10 {
            b.add_linear(i, coeffs[i] - 0.5);
            for j in i + 1..10 {
                let c = coeffs[(i * 7 + j * 3) % 10];
                b.add_quadratic(i, j, c);
            }
        }
        let q = b.build();
        let bf = brute_force(&q).unwrap();
        let bb = branch_and_bound(&q).unwrap();
        assert_eq!(bf.best_energy, bb.best_energy);
        assert_eq!(bf.best_assignment, bb.best_assignment);
    }
}
