//! Boltzmann distributions `p(s) ~ exp(-beta E(s))` over Ising models, by
//! enumeration or by heat-bath Gibbs sampling.

use forge_core::solvers::SpinSystem;
use forge_core::{assignment::index_to_bits, bit_to_spin, spin_to_bit, IsingModel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{HybridError, Result};

/// Largest spin count enumerated exactly.
pub const EXACT_LIMIT: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoltzmannModel {
    pub base: IsingModel,
    pub beta: f64,
}

impl BoltzmannModel {
    pub fn new(base: IsingModel, beta: f64) -> Result<Self> {
        if !(beta >= 0.0 && beta.is_finite()) {
            return Err(HybridError::InvalidParameter(format!(
                "beta must be finite and non-negative, got {beta}"
            )));
        }
        Ok(Self { base, beta })
    }

    pub fn num_spins(&self) -> usize {
        self.base.num_spins()
    }
}

/// Probabilities indexed by the bit-string rank of the configuration, with
/// spin 0 most significant and `s = 1 - 2z`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Distribution {
    pub num_spins: usize,
    pub probs: Vec<f64>,
    pub log_partition: f64,
}

impl Distribution {
    pub fn index_of(spins: &[i8]) -> usize {
        spins
            .iter()
            .fold(0usize, |acc, &s| (acc << 1) | spin_to_bit(s) as usize)
    }

    pub fn spins_of(&self, index: usize) -> Vec<i8> {
        index_to_bits(index as u64, self.num_spins)
            .into_iter()
            .map(bit_to_spin)
            .collect()
    }

    pub fn prob(&self, spins: &[i8]) -> f64 {
        self.probs[Self::index_of(spins)]
    }

    /// `P(s_i = +1)` for every spin.
    pub fn marginals(&self) -> Vec<f64> {
        let n = self.num_spins;
        let mut m = vec![0.0; n];
        for (k, &p) in self.probs.iter().enumerate() {
            for (i, mi) in m.iter_mut().enumerate() {
                if (k >> (n - 1 - i)) & 1 == 0 {
                    *mi += p;
                }
            }
        }
        m
    }

    /// Expectation of `f(spins)`.
    pub fn expect(&self, mut f: impl FnMut(&[i8]) -> f64) -> f64 {
        self.probs
            .iter()
            .enumerate()
            .map(|(k, &p)| {
                if p > 0.0 {
                    p * f(&self.spins_of(k))
                } else {
                    0.0
                }
            })
            .sum()
    }
}

pub fn exact_boltzmann(bm: &BoltzmannModel) -> Result<Distribution> {
    let n = bm.num_spins();
    if n > EXACT_LIMIT {
        return Err(HybridError::TooLarge {
            n,
            limit: EXACT_LIMIT,
        });
    }
    let sys = SpinSystem::new(&bm.base);
    let size = 1usize << n;
    let mut logw = Vec::with_capacity(size);
    for k in 0..size {
        let s: Vec<i8> = index_to_bits(k as u64, n)
            .into_iter()
            .map(bit_to_spin)
            .collect();
        logw.push(-bm.beta * sys.energy(&s));
    }
    let max = logw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut probs: Vec<f64> = logw.iter().map(|l| (l - max).exp()).collect();
    let z: f64 = probs.iter().sum();
    probs.iter_mut().for_each(|p| *p /= z);
    Ok(Distribution {
        num_spins: n,
        probs,
        log_partition: max + z.ln(),
    })
}

/// Heat-bath sweeps over spins `0..N` in order from a seeded random start.
/// Returns the configuration after each sweep past `burn_in`.
pub fn gibbs_sample(
    bm: &BoltzmannModel,
    sweeps: usize,
    burn_in: usize,
    seed: u64,
) -> Result<Vec<Vec<i8>>> {
    if sweeps <= burn_in {
        return Err(HybridError::InvalidParameter(format!(
            "sweeps ({sweeps}) must exceed burn-in ({burn_in})"
        )));
    }
    let sys = SpinSystem::new(&bm.base);
    let n = sys.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s: Vec<i8> = (0..n)
        .map(|_| if rng.gen::<bool>() { 1 } else { -1 })
        .collect();
    let mut out = Vec::with_capacity(sweeps - burn_in);
    for sweep in 0..sweeps {
        for i in 0..n {
            // E(+1) - E(-1) = 2f
            let f = -sys.h[i]
                + sys
                    .neighbors(i)
                    .iter()
                    .map(|&(j, c)| c * s[j] as f64)
                    .sum::<f64>();
            let p_up = 1.0 / (1.0 + (2.0 * bm.beta * f).exp());
            s[i] = if rng.gen::<f64>() < p_up { 1 } else { -1 };
        }
        if sweep >= burn_in {
            out.push(s.clone());
        }
    }
    Ok(out)
}

/// Sample frequencies in the layout of [`Distribution::probs`].
pub fn empirical_distribution(samples: &[Vec<i8>], num_spins: usize) -> Result<Vec<f64>> {
    if num_spins > EXACT_LIMIT {
        return Err(HybridError::TooLarge {
            n: num_spins,
            limit: EXACT_LIMIT,
        });
    }
    let mut p = vec![0.0; 1 << num_spins];
    for s in samples {
        if s.len() != num_spins {
            return Err(HybridError::InvalidInput(format!(
                "sample of length {} for {num_spins} spins",
                s.len()
            )));
        }
        p[Distribution::index_of(s)] += 1.0;
    }
    if !samples.is_empty() {
        let w = 1.0 / samples.len() as f64;
        p.iter_mut().for_each(|x| *x *= w);
    }
    Ok(p)
}

pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    assert_eq!(p.len(), q.len(), "distributions differ in support size");
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}
