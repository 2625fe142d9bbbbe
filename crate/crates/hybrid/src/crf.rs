//! Conditional log-likelihood of structured labellings under
//! `P(z | x, w) ~ exp(-beta E(x, z, w))`.
//!
//! The negative log-likelihood is `sum_d [beta E(x_d, z_d, w) + ln Z(x_d, w)]`
//! and its gradient in weight `(k, (i, j))` is
//! `beta sum_d psi_k(x_d) [z_d(i) z_d(j) - E_P(z(i) z(j))]`.

use forge_compile::learning::structured::{structured_energy, Example, StructuredModel};
use forge_core::{qubo_to_ising, spin_to_bit};
use serde::{Deserialize, Serialize};

use crate::boltzmann::{exact_boltzmann, gibbs_sample, BoltzmannModel, EXACT_LIMIT};
use crate::error::{HybridError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Estimator {
    Exact,
    /// Example `d` uses seed `seed + d`.
    Gibbs {
        sweeps: usize,
        burn_in: usize,
        seed: u64,
    },
}

fn check(data: &[Example], model: &StructuredModel, beta: f64) -> Result<()> {
    if !(beta >= 0.0 && beta.is_finite()) {
        return Err(HybridError::InvalidParameter(format!(
            "beta must be finite and non-negative, got {beta}"
        )));
    }
    for ex in data {
        if ex.z.len() != model.num_labels() || ex.z.iter().any(|&v| v > 1) {
            return Err(HybridError::InvalidInput(format!(
                "labelling must be {} bits, got {:?}",
                model.num_labels(),
                ex.z
            )));
        }
    }
    Ok(())
}

fn conditional(ex: &Example, model: &StructuredModel, beta: f64) -> Result<BoltzmannModel> {
    let q = structured_energy(&ex.x, model)?;
    BoltzmannModel::new(qubo_to_ising(&q), beta)
}

pub fn crf_negative_log_likelihood(
    data: &[Example],
    model: &StructuredModel,
    beta: f64,
) -> Result<f64> {
    check(data, model, beta)?;
    if model.num_labels() > EXACT_LIMIT {
        return Err(HybridError::TooLarge {
            n: model.num_labels(),
            limit: EXACT_LIMIT,
        });
    }
    let mut total = 0.0;
    for ex in data {
        let q = structured_energy(&ex.x, model)?;
        let d = exact_boltzmann(&BoltzmannModel::new(qubo_to_ising(&q), beta)?)?;
        total += beta * q.energy_bits(&ex.z) + d.log_partition;
    }
    Ok(total)
}

/// Gradient of [`crf_negative_log_likelihood`] with respect to the weights,
/// with model moments either enumerated or estimated by Gibbs sampling.
pub fn crf_loglik_gradient(
    data: &[Example],
    model: &StructuredModel,
    beta: f64,
    estimator: Estimator,
) -> Result<Vec<f64>> {
    check(data, model, beta)?;
    if estimator == Estimator::Exact && model.num_labels() > EXACT_LIMIT {
        return Err(HybridError::TooLarge {
            n: model.num_labels(),
            limit: EXACT_LIMIT,
        });
    }
    let mut grad = vec![0.0; model.num_weights()];
    for (d, ex) in data.iter().enumerate() {
        let observed = model.joint_features(&ex.x, &ex.z)?;
        let bm = conditional(ex, model, beta)?;
        let mut expected = vec![0.0; grad.len()];
        match estimator {
            Estimator::Exact => {
                let dist = exact_boltzmann(&bm)?;
                for (k, &p) in dist.probs.iter().enumerate() {
                    if p == 0.0 {
                        continue;
                    }
                    let z: Vec<u8> = dist.spins_of(k).into_iter().map(spin_to_bit).collect();
                    for (e, f) in expected.iter_mut().zip(model.joint_features(&ex.x, &z)?) {
                        *e += p * f;
                    }
                }
            }
            Estimator::Gibbs {
                sweeps,
                burn_in,
                seed,
            } => {
                let samples = gibbs_sample(&bm, sweeps, burn_in, seed.wrapping_add(d as u64))?;
                let w = 1.0 / samples.len() as f64;
                for s in &samples {
                    let z: Vec<u8> = s.iter().map(|&v| spin_to_bit(v)).collect();
                    for (e, f) in expected.iter_mut().zip(model.joint_features(&ex.x, &z)?) {
                        *e += w * f;
                    }
                }
            }
        }
        for ((g, o), e) in grad.iter_mut().zip(observed).zip(expected) {
            *g += beta * (o - e);
        }
    }
    Ok(grad)
}
