//! Dense state vectors over the computational basis.
//!
//! Basis state `|z>` sits at the lexicographic rank of the bit string `z`,
//! with qubit 0 as the most significant bit, so for two qubits the order is
//! `|00>, |01>, |10>, |11>`.

use forge_core::IsingModel;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{QaError, Result};
use crate::hamiltonian::problem_diagonal;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantumState {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl QuantumState {
    pub fn from_amplitudes(num_qubits: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        let expected = 1usize << num_qubits;
        if amplitudes.len() != expected {
            return Err(QaError::DimensionMismatch {
                expected,
                got: amplitudes.len(),
            });
        }
        Ok(Self {
            num_qubits,
            amplitudes,
        })
    }

    /// Equal-weight superposition of all basis states, the ground state of
    /// the driver.
    pub fn uniform(num_qubits: usize) -> Self {
        let dim = 1usize << num_qubits;
        let a = Complex64::new(1.0 / (dim as f64).sqrt(), 0.0);
        Self {
            num_qubits,
            amplitudes: vec![a; dim],
        }
    }

    pub fn basis(num_qubits: usize, index: usize) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << num_qubits];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Self {
            num_qubits,
            amplitudes,
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|c| c.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|c| c.norm_sqr()).collect()
    }

    /// Total probability on the given basis indices.
    pub fn probability_of(&self, indices: &[usize]) -> f64 {
        indices.iter().map(|&k| self.amplitudes[k].norm_sqr()).sum()
    }
}

/// Mean and variance of the problem energy when `state` is measured in the
/// computational basis.
pub fn measurement_stats(state: &QuantumState, m: &IsingModel) -> Result<(f64, f64)> {
    if m.num_spins() != state.num_qubits() {
        return Err(QaError::DimensionMismatch {
            expected: 1 << m.num_spins(),
            got: state.dim(),
        });
    }
    let diag = problem_diagonal(m);
    Ok(stats_on_diagonal(state, &diag))
}

pub(crate) fn stats_on_diagonal(state: &QuantumState, diag: &[f64]) -> (f64, f64) {
    let p = state.probabilities();
    let mean: f64 = p.iter().zip(diag).map(|(p, e)| p * e).sum();
    let var: f64 = p
        .iter()
        .zip(diag)
        .map(|(p, e)| p * (e - mean) * (e - mean))
        .sum();
    (mean, var)
}
