//! Interpolated annealing Hamiltonian in matrix-free form.
//!
//! `H(s) = (1 - s) H_D + s H_P` with the driver `H_D = -delta * sum_i X_i`
//! and the diagonal problem part `H_P |z> = E(z) |z>`. The action on a
//! vector costs `O(N 2^N)` and never stores the matrix.

use forge_core::assignment::bit_to_spin;
use forge_core::IsingModel;
use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{QaError, Result};

/// Largest register the matrix-free operator accepts.
pub const ACTION_LIMIT: usize = 20;
/// Largest register that may be materialised densely.
pub const DENSE_LIMIT: usize = 12;

/// Ising energies of all basis states in basis order.
pub fn problem_diagonal(m: &IsingModel) -> Vec<f64> {
    let n = m.num_spins();
    let mut s = vec![0i8; n];
    (0..1usize << n)
        .map(|k| {
            for (i, si) in s.iter_mut().enumerate() {
                *si = bit_to_spin(((k >> (n - 1 - i)) & 1) as u8);
            }
            m.energy_spins(&s)
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct ControlHamiltonian {
    problem: IsingModel,
    delta: f64,
    total_time: f64,
    diag: Vec<f64>,
}

impl ControlHamiltonian {
    pub fn new(problem: IsingModel, delta: f64, total_time: f64) -> Result<Self> {
        let n = problem.num_spins();
        if n == 0 || n > ACTION_LIMIT {
            return Err(QaError::TooLarge {
                num_qubits: n,
                limit: ACTION_LIMIT,
                what: "the annealing operator",
            });
        }
        if !delta.is_finite() || delta < 0.0 {
            return Err(QaError::InvalidParameter(format!(
                "tunneling amplitude {delta} must be >= 0"
            )));
        }
        if !(total_time.is_finite() && total_time > 0.0) {
            return Err(QaError::InvalidParameter(format!(
                "anneal time {total_time} must be > 0"
            )));
        }
        let diag = problem_diagonal(&problem);
        Ok(Self {
            problem,
            delta,
            total_time,
            diag,
        })
    }

    pub fn problem(&self) -> &IsingModel {
        &self.problem
    }

    pub fn num_qubits(&self) -> usize {
        self.problem.num_spins()
    }

    pub fn dim(&self) -> usize {
        1 << self.num_qubits()
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn total_time(&self) -> f64 {
        self.total_time
    }

    pub fn with_total_time(&self, total_time: f64) -> Result<Self> {
        Self::new(self.problem.clone(), self.delta, total_time)
    }

    /// Problem energies in basis order.
    pub fn diagonal(&self) -> &[f64] {
        &self.diag
    }

    /// Basis indices of all minimum-energy configurations.
    pub fn ground_indices(&self) -> Vec<usize> {
        let min = self.diag.iter().copied().fold(f64::INFINITY, f64::min);
        let tol = 1e-9 * min.abs().max(1.0);
        (0..self.dim())
            .filter(|&k| self.diag[k] <= min + tol)
            .collect()
    }

    pub fn at(&self, s: f64) -> Operator<'_> {
        Operator {
            diag: &self.diag,
            n: self.num_qubits(),
            s,
            delta: self.delta,
        }
    }
}

/// `H(s)` for a fixed interpolation parameter.
#[derive(Debug, Clone, Copy)]
pub struct Operator<'a> {
    diag: &'a [f64],
    n: usize,
    s: f64,
    delta: f64,
}

impl Operator<'_> {
    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    /// Matrix element between basis states one bit flip apart.
    pub fn off_diagonal(&self) -> f64 {
        -(1.0 - self.s) * self.delta
    }

    /// Diagonal entries `s E(z)`.
    pub fn diagonal(&self) -> Vec<f64> {
        self.diag.iter().map(|e| self.s * e).collect()
    }

    /// True when the operator is diagonal (no tunneling term).
    pub fn is_diagonal(&self) -> bool {
        self.off_diagonal() == 0.0
    }

    /// `out = H(s) v` for a real vector.
    pub fn apply(&self, v: &[f64], out: &mut [f64]) {
        let t = self.off_diagonal();
        for (k, o) in out.iter_mut().enumerate() {
            let mut acc = self.s * self.diag[k] * v[k];
            if t != 0.0 {
                let mut flips = 0.0;
                for q in 0..self.n {
                    flips += v[k ^ (1 << q)];
                }
                acc += t * flips;
            }
            *o = acc;
        }
    }

    /// `out = H(s) v` for a complex vector.
    pub fn apply_complex(&self, v: &[Complex64], out: &mut [Complex64]) {
        let t = self.off_diagonal();
        for (k, o) in out.iter_mut().enumerate() {
            let mut acc = v[k] * (self.s * self.diag[k]);
            if t != 0.0 {
                let mut flips = Complex64::new(0.0, 0.0);
                for q in 0..self.n {
                    flips += v[k ^ (1 << q)];
                }
                acc += flips * t;
            }
            *o = acc;
        }
    }

    /// Dense matrix of the operator; guarded to [`DENSE_LIMIT`] qubits.
    pub fn to_dense(&self) -> Result<DMatrix<f64>> {
        if self.n > DENSE_LIMIT {
            return Err(QaError::TooLarge {
                num_qubits: self.n,
                limit: DENSE_LIMIT,
                what: "dense materialisation",
            });
        }
        let dim = self.dim();
        let t = self.off_diagonal();
        let mut h = DMatrix::zeros(dim, dim);
        for k in 0..dim {
            h[(k, k)] = self.s * self.diag[k];
            for q in 0..self.n {
                h[(k, k ^ (1 << q))] += t;
            }
        }
        Ok(h)
    }
}

/// Dense driver `H_D = -delta sum_i X_i`, independent of [`Operator`].
pub fn dense_driver(n: usize, delta: f64) -> Result<DMatrix<f64>> {
    if n > DENSE_LIMIT {
        return Err(QaError::TooLarge {
            num_qubits: n,
            limit: DENSE_LIMIT,
            what: "dense materialisation",
        });
    }
    // Kronecker sum of single-qubit X blocks.
    let x = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
    let id = DMatrix::<f64>::identity(2, 2);
    let dim = 1usize << n;
    let mut total = DMatrix::zeros(dim, dim);
    for q in 0..n {
        let mut term = DMatrix::<f64>::identity(1, 1);
        for pos in 0..n {
            term = term.kronecker(if pos == q { &x } else { &id });
        }
        total += term;
    }
    Ok(total * -delta)
}
