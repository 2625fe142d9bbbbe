//! Lowest eigenpairs of the annealing operator.
//!
//! Small registers use a dense symmetric solve. Larger ones use Lanczos with
//! full reorthogonalisation, finding one eigenpair at a time and locking it
//! so that degenerate copies are found as well.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{QaError, Result};
use crate::hamiltonian::{Operator, DENSE_LIMIT};

/// Registers up to this size use the dense solver under [`EigenMethod::Auto`].
pub const AUTO_DENSE_LIMIT: usize = 10;
/// Lanczos is limited to a handful of eigenpairs.
pub const LANCZOS_MAX_K: usize = 6;
pub const LANCZOS_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EigenMethod {
    #[default]
    Auto,
    Dense,
    Lanczos,
}

/// Lowest eigenvalues in ascending order with unit eigenvectors.
#[derive(Debug, Clone)]
pub struct Eigenpairs {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

pub fn lowest_eigenpairs(op: &Operator<'_>, k: usize, method: EigenMethod) -> Result<Eigenpairs> {
    let dim = op.dim();
    if k == 0 || k > dim {
        return Err(QaError::InvalidParameter(format!(
            "cannot take {k} eigenpairs of a {dim}-dimensional operator"
        )));
    }
    if op.is_diagonal() {
        return Ok(diagonal_pairs(op, k));
    }
    let use_dense = match method {
        EigenMethod::Dense => true,
        EigenMethod::Lanczos => false,
        EigenMethod::Auto => op.num_qubits() <= AUTO_DENSE_LIMIT,
    };
    if use_dense {
        dense_pairs(op, k)
    } else {
        lanczos_pairs(op, k)
    }
}

/// Exact spectrum of a diagonal operator; equal values keep basis order.
fn diagonal_pairs(op: &Operator<'_>, k: usize) -> Eigenpairs {
    let diag = op.diagonal();
    let mut idx: Vec<usize> = (0..diag.len()).collect();
    idx.sort_by(|&a, &b| diag[a].total_cmp(&diag[b]).then(a.cmp(&b)));
    let values = idx[..k].iter().map(|&i| diag[i]).collect();
    let vectors = idx[..k]
        .iter()
        .map(|&i| {
            let mut v = vec![0.0; diag.len()];
            v[i] = 1.0;
            v
        })
        .collect();
    Eigenpairs { values, vectors }
}

fn dense_pairs(op: &Operator<'_>, k: usize) -> Result<Eigenpairs> {
    if op.num_qubits() > DENSE_LIMIT {
        return Err(QaError::TooLarge {
            num_qubits: op.num_qubits(),
            limit: DENSE_LIMIT,
            what: "dense eigensolve",
        });
    }
    let eig = SymmetricEigen::new(op.to_dense()?);
    let mut idx: Vec<usize> = (0..op.dim()).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = idx[..k].iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = idx[..k]
        .iter()
        .map(|&i| eig.eigenvectors.column(i).iter().copied().collect())
        .collect();
    Ok(Eigenpairs { values, vectors })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Two passes of classical Gram-Schmidt against every vector in `basis`.
fn orthogonalize(v: &mut [f64], basis: &[&[f64]]) {
    for _ in 0..2 {
        for b in basis {
            let c = dot(v, b);
            axpy(-c, b, v);
        }
    }
}

fn lanczos_pairs(op: &Operator<'_>, k: usize) -> Result<Eigenpairs> {
    if k > LANCZOS_MAX_K {
        return Err(QaError::InvalidParameter(format!(
            "Lanczos supports at most {LANCZOS_MAX_K} eigenpairs, got {k}"
        )));
    }
    let dim = op.dim();
    let krylov = if dim > 1 << 16 { 30 } else { 60 };
    let max_restarts = 200;
    let mut rng = ChaCha8Rng::seed_from_u64(0x1a2c_2055);
    let mut values = Vec::with_capacity(k);
    let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut w = vec![0.0; dim];

    for _ in 0..k {
        let mut start: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut last_residual = f64::INFINITY;
        let mut found = None;
        for restart in 0..max_restarts {
            let locked: Vec<&[f64]> = vectors.iter().map(|v| v.as_slice()).collect();
            orthogonalize(&mut start, &locked);
            let nrm = norm(&start);
            if nrm == 0.0 {
                return Err(QaError::NoConvergence {
                    residual: f64::NAN,
                    iterations: restart,
                });
            }
            start.iter_mut().for_each(|x| *x /= nrm);

            let m_max = krylov.min(dim - vectors.len());
            let mut q: Vec<Vec<f64>> = vec![start.clone()];
            let mut alpha = Vec::with_capacity(m_max);
            let mut beta: Vec<f64> = Vec::with_capacity(m_max);
            loop {
                let j = q.len() - 1;
                op.apply(&q[j], &mut w);
                let a = dot(&w, &q[j]);
                alpha.push(a);
                if q.len() == m_max {
                    break;
                }
                let mut basis: Vec<&[f64]> = locked.clone();
                basis.extend(q.iter().map(|v| v.as_slice()));
                orthogonalize(&mut w, &basis);
                let b = norm(&w);
                if b < 1e-12 {
                    break;
                }
                beta.push(b);
                q.push(w.iter().map(|x| x / b).collect());
            }

            let m = alpha.len();
            let mut t = DMatrix::zeros(m, m);
            for i in 0..m {
                t[(i, i)] = alpha[i];
                if i + 1 < m {
                    t[(i, i + 1)] = beta[i];
                    t[(i + 1, i)] = beta[i];
                }
            }
            let eig = SymmetricEigen::new(t);
            let imin = (0..m)
                .min_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]))
                .unwrap();
            let theta = eig.eigenvalues[imin];
            let mut x = vec![0.0; dim];
            for (i, qi) in q.iter().enumerate() {
                axpy(eig.eigenvectors[(i, imin)], qi, &mut x);
            }
            orthogonalize(&mut x, &locked);
            let nx = norm(&x);
            x.iter_mut().for_each(|v| *v /= nx);
            op.apply(&x, &mut w);
            axpy(-theta, &x, &mut w);
            last_residual = norm(&w);
            if last_residual <= LANCZOS_TOL * theta.abs().max(1.0) {
                // Rayleigh quotient, since w = Hx - theta x
                found = Some((theta + dot(&x, &w), x));
                break;
            }
            start = x;
        }
        match found {
            Some((theta, x)) => {
                values.push(theta);
                vectors.push(x);
            }
            None => {
                return Err(QaError::NoConvergence {
                    residual: last_residual,
                    iterations: max_restarts,
                });
            }
        }
    }
    // Locking finds eigenvalues in order up to round-off; sort to be safe.
    let mut idx: Vec<usize> = (0..k).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    Ok(Eigenpairs {
        values: idx.iter().map(|&i| values[i]).collect(),
        vectors: idx.iter().map(|&i| vectors[i].clone()).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::ControlHamiltonian;
    use forge_core::{IsingBuilder, IsingModel};

    #[test]
    fn single_qubit_driver() {
        let ch = ControlHamiltonian::new(IsingModel::zero(1), 1.0, 1.0).unwrap();
        let p = lowest_eigenpairs(&ch.at(0.0), 2, EigenMethod::Dense).unwrap();
        assert!((p.values[0] + 1.0).abs() < 1e-14);
        assert!((p.values[1] - 1.0).abs() < 1e-14);
        // symmetric ground state, antisymmetric excited state
        let g = &p.vectors[0];
        let e = &p.vectors[1];
        assert!((g[0] - g[1]).abs() < 1e-12);
        assert!((e[0] + e[1]).abs() < 1e-12);
    }

    #[test]
    fn lanczos_matches_dense_with_degeneracy() {
        // zero problem: driver spectrum -N, -N+2 (N-fold), ...
        let mut b = IsingBuilder::new(6);
        b.add_coupling(0, 1, -1.0)
            .add_coupling(2, 3, -1.0)
            .add_coupling(4, 5, -1.0);
        let ch = ControlHamiltonian::new(b.build(), 1.0, 1.0).unwrap();
        for s in [0.0, 0.3, 0.7] {
            let d = lowest_eigenpairs(&ch.at(s), 6, EigenMethod::Dense).unwrap();
            let l = lowest_eigenpairs(&ch.at(s), 6, EigenMethod::Lanczos).unwrap();
            for i in 0..6 {
                assert!(
                    (d.values[i] - l.values[i]).abs() < 1e-7,
                    "s={s} i={i}: {} vs {}",
                    d.values[i],
                    l.values[i]
                );
            }
        }
    }
}
