//! Distance-based clustering.
//!
//! Two clusters: `E = -sum_{i,j} d_ij z_i (1 - z_j)`, the negated weight of
//! the cut between the `z = 0` and `z = 1` points. `K` clusters use one-hot
//! indicators `z_{i,k}` at index `i*K + k` and
//! `E = sum_k sum_{i,j} d_ij z_{i,k} z_{j,k} + A sum_i (sum_k z_{i,k} - 1)^2`.

use forge_core::{QuboBuilder, QuboModel};

use super::points::PointSet;
use crate::error::{CompileError, Result};

fn check_k(p: &PointSet, k: usize) -> Result<()> {
    if k < 2 {
        return Err(CompileError::InvalidParameter(format!(
            "need at least two clusters, got {k}"
        )));
    }
    if k > p.len() {
        return Err(CompileError::InvalidParameter(format!(
            "{k} clusters for {} points",
            p.len()
        )));
    }
    Ok(())
}

/// `1 + sum_{i<j} d_ij`, larger than any distance saving from breaking a
/// one-hot row.
pub fn default_penalty(p: &PointSet) -> f64 {
    let mut s = 1.0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            s += p.distance(i, j);
        }
    }
    s
}

/// Two clusters use the cut form; more use the one-hot form with penalty
/// `a` (default [`default_penalty`]).
pub fn qcut_compile(p: &PointSet, k: usize, a: Option<f64>) -> Result<QuboModel> {
    check_k(p, k)?;
    if k == 2 {
        let n = p.len();
        let mut b = QuboBuilder::new(n);
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    let d = p.distance(i, j);
                    b.add_linear(i, -d);
                    b.add_quadratic(i, j, d);
                }
            }
        }
        Ok(b.try_build()?)
    } else {
        qcut_compile_onehot(p, k, a)
    }
}

/// One-hot form for any `k >= 2`.
pub fn qcut_compile_onehot(p: &PointSet, k: usize, a: Option<f64>) -> Result<QuboModel> {
    check_k(p, k)?;
    let a = a.unwrap_or_else(|| default_penalty(p));
    if !(a > 0.0 && a.is_finite()) {
        return Err(CompileError::InvalidParameter(format!(
            "penalty must be positive, got {a}"
        )));
    }
    let n = p.len();
    let mut b = QuboBuilder::new(n * k);
    for c in 0..k {
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    b.add_quadratic(i * k + c, j * k + c, p.distance(i, j));
                }
            }
        }
    }
    for i in 0..n {
        let row: Vec<(usize, f64)> = (0..k).map(|c| (i * k + c, 1.0)).collect();
        b.add_squared_linear(&row, -1.0, a);
    }
    Ok(b.try_build()?)
}

/// Cluster label per point. Two-cluster models map bits directly; one-hot
/// models need exactly one bit per row.
pub fn qcut_decode(n: usize, k: usize, bits: &[u8]) -> Result<Vec<usize>> {
    if k == 2 && bits.len() == n {
        return Ok(bits.iter().map(|&b| b as usize).collect());
    }
    if bits.len() != n * k {
        return Err(CompileError::InvalidInput(format!(
            "{} bits for {n} points and {k} clusters",
            bits.len()
        )));
    }
    (0..n)
        .map(|i| {
            let row = &bits[i * k..(i + 1) * k];
            match row.iter().filter(|&&b| b == 1).count() {
                1 => Ok(row.iter().position(|&b| b == 1).unwrap()),
                c => Err(CompileError::InvalidInput(format!(
                    "point {i} is in {c} clusters"
                ))),
            }
        })
        .collect()
}

/// Total distance between points in different clusters.
pub fn cut_value(p: &PointSet, labels: &[usize]) -> f64 {
    let mut s = 0.0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if labels[i] != labels[j] {
                s += p.distance(i, j);
            }
        }
    }
    s
}
