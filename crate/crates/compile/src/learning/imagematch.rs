//! Largest consistent set of feature matches as a maximum independent set.
//!
//! Each candidate match is a vertex. Two matches conflict when they share a
//! feature point in either image or when the caller's predicate says they
//! disagree geometrically. With `L` candidates the cost is `-sum_v z_v` plus
//! `L z_u z_v` on every conflict edge.

use forge_core::{QuboBuilder, QuboModel};
use serde::{Deserialize, Serialize};

use crate::error::{CompileError, Result};

/// Feature `left` of the first image paired with feature `right` of the second.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidatePair {
    pub left: usize,
    pub right: usize,
}

/// Conflict edges `(a, b)` with `a < b`, including shared-endpoint conflicts.
pub fn conflict_edges<F>(pairs: &[CandidatePair], conflict: F) -> Vec<(usize, usize)>
where
    F: Fn(usize, usize) -> bool,
{
    let mut edges = Vec::new();
    for a in 0..pairs.len() {
        for b in a + 1..pairs.len() {
            let shared = pairs[a].left == pairs[b].left || pairs[a].right == pairs[b].right;
            if shared || conflict(a, b) {
                edges.push((a, b));
            }
        }
    }
    edges
}

pub fn imagematch_compile<F>(pairs: &[CandidatePair], conflict: F) -> Result<QuboModel>
where
    F: Fn(usize, usize) -> bool,
{
    let n = pairs.len();
    for a in 0..n {
        for b in a + 1..n {
            if conflict(a, b) != conflict(b, a) {
                return Err(CompileError::InvalidInput(format!(
                    "conflict predicate is not symmetric on ({a}, {b})"
                )));
            }
        }
    }
    let l = n as f64;
    let mut q = QuboBuilder::new(n);
    for v in 0..n {
        q.add_linear(v, -1.0);
    }
    for (a, b) in conflict_edges(pairs, conflict) {
        q.add_quadratic(a, b, l);
    }
    Ok(q.build())
}

/// Reference predicate for a rigid registration: matches `a` and `b` agree
/// when the distance between their left points and the distance between
/// their right points differ by at most `tol` relative to the larger one.
pub fn distance_ratio_conflict<'a>(
    left: &'a [[f64; 2]],
    right: &'a [[f64; 2]],
    pairs: &'a [CandidatePair],
    tol: f64,
) -> impl Fn(usize, usize) -> bool + 'a {
    let dist = |p: [f64; 2], q: [f64; 2]| ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt();
    move |a, b| {
        let dl = dist(left[pairs[a].left], left[pairs[b].left]);
        let dr = dist(right[pairs[a].right], right[pairs[b].right]);
        (dl - dr).abs() > tol * dl.max(dr)
    }
}

/// Selected matches, and whether they are pairwise conflict free.
pub fn decode_matches(edges: &[(usize, usize)], bits: &[u8]) -> (Vec<usize>, bool) {
    let chosen: Vec<usize> = (0..bits.len()).filter(|&v| bits[v] == 1).collect();
    let independent = edges.iter().all(|&(a, b)| bits[a] == 0 || bits[b] == 0);
    (chosen, independent)
}

#[cfg(test)]
mod tests {
    use super::*;
    use forge_core::solvers::brute_force;

    fn distinct(n: usize) -> Vec<CandidatePair> {
        (0..n)
            .map(|i| CandidatePair { left: i, right: i })
            .collect()
    }

    #[test]
    fn no_conflicts_selects_everything() {
        let pairs = distinct(4);
        let r = brute_force(&imagematch_compile(&pairs, |_, _| false).unwrap()).unwrap();
        assert_eq!(r.best_energy, -4.0);
        assert_eq!(r.best_assignment.bits(), vec![1; 4]);
    }

    #[test]
    fn complete_conflicts_select_one() {
        let pairs = distinct(5);
        let r = brute_force(&imagematch_compile(&pairs, |_, _| true).unwrap()).unwrap();
        assert_eq!(r.best_energy, -1.0);
        assert_eq!(
            r.best_assignment.bits().iter().filter(|&&b| b == 1).count(),
            1
        );
    }

    #[test]
    fn shared_points_conflict() {
        let pairs = [
            CandidatePair { left: 0, right: 0 },
            CandidatePair { left: 0, right: 1 },
        ];
        assert_eq!(conflict_edges(&pairs, |_, _| false), vec![(0, 1)]);
    }

    #[test]
    fn ratio_predicate() {
        let left = [[0.0, 0.0], [1.0, 0.0], [0.0, 3.0]];
        let right = [[5.0, 5.0], [5.0, 6.0], [9.0, 5.0]];
        let pairs = distinct(3);
        let c = distance_ratio_conflict(&left, &right, &pairs, 0.1);
        assert!(!c(0, 1));
        assert!(c(0, 2));
        assert_eq!(c(0, 2), c(2, 0));
    }
}
