//! Selecting a sparse subset of weak classifiers.
//!
//! Weak classifier outputs are stored normalised to `±1/N` for a dictionary of
//! `N` classifiers. The cost of a selection `z` is
//! `sum_{i,j} C'_ij z_i z_j + 2 sum_i (lambda - C'_iy) z_i` with
//! `C'_ij = h_i . h_j` and `C'_iy = h_i . y`; up to the constant `|y|^2` it is
//! the squared distance between the labels and the unthresholded vote plus a
//! sparsity charge.

use forge_core::{QuboBuilder, QuboModel};
use serde::{Deserialize, Serialize};

use crate::error::{CompileError, Result};

/// Outputs of `N` weak classifiers on `S` training samples, with labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeakClassifierMatrix {
    /// `h[s][i] = h_i(x_s)`, each `±1/N`.
    h: Vec<Vec<f64>>,
    y: Vec<i8>,
}

impl WeakClassifierMatrix {
    /// `outputs[s][i]` is the `±1` vote of classifier `i` on sample `s`.
    pub fn new(outputs: &[Vec<i8>], labels: &[i8]) -> Result<Self> {
        if outputs.is_empty() {
            return Err(CompileError::InvalidInput("empty training set".into()));
        }
        if outputs.len() != labels.len() {
            return Err(CompileError::InvalidInput(format!(
                "{} samples but {} labels",
                outputs.len(),
                labels.len()
            )));
        }
        let n = outputs[0].len();
        if n == 0 {
            return Err(CompileError::InvalidInput("no weak classifiers".into()));
        }
        let check = |v: i8| v == 1 || v == -1;
        if let Some(row) = outputs
            .iter()
            .position(|r| r.len() != n || !r.iter().all(|&v| check(v)))
        {
            return Err(CompileError::InvalidInput(format!(
                "row {row} is not a ±1 vector of length {n}"
            )));
        }
        if !labels.iter().all(|&v| check(v)) {
            return Err(CompileError::InvalidInput("labels must be ±1".into()));
        }
        let scale = 1.0 / n as f64;
        let h = outputs
            .iter()
            .map(|r| r.iter().map(|&v| v as f64 * scale).collect())
            .collect();
        Ok(Self {
            h,
            y: labels.to_vec(),
        })
    }

    /// Decision stumps `sign(polarity * (x[feature] - threshold))`, with
    /// `x[feature] == threshold` voting `+polarity`.
    pub fn from_stumps(features: &[Vec<f64>], labels: &[i8], stumps: &[Stump]) -> Result<Self> {
        let outputs: Vec<Vec<i8>> = features
            .iter()
            .map(|x| stumps.iter().map(|s| s.vote(x)).collect())
            .collect();
        if let Some(s) = stumps
            .iter()
            .find(|s| features.iter().any(|x| s.feature >= x.len()))
        {
            return Err(CompileError::InvalidInput(format!(
                "stump uses missing feature {}",
                s.feature
            )));
        }
        Self::new(&outputs, labels)
    }

    pub fn num_samples(&self) -> usize {
        self.h.len()
    }

    pub fn num_classifiers(&self) -> usize {
        self.h[0].len()
    }

    pub fn labels(&self) -> &[i8] {
        &self.y
    }

    /// Normalised output `h_i(x_s)`.
    pub fn output(&self, s: usize, i: usize) -> f64 {
        self.h[s][i]
    }

    pub fn sample_outputs(&self, s: usize) -> &[f64] {
        &self.h[s]
    }

    /// `(C', C'_y)`.
    pub fn correlations(&self) -> (Vec<Vec<f64>>, Vec<f64>) {
        let n = self.num_classifiers();
        let mut c = vec![vec![0.0; n]; n];
        let mut cy = vec![0.0; n];
        for (row, &y) in self.h.iter().zip(&self.y) {
            for i in 0..n {
                cy[i] += row[i] * y as f64;
                for j in 0..n {
                    c[i][j] += row[i] * row[j];
                }
            }
        }
        (c, cy)
    }

    /// Squared distance `|y - sum_i z_i h_i|^2` over the training set.
    pub fn training_distance(&self, z: &[u8]) -> f64 {
        self.h
            .iter()
            .zip(&self.y)
            .map(|(row, &y)| {
                let vote: f64 = row.iter().zip(z).map(|(h, &zi)| h * zi as f64).sum();
                (y as f64 - vote).powi(2)
            })
            .sum()
    }

    /// Fraction of training samples the strong classifier labels correctly.
    pub fn accuracy(&self, z: &[u8]) -> Result<f64> {
        let mut correct = 0usize;
        for (row, &y) in self.h.iter().zip(&self.y) {
            if qboost_classify(z, row)? == y {
                correct += 1;
            }
        }
        Ok(correct as f64 / self.num_samples() as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stump {
    pub feature: usize,
    pub threshold: f64,
    pub polarity: i8,
}

impl Stump {
    pub fn vote(&self, x: &[f64]) -> i8 {
        let side = if x[self.feature] >= self.threshold {
            1
        } else {
            -1
        };
        side * self.polarity.signum()
    }
}

pub fn qboost_compile(w: &WeakClassifierMatrix, lambda: f64) -> Result<QuboModel> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(CompileError::InvalidParameter(format!(
            "lambda must be non-negative, got {lambda}"
        )));
    }
    let n = w.num_classifiers();
    let (c, cy) = w.correlations();
    let mut b = QuboBuilder::new(n);
    for i in 0..n {
        b.add_linear(i, 2.0 * (lambda - cy[i]));
        // the double sum visits (i, j) and (j, i); (i, i) is linear
        for j in 0..n {
            b.add_quadratic(i, j, c[i][j]);
        }
    }
    Ok(b.try_build()?)
}

/// Strong classifier `sign(sum_i z_i h_i(x))`; a zero vote returns `+1`.
pub fn qboost_classify(z: &[u8], outputs: &[f64]) -> Result<i8> {
    if z.len() != outputs.len() {
        return Err(CompileError::InvalidInput(format!(
            "{} weights for {} classifiers",
            z.len(),
            outputs.len()
        )));
    }
    if z.iter().all(|&v| v == 0) {
        return Err(CompileError::InvalidInput("no classifier selected".into()));
    }
    let vote: f64 = z.iter().zip(outputs).map(|(&zi, h)| zi as f64 * h).sum();
    Ok(if vote < 0.0 { -1 } else { 1 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use forge_core::solvers::brute_force;

    #[test]
    fn perfect_classifier_is_selected() {
        let labels = [1, -1, 1, 1, -1];
        let outputs: Vec<Vec<i8>> = labels.iter().map(|&y| vec![y]).collect();
        let w = WeakClassifierMatrix::new(&outputs, &labels).unwrap();
        let (_, cy) = w.correlations();
        assert_eq!(cy[0], 5.0);
        let r = brute_force(&qboost_compile(&w, 0.0).unwrap()).unwrap();
        assert_eq!(r.best_assignment.bits(), vec![1]);
    }

    #[test]
    fn majority_vote() {
        let h = [1.0 / 3.0, 1.0 / 3.0, -1.0 / 3.0];
        assert_eq!(qboost_classify(&[1, 1, 1], &h).unwrap(), 1);
        assert_eq!(qboost_classify(&[1, 0, 1], &h).unwrap(), 1);
        assert_eq!(qboost_classify(&[0, 0, 1], &h).unwrap(), -1);
        assert!(qboost_classify(&[0, 0, 0], &h).is_err());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(WeakClassifierMatrix::new(&[], &[]).is_err());
        assert!(WeakClassifierMatrix::new(&[vec![1, 0]], &[1]).is_err());
        let w = WeakClassifierMatrix::new(&[vec![1]], &[1]).unwrap();
        assert!(qboost_compile(&w, -1.0).is_err());
    }
}
