//! Structured multi-label prediction with a pairwise label model.
//!
//! For features `x` the labelling energy is
//! `E(x, z, w) = sum_k sum_{(i,j) in E} w_{k,(i,j)} psi_k(x) z_i z_j` with the
//! linear kernel `psi(x) = [1, x_1, ..., x_F]`; edges with `i == j` are the
//! linear terms. Prediction is the minimiser over `z`. Training minimises
//! `F(w) = lambda/2 |w|^2 + R(w)` where `R` averages the margin-rescaled hinge
//! `max_z { Delta(z_d, z) + E(x_d, z_d) - E(x_d, z) }` over the examples.

use forge_core::{Assignment, QuadraticModel, QuboBuilder, QuboModel};
use serde::{Deserialize, Serialize};

use crate::error::{CompileError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructuredModel {
    num_labels: usize,
    /// Sorted, `i <= j`.
    edges: Vec<(usize, usize)>,
    /// `F + 1`, including the constant feature.
    feature_dim: usize,
    /// `w[k * edges.len() + e]`.
    weights: Vec<f64>,
}

impl StructuredModel {
    /// Zero weights over `edges` for inputs with `num_features` features.
    pub fn new(num_labels: usize, edges: &[(usize, usize)], num_features: usize) -> Result<Self> {
        if num_labels == 0 {
            return Err(CompileError::InvalidParameter(
                "need at least one label".into(),
            ));
        }
        let mut es: Vec<(usize, usize)> = Vec::with_capacity(edges.len());
        for &(i, j) in edges {
            if i >= num_labels || j >= num_labels {
                return Err(CompileError::InvalidInput(format!(
                    "edge ({i}, {j}) outside {num_labels} labels"
                )));
            }
            es.push((i.min(j), i.max(j)));
        }
        es.sort_unstable();
        es.dedup();
        let feature_dim = num_features + 1;
        Ok(Self {
            num_labels,
            weights: vec![0.0; feature_dim * es.len()],
            edges: es,
            feature_dim,
        })
    }

    /// Every pair and every diagonal.
    pub fn complete(num_labels: usize, num_features: usize) -> Result<Self> {
        let edges: Vec<(usize, usize)> = (0..num_labels)
            .flat_map(|i| (i..num_labels).map(move |j| (i, j)))
            .collect();
        Self::new(num_labels, &edges, num_features)
    }

    /// Diagonal edges only: every label is predicted on its own.
    pub fn independent(num_labels: usize, num_features: usize) -> Result<Self> {
        let edges: Vec<(usize, usize)> = (0..num_labels).map(|i| (i, i)).collect();
        Self::new(num_labels, &edges, num_features)
    }

    pub fn num_labels(&self) -> usize {
        self.num_labels
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn feature_dim(&self) -> usize {
        self.feature_dim
    }

    pub fn num_weights(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn with_weights(&self, w: &[f64]) -> Result<Self> {
        if w.len() != self.weights.len() {
            return Err(CompileError::InvalidInput(format!(
                "{} weights, expected {}",
                w.len(),
                self.weights.len()
            )));
        }
        Ok(Self {
            weights: w.to_vec(),
            ..self.clone()
        })
    }

    fn edge_index(&self, i: usize, j: usize) -> Option<usize> {
        self.edges.binary_search(&(i.min(j), i.max(j))).ok()
    }

    /// Flat index of `w_{k,(i,j)}`.
    pub fn weight_index(&self, k: usize, i: usize, j: usize) -> Result<usize> {
        match self.edge_index(i, j) {
            Some(e) if k < self.feature_dim => Ok(k * self.edges.len() + e),
            _ => Err(CompileError::InvalidInput(format!(
                "no weight ({k}, ({i}, {j}))"
            ))),
        }
    }

    pub fn weight(&self, k: usize, i: usize, j: usize) -> Result<f64> {
        Ok(self.weights[self.weight_index(k, i, j)?])
    }

    pub fn set_weight(&mut self, k: usize, i: usize, j: usize, v: f64) -> Result<()> {
        let idx = self.weight_index(k, i, j)?;
        self.weights[idx] = v;
        Ok(())
    }

    /// `psi(x) = [1, x...]`.
    pub fn features(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() + 1 != self.feature_dim {
            return Err(CompileError::InvalidInput(format!(
                "input has {} features, model expects {}",
                x.len(),
                self.feature_dim - 1
            )));
        }
        let mut psi = Vec::with_capacity(self.feature_dim);
        psi.push(1.0);
        psi.extend_from_slice(x);
        Ok(psi)
    }

    /// `psi_k(x) z_i z_j` for every weight, in weight order. `E(x, z, w)` is
    /// the dot product of this with the weights.
    pub fn joint_features(&self, x: &[f64], z: &[u8]) -> Result<Vec<f64>> {
        let psi = self.features(x)?;
        let ne = self.edges.len();
        let mut phi = vec![0.0; self.weights.len()];
        for (e, &(i, j)) in self.edges.iter().enumerate() {
            let zz = (z[i] * z[j]) as f64;
            for (k, p) in psi.iter().enumerate() {
                phi[k * ne + e] = p * zz;
            }
        }
        Ok(phi)
    }

    pub fn omega(&self) -> f64 {
        0.5 * self.weights.iter().map(|w| w * w).sum::<f64>()
    }
}

pub fn structured_energy(x: &[f64], model: &StructuredModel) -> Result<QuboModel> {
    let psi = model.features(x)?;
    let ne = model.edges.len();
    let mut b = QuboBuilder::new(model.num_labels);
    for (e, &(i, j)) in model.edges.iter().enumerate() {
        let c: f64 = psi
            .iter()
            .enumerate()
            .map(|(k, p)| model.weights[k * ne + e] * p)
            .sum();
        // i == j lands on the linear term
        b.add_quadratic(i, j, c);
    }
    Ok(b.try_build()?)
}

/// Number of differing labels.
pub fn hamming(a: &[u8], b: &[u8]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Example {
    pub x: Vec<f64>,
    pub z: Vec<u8>,
}

impl Example {
    fn check(&self, model: &StructuredModel) -> Result<()> {
        if self.z.len() != model.num_labels || self.z.iter().any(|&v| v > 1) {
            return Err(CompileError::InvalidInput(format!(
                "labelling must be {} bits, got {:?}",
                model.num_labels, self.z
            )));
        }
        Ok(())
    }
}

/// Minimiser of `E(x, z) - Delta(z_d, z)`; its negated minimum plus
/// `E(x, z_d)` is the hinge term for the example.
pub fn loss_augmented(ex: &Example, model: &StructuredModel) -> Result<QuboModel> {
    ex.check(model)?;
    let mut b = structured_energy(&ex.x, model)?.to_builder();
    // Delta(z_d, z) = sum_i z_d,i + (1 - 2 z_d,i) z_i
    for (i, &zd) in ex.z.iter().enumerate() {
        b.add_linear(i, -(1.0 - 2.0 * zd as f64));
        b.add_offset(-(zd as f64));
    }
    Ok(b.try_build()?)
}

fn energy_at(q: &QuboModel, z: &[u8]) -> f64 {
    q.energy_bits(z)
}

/// Hinge value for one example and the labelling attaining it.
pub fn hinge<S>(ex: &Example, model: &StructuredModel, solver: &mut S) -> Result<(f64, Vec<u8>)>
where
    S: FnMut(&QuboModel) -> forge_core::Result<Assignment>,
{
    let aug = loss_augmented(ex, model)?;
    let z = solver(&aug).map_err(|e| CompileError::Solver(e.to_string()))?;
    if z.len() != model.num_labels {
        return Err(CompileError::Solver(format!(
            "solver returned {} labels",
            z.len()
        )));
    }
    let zb = z.bits();
    let e_d = energy_at(&structured_energy(&ex.x, model)?, &ex.z);
    // z = z_d gives 0, so an exact inner solve never reports a negative hinge
    Ok((e_d - aug.energy(&z)?, zb))
}

/// `F(w) = lambda * Omega(w) + R(w)` with the inner maxima from `solver`.
pub fn objective<S>(
    data: &[Example],
    model: &StructuredModel,
    lambda: f64,
    solver: &mut S,
) -> Result<f64>
where
    S: FnMut(&QuboModel) -> forge_core::Result<Assignment>,
{
    if data.is_empty() {
        return Err(CompileError::InvalidInput("empty training set".into()));
    }
    let mut r = 0.0;
    for ex in data {
        r += hinge(ex, model, solver)?.0;
    }
    Ok(lambda * model.omega() + r / data.len() as f64)
}

pub fn predict<S>(x: &[f64], model: &StructuredModel, solver: &mut S) -> Result<Vec<u8>>
where
    S: FnMut(&QuboModel) -> forge_core::Result<Assignment>,
{
    let q = structured_energy(x, model)?;
    Ok(solver(&q)
        .map_err(|e| CompileError::Solver(e.to_string()))?
        .bits())
}

/// Mean Hamming error of the predictions over `data`.
pub fn hamming_error<S>(data: &[Example], model: &StructuredModel, solver: &mut S) -> Result<f64>
where
    S: FnMut(&QuboModel) -> forge_core::Result<Assignment>,
{
    let mut total = 0usize;
    for ex in data {
        total += hamming(&predict(&ex.x, model, solver)?, &ex.z);
    }
    Ok(total as f64 / data.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainOptions {
    pub lambda: f64,
    pub steps: usize,
    /// Step size at iteration `t` (from 1) is `step_scale / sqrt(t)`.
    pub step_scale: f64,
}

impl Default for TrainOptions {
    fn default() -> Self {
        Self {
            lambda: 0.01,
            steps: 200,
            step_scale: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    /// Iterate with the lowest objective.
    pub model: StructuredModel,
    pub best_objective: f64,
    /// Objective of every evaluated iterate, starting with the initial one.
    pub objectives: Vec<f64>,
    /// Running minimum of `objectives`.
    pub best_so_far: Vec<f64>,
    /// Iterations skipped because an inner solve failed.
    pub skipped: usize,
}

/// Subgradient descent on `F` starting from `init`.
pub fn structured_train<S>(
    data: &[Example],
    init: &StructuredModel,
    opts: &TrainOptions,
    mut solver: S,
) -> Result<TrainReport>
where
    S: FnMut(&QuboModel) -> forge_core::Result<Assignment>,
{
    if data.is_empty() {
        return Err(CompileError::InvalidInput("empty training set".into()));
    }
    if !(opts.lambda >= 0.0) || !(opts.step_scale > 0.0) {
        return Err(CompileError::InvalidParameter(
            "lambda must be >= 0 and the step scale > 0".into(),
        ));
    }
    for ex in data {
        ex.check(init)?;
        init.features(&ex.x)?;
    }
    let mut w = init.weights.clone();
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut objectives = Vec::new();
    let mut best_so_far = Vec::new();
    let mut skipped = 0usize;
    let inv = 1.0 / data.len() as f64;

    for t in 0..=opts.steps {
        let model = init.with_weights(&w)?;
        let mut r = 0.0;
        let mut grad: Vec<f64> = w.iter().map(|wi| opts.lambda * wi).collect();
        let mut failed = None;
        for ex in data {
            match hinge(ex, &model, &mut solver) {
                Ok((h, zs)) => {
                    r += h;
                    let phi_d = model.joint_features(&ex.x, &ex.z)?;
                    let phi_s = model.joint_features(&ex.x, &zs)?;
                    for (g, (a, b)) in grad.iter_mut().zip(phi_d.iter().zip(&phi_s)) {
                        *g += inv * (a - b);
                    }
                }
                Err(CompileError::Solver(e)) => {
                    failed = Some(e);
                    break;
                }
                Err(e) => return Err(e),
            }
        }
        if let Some(e) = failed {
            log::warn!("iteration {t}: inner solve failed ({e}); iteration skipped");
            skipped += 1;
            continue;
        }
        let f = opts.lambda * model.omega() + r * inv;
        objectives.push(f);
        if best.as_ref().map_or(true, |(bf, _)| f < *bf) {
            best = Some((f, w.clone()));
        }
        best_so_far.push(best.as_ref().unwrap().0);
        if t == opts.steps {
            break;
        }
        let step = opts.step_scale / ((t + 1) as f64).sqrt();
        for (wi, g) in w.iter_mut().zip(&grad) {
            *wi -= step * g;
        }
    }
    let (best_objective, bw) =
        best.ok_or_else(|| CompileError::Solver("every iteration failed".into()))?;
    Ok(TrainReport {
        model: init.with_weights(&bw)?,
        best_objective,
        objectives,
        best_so_far,
        skipped,
    })
}
