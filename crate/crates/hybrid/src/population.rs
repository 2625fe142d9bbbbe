//! Populations of evaluated spin configurations and the hardware-shaped
//! regression fitted to them.

use std::collections::HashSet;

use forge_core::{Assignment, Form, HardwareGraph, IsingBuilder, IsingModel};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{HybridError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Population {
    configs: Vec<Assignment>,
    values: Vec<f64>,
    pub generation: usize,
}

impl Population {
    pub fn new(configs: Vec<Assignment>, values: Vec<f64>, generation: usize) -> Result<Self> {
        if configs.len() != values.len() {
            return Err(HybridError::InvalidInput(format!(
                "{} configurations but {} values",
                configs.len(),
                values.len()
            )));
        }
        if let Some(first) = configs.first() {
            let n = first.len();
            if configs.iter().any(|c| c.len() != n) {
                return Err(HybridError::InvalidInput(
                    "configurations differ in length".into(),
                ));
            }
        }
        if values.iter().any(|v| v.is_nan()) {
            return Err(HybridError::InvalidInput("population value is NaN".into()));
        }
        let configs = configs.into_iter().map(|c| c.to_form(Form::Spin)).collect();
        Ok(Self {
            configs,
            values,
            generation,
        })
    }

    pub fn configs(&self) -> &[Assignment] {
        &self.configs
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.configs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.configs.is_empty()
    }

    pub fn num_spins(&self) -> Option<usize> {
        self.configs.first().map(Assignment::len)
    }

    /// Index of the lowest value; the first one on ties.
    pub fn best_index(&self) -> Option<usize> {
        (0..self.len()).reduce(|a, b| {
            if self.values[b] < self.values[a] {
                b
            } else {
                a
            }
        })
    }

    pub fn distinct_configs(&self) -> usize {
        self.configs
            .iter()
            .map(Assignment::values)
            .collect::<HashSet<_>>()
            .len()
    }
}

/// Drops repeated configurations (first occurrence wins), then keeps the best
/// `ceil(keep_fraction * n)` of the survivors in their original order.
pub fn filter_population(pop: &Population, keep_fraction: f64) -> Result<Population> {
    if !(keep_fraction > 0.0 && keep_fraction <= 1.0) {
        return Err(HybridError::InvalidParameter(format!(
            "keep fraction must lie in (0, 1], got {keep_fraction}"
        )));
    }
    if pop.is_empty() {
        return Err(HybridError::InvalidInput(
            "cannot filter an empty population".into(),
        ));
    }
    let mut seen = HashSet::new();
    let unique: Vec<usize> = (0..pop.len())
        .filter(|&k| seen.insert(pop.configs[k].values()))
        .collect();
    let keep = ((keep_fraction * unique.len() as f64).ceil() as usize).clamp(1, unique.len());
    let mut ranked = unique.clone();
    // stable sort keeps earlier entries ahead on ties
    ranked.sort_by(|&a, &b| pop.values[a].total_cmp(&pop.values[b]));
    let chosen: HashSet<usize> = ranked[..keep].iter().copied().collect();
    let kept: Vec<usize> = unique.into_iter().filter(|k| chosen.contains(k)).collect();
    Ok(Population {
        configs: kept.iter().map(|&k| pop.configs[k].clone()).collect(),
        values: kept.iter().map(|&k| pop.values[k]).collect(),
        generation: pop.generation,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    /// Absolute ridge strength. `None` uses `1e-6 * trace(X^T X) / (p S)` for
    /// `p` features and `S` configurations.
    pub ridge: Option<f64>,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self { ridge: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HardwareFit {
    /// `G(s) ~ offset + sum a_i s_i + sum b_ij s_i s_j`, stored with `h = -a`
    /// and `J = b` so that the model energy is the prediction.
    pub model: IsingModel,
    pub residuals: Vec<f64>,
    pub rms: f64,
    pub ridge: f64,
    /// Couplings were left out because the population was degenerate.
    pub fields_only: bool,
}

impl HardwareFit {
    pub fn predict(&self, spins: &[i8]) -> f64 {
        self.model.energy_spins(spins)
    }

    /// Coefficients in feature order: constant, fields `a_i`, then one per
    /// graph edge in ascending order.
    pub fn coefficients(&self, graph: &HardwareGraph) -> Vec<f64> {
        let mut out = vec![self.model.offset()];
        out.extend(self.model.h().iter().map(|h| -h));
        out.extend(
            graph
                .edges()
                .iter()
                .map(|&(i, j)| self.model.coupling(i, j)),
        );
        out
    }
}

/// Ridge least squares on the features `{1, s_i, s_i s_j for graph edges}`.
/// The constant is not penalised. With fewer than two distinct configurations
/// only the constant and the fields are fitted.
pub fn fit_hardware_model(
    pop: &Population,
    graph: &HardwareGraph,
    opts: &FitOptions,
) -> Result<HardwareFit> {
    let n = graph.num_nodes();
    if pop.is_empty() {
        return Err(HybridError::InvalidInput(
            "cannot fit an empty population".into(),
        ));
    }
    if pop.num_spins() != Some(n) {
        return Err(HybridError::InvalidInput(format!(
            "configurations have {} spins, graph has {n} nodes",
            pop.num_spins().unwrap_or(0)
        )));
    }
    if let Some(r) = opts.ridge {
        if !(r >= 0.0 && r.is_finite()) {
            return Err(HybridError::InvalidParameter(format!(
                "ridge must be non-negative, got {r}"
            )));
        }
    }
    let fields_only = pop.distinct_configs() < 2;
    if fields_only {
        log::warn!("degenerate population, fitting fields only");
    }
    let edges: Vec<(usize, usize)> = if fields_only {
        Vec::new()
    } else {
        graph.edges().iter().copied().collect()
    };
    let p = 1 + n + edges.len();
    let rows = pop.len();
    let x = DMatrix::from_fn(rows, p, |r, c| {
        let s = pop.configs[r].values();
        if c == 0 {
            1.0
        } else if c <= n {
            s[c - 1] as f64
        } else {
            let (i, j) = edges[c - 1 - n];
            (s[i] * s[j]) as f64
        }
    });
    let g = DVector::from_column_slice(&pop.values);
    let mut a = x.transpose() * &x;
    let ridge = opts
        .ridge
        .unwrap_or_else(|| 1e-6 * a.trace() / (p * rows) as f64);
    for c in 1..p {
        a[(c, c)] += ridge;
    }
    let b = x.transpose() * &g;
    let svd = a.svd(true, true);
    let eps = 1e-12 * svd.singular_values.max().max(1.0);
    let theta = svd
        .solve(&b, eps)
        .map_err(|e| HybridError::Numeric(e.to_string()))?;
    let residual = &g - &x * &theta;
    let mut mb = IsingBuilder::new(n);
    mb.add_offset(theta[0]);
    for i in 0..n {
        mb.add_field(i, -theta[1 + i]);
    }
    for (e, &(i, j)) in edges.iter().enumerate() {
        mb.add_coupling(i, j, theta[1 + n + e]);
    }
    let residuals: Vec<f64> = residual.iter().copied().collect();
    let rms = (residuals.iter().map(|r| r * r).sum::<f64>() / rows as f64).sqrt();
    Ok(HardwareFit {
        model: mb.try_build()?,
        residuals,
        rms,
        ridge,
        fields_only,
    })
}
