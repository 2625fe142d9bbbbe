//! Covering training points with axis-aligned boxes centred on training points.
//!
//! `B_i` is the box of half-width `epsilon` around point `i` under the
//! max-coordinate distance. The cost of a selection is
//! `sum_{i != j} |B_i ∩ B_j| z_i z_j - mu sum_i |B_i| z_i + lambda sum_i z_i`.
//! The overlap sum runs over ordered pairs of distinct boxes. A point whose
//! box holds nothing else therefore costs `lambda - mu` to include.

use std::collections::BTreeMap;

use forge_core::{Assignment, QuboBuilder, QuboModel};
use serde::{Deserialize, Serialize};

use super::points::{Metric, PointSet};
use crate::error::{CompileError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QimsParams {
    pub epsilon: f64,
    pub mu: f64,
    pub lambda: f64,
}

impl QimsParams {
    pub fn new(epsilon: f64, mu: f64, lambda: f64) -> Result<Self> {
        let p = Self {
            epsilon,
            mu,
            lambda,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(CompileError::InvalidParameter(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if !self.mu.is_finite() || !self.lambda.is_finite() {
            return Err(CompileError::InvalidParameter(
                "mu and lambda must be finite".into(),
            ));
        }
        Ok(())
    }
}

pub fn in_box(center: &[f64], x: &[f64], epsilon: f64) -> bool {
    Metric::MaxCoordinate.distance(center, x) <= epsilon
}

/// Box sizes and pairwise overlaps for boxes around `centers`, counting the
/// points listed in `support`. Overlaps are keyed by position in `centers`.
pub fn box_counts(
    p: &PointSet,
    centers: &[usize],
    support: &[usize],
    epsilon: f64,
) -> (Vec<usize>, BTreeMap<(usize, usize), usize>) {
    let member: Vec<Vec<bool>> = centers
        .iter()
        .map(|&c| {
            support
                .iter()
                .map(|&s| in_box(p.point(c), p.point(s), epsilon))
                .collect()
        })
        .collect();
    let sizes = member
        .iter()
        .map(|m| m.iter().filter(|&&b| b).count())
        .collect();
    let mut overlaps = BTreeMap::new();
    for a in 0..centers.len() {
        for b in a + 1..centers.len() {
            let c = member[a]
                .iter()
                .zip(&member[b])
                .filter(|(x, y)| **x && **y)
                .count();
            if c > 0 {
                overlaps.insert((a, b), c);
            }
        }
    }
    (sizes, overlaps)
}

/// Model over boxes around `centers`, with counts taken over `support`.
pub fn qims_compile_subset(
    p: &PointSet,
    centers: &[usize],
    support: &[usize],
    params: &QimsParams,
) -> Result<QuboModel> {
    params.validate()?;
    let (sizes, overlaps) = box_counts(p, centers, support, params.epsilon);
    let mut b = QuboBuilder::new(centers.len());
    for (i, &s) in sizes.iter().enumerate() {
        b.add_linear(i, params.lambda - params.mu * s as f64);
    }
    for (&(i, j), &c) in &overlaps {
        // (i, j) and (j, i)
        b.add_quadratic(i, j, 2.0 * c as f64);
    }
    Ok(b.try_build()?)
}

/// One box per point, counts over all points.
pub fn qims_compile(p: &PointSet, params: &QimsParams) -> Result<QuboModel> {
    let all: Vec<usize> = (0..p.len()).collect();
    qims_compile_subset(p, &all, &all, params)
}

/// Indices of the selected box centres.
pub fn selected_centers(centers: &[usize], a: &Assignment) -> Vec<usize> {
    centers
        .iter()
        .zip(a.bits())
        .filter(|(_, b)| *b == 1)
        .map(|(&c, _)| c)
        .collect()
}

pub fn is_covered(p: &PointSet, centers: &[usize], x: &[f64], epsilon: f64) -> bool {
    centers.iter().any(|&c| in_box(p.point(c), x, epsilon))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchOutcome {
    /// Box centres (indices into the point set) in the order they were kept.
    pub centers: Vec<usize>,
    /// False when a solve failed and the remaining stream was not processed.
    pub complete: bool,
    pub error: Option<String>,
    pub solves: usize,
    /// Points skipped because a finished batch already covered them.
    pub skipped: usize,
}

/// Streams the points in order through batches of at most `capacity` boxes.
///
/// Points already covered by a finished batch are skipped. When a batch fills
/// up it is solved; if every box survives the batch is finished, otherwise
/// the surviving boxes stay and the batch keeps growing. Counts use every
/// point seen so far. A batch that gained points since its last solve is
/// solved once more at the end of the stream.
pub fn qims_batch<S>(
    p: &PointSet,
    params: &QimsParams,
    capacity: usize,
    mut solver: S,
) -> Result<BatchOutcome>
where
    S: FnMut(&QuboModel) -> forge_core::Result<Assignment>,
{
    params.validate()?;
    if capacity == 0 {
        return Err(CompileError::InvalidParameter(
            "batch capacity must be at least 1".into(),
        ));
    }
    let mut out = BatchOutcome {
        centers: Vec::new(),
        complete: true,
        error: None,
        solves: 0,
        skipped: 0,
    };
    let mut batch: Vec<usize> = Vec::new();
    let mut seen: Vec<usize> = Vec::new();
    // batch holds points not yet seen by a solve
    let mut fresh = false;

    let mut run = |batch: &[usize],
                   seen: &[usize],
                   out: &mut BatchOutcome|
     -> std::result::Result<Vec<usize>, String> {
        let m = qims_compile_subset(p, batch, seen, params).map_err(|e| e.to_string())?;
        out.solves += 1;
        let a = solver(&m).map_err(|e| e.to_string())?;
        if a.len() != batch.len() {
            return Err(format!(
                "solver returned {} values for {} boxes",
                a.len(),
                batch.len()
            ));
        }
        Ok(selected_centers(batch, &a))
    };

    for i in 0..p.len() {
        seen.push(i);
        if is_covered(p, &out.centers, p.point(i), params.epsilon) {
            out.skipped += 1;
            continue;
        }
        batch.push(i);
        fresh = true;
        if batch.len() == capacity {
            fresh = false;
            match run(&batch, &seen, &mut out) {
                Ok(kept) if kept.len() == capacity => {
                    out.centers.extend(kept);
                    batch.clear();
                }
                Ok(kept) => batch = kept,
                Err(e) => {
                    log::warn!("batch solve failed after {} points: {e}", seen.len());
                    out.complete = false;
                    out.error = Some(e);
                    return Ok(out);
                }
            }
        }
    }
    if !fresh {
        out.centers.extend(batch);
    } else if !batch.is_empty() {
        match run(&batch, &seen, &mut out) {
            Ok(kept) => out.centers.extend(kept),
            Err(e) => {
                out.complete = false;
                out.error = Some(e);
            }
        }
    }
    Ok(out)
}
