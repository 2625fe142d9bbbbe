use serde::{Deserialize, Serialize};

use crate::error::{CompileError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    #[default]
    Euclidean,
    /// `max_k |a_k - b_k|`.
    MaxCoordinate,
}

impl Metric {
    pub fn distance(self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            Metric::Euclidean => a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt(),
            Metric::MaxCoordinate => a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max),
        }
    }
}

/// Points of a common dimension with the metric used to compare them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSet {
    points: Vec<Vec<f64>>,
    metric: Metric,
}

impl PointSet {
    pub fn new(points: Vec<Vec<f64>>, metric: Metric) -> Result<Self> {
        if let Some(first) = points.first() {
            let d = first.len();
            for (i, p) in points.iter().enumerate() {
                if p.len() != d {
                    return Err(CompileError::InvalidInput(format!(
                        "point {i} has dimension {}, expected {d}",
                        p.len()
                    )));
                }
                if p.iter().any(|v| !v.is_finite()) {
                    return Err(CompileError::InvalidInput(format!(
                        "point {i} has a non-finite coordinate"
                    )));
                }
            }
        }
        Ok(Self { points, metric })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points.first().map_or(0, |p| p.len())
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i]
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.metric.distance(&self.points[i], &self.points[j])
    }

    pub fn with_metric(&self, metric: Metric) -> Self {
        Self {
            points: self.points.clone(),
            metric,
        }
    }
}
