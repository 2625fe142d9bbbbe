//! Least-squares scaling fits of effort against problem size: an exponential
//! `effort ~ k exp(a N)` fitted on `ln effort`, and a line `b + c N`.

use serde::{Deserialize, Serialize};

use crate::bench::BenchRow;
use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentialFit {
    pub a: f64,
    pub log_prefactor: f64,
    /// Residual sum of squares in `ln effort`.
    pub rss: f64,
    pub r2: f64,
    pub points: usize,
    /// Points left out because their effort was missing or not positive.
    pub excluded: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub b: f64,
    pub c: f64,
    pub rss: f64,
    pub r2: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub solver: String,
    pub exponential: Option<ExponentialFit>,
    pub linear: LinearFit,
}

/// Ordinary least squares `y = intercept + slope x`, returning
/// `(intercept, slope, rss, r2)`. Constant `y` gives `r2 = 1`.
fn ols(x: &[f64], y: &[f64]) -> (f64, f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|v| (v - my) * (v - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - intercept - slope * a).powi(2))
        .sum();
    let r2 = if syy > 0.0 { 1.0 - rss / syy } else { 1.0 };
    (intercept, slope, rss, r2)
}

/// Fits one solver's `(N, effort)` points. Missing efforts are dropped from
/// both fits; non-positive ones only from the exponential fit.
pub fn scaling_fit_points(solver: &str, points: &[(f64, Option<f64>)]) -> Result<ScalingFit> {
    let present: Vec<(f64, f64)> = points
        .iter()
        .filter_map(|&(n, e)| e.map(|e| (n, e)))
        .collect();
    let mut sizes: Vec<f64> = present.iter().map(|p| p.0).collect();
    sizes.sort_by(f64::total_cmp);
    sizes.dedup();
    if sizes.len() < 3 {
        return Err(CliError::Validation(format!(
            "{solver}: need at least 3 sizes with efforts, got {}",
            sizes.len()
        )));
    }
    let x: Vec<f64> = present.iter().map(|p| p.0).collect();
    let y: Vec<f64> = present.iter().map(|p| p.1).collect();
    let (b, c, rss, r2) = ols(&x, &y);
    let linear = LinearFit {
        b,
        c,
        rss,
        r2,
        points: present.len(),
    };

    let positive: Vec<(f64, f64)> = present.iter().copied().filter(|p| p.1 > 0.0).collect();
    let excluded = points.len() - positive.len();
    if excluded > 0 {
        log::warn!(
            "{solver}: {excluded} points without a positive effort left out of the exponential fit"
        );
    }
    let mut psizes: Vec<f64> = positive.iter().map(|p| p.0).collect();
    psizes.dedup();
    let exponential = (psizes.len() >= 2).then(|| {
        let x: Vec<f64> = positive.iter().map(|p| p.0).collect();
        let ly: Vec<f64> = positive.iter().map(|p| p.1.ln()).collect();
        let (k, a, rss, r2) = ols(&x, &ly);
        ExponentialFit {
            a,
            log_prefactor: k,
            rss,
            r2,
            points: positive.len(),
            excluded,
        }
    });
    Ok(ScalingFit {
        solver: solver.into(),
        exponential,
        linear,
    })
}

/// One fit per solver over the median efforts of a benchmark table, solvers
/// in order of first appearance.
pub fn scaling_fit(rows: &[BenchRow]) -> Result<Vec<ScalingFit>> {
    let mut solvers: Vec<&str> = Vec::new();
    for r in rows {
        if !solvers.contains(&r.solver.as_str()) {
            solvers.push(&r.solver);
        }
    }
    solvers
        .into_iter()
        .map(|s| {
            let pts: Vec<(f64, Option<f64>)> = rows
                .iter()
                .filter(|r| r.solver == s)
                .map(|r| (r.size as f64, r.median))
                .collect();
            scaling_fit_points(s, &pts)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_effort() {
        let pts: Vec<_> = [8.0, 12.0, 16.0].iter().map(|&n| (n, Some(7.0))).collect();
        let f = scaling_fit_points("x", &pts).unwrap();
        assert_eq!(f.exponential.unwrap().a, 0.0);
        assert_eq!(f.linear.c, 0.0);
        assert_eq!(f.linear.b, 7.0);
    }

    #[test]
    fn too_few_sizes() {
        assert!(
            scaling_fit_points("x", &[(8.0, Some(1.0)), (12.0, Some(2.0)), (16.0, None)]).is_err()
        );
    }

    #[test]
    fn non_positive_points_are_counted() {
        let pts = [
            (8.0, Some(0.0)),
            (12.0, Some(2.0)),
            (16.0, Some(4.0)),
            (20.0, Some(8.0)),
        ];
        let f = scaling_fit_points("x", &pts).unwrap();
        let e = f.exponential.unwrap();
        assert_eq!(e.excluded, 1);
        assert!((e.a - 2f64.ln() / 4.0).abs() < 1e-12);
    }
}
