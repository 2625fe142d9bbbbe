//! Instantaneous spectrum, minimum gap and the adiabatic rate profile.
//!
//! `tau(s) = |<phi_0|H_D|phi_1>| / gap(s)^2`; the anneal time must be large
//! compared with the maximum of `tau`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::eigen::{lowest_eigenpairs, EigenMethod};
use crate::error::{QaError, Result};
use crate::hamiltonian::ControlHamiltonian;

pub const DEFAULT_GRID: usize = 201;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumPoint {
    pub s: f64,
    pub eigenvalues: Vec<f64>,
    pub gap: f64,
    pub tau: f64,
    /// `|<phi_0|H_D|phi_1>|`.
    pub v: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumScan {
    pub points: Vec<SpectrumPoint>,
    /// Minimum gap after refinement between the neighbouring grid points.
    pub g_min: f64,
    pub s_star: f64,
    /// Grid index with the smallest gap.
    pub gap_index: usize,
    /// Grid index with the largest tau.
    pub tau_index: usize,
    pub tau_max: f64,
}

/// Driver matrix element `<a|H_D|b>` as an explicit sum over single bit flips.
pub fn driver_element(n: usize, delta: f64, a: &[f64], b: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (z, &az) in a.iter().enumerate() {
        if az == 0.0 {
            continue;
        }
        for q in 0..n {
            acc += az * b[z ^ (1 << q)];
        }
    }
    -delta * acc
}

pub fn spectrum_point(
    ch: &ControlHamiltonian,
    s: f64,
    k: usize,
    method: EigenMethod,
) -> Result<SpectrumPoint> {
    if k < 2 {
        return Err(QaError::InvalidParameter(
            "need at least two eigenvalues for a gap".into(),
        ));
    }
    let pairs = lowest_eigenpairs(&ch.at(s), k, method)?;
    let gap = (pairs.values[1] - pairs.values[0]).max(0.0);
    let v = driver_element(
        ch.num_qubits(),
        ch.delta(),
        &pairs.vectors[0],
        &pairs.vectors[1],
    )
    .abs();
    let tau = if gap > 1e-12 {
        v / (gap * gap)
    } else {
        f64::INFINITY
    };
    Ok(SpectrumPoint {
        s,
        eigenvalues: pairs.values,
        gap,
        tau,
        v,
    })
}

fn gap_at(ch: &ControlHamiltonian, s: f64, method: EigenMethod) -> Result<f64> {
    let p = lowest_eigenpairs(&ch.at(s), 2, method)?;
    Ok((p.values[1] - p.values[0]).max(0.0))
}

/// Golden-section search for the smallest gap on `[lo, hi]`.
fn refine_gap(
    ch: &ControlHamiltonian,
    lo: f64,
    hi: f64,
    method: EigenMethod,
) -> Result<(f64, f64)> {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let mut fc = gap_at(ch, c, method)?;
    let mut fd = gap_at(ch, d, method)?;
    for _ in 0..80 {
        if b - a < 1e-10 {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = gap_at(ch, c, method)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = gap_at(ch, d, method)?;
        }
    }
    Ok(if fc < fd { (c, fc) } else { (d, fd) })
}

/// Scans `grid` uniformly spaced points in `s`, including both ends.
pub fn spectrum_scan(
    ch: &ControlHamiltonian,
    grid: usize,
    k: usize,
    method: EigenMethod,
) -> Result<SpectrumScan> {
    if grid < 2 {
        return Err(QaError::InvalidParameter(
            "grid needs at least two points".into(),
        ));
    }
    let points: Vec<SpectrumPoint> = (0..grid)
        .into_par_iter()
        .map(|i| spectrum_point(ch, i as f64 / (grid - 1) as f64, k, method))
        .collect::<Result<_>>()?;
    let gap_index = (0..grid)
        .min_by(|&a, &b| points[a].gap.total_cmp(&points[b].gap))
        .unwrap();
    let tau_index = (0..grid)
        .max_by(|&a, &b| points[a].tau.total_cmp(&points[b].tau))
        .unwrap();
    let lo = points[gap_index.saturating_sub(1)].s;
    let hi = points[(gap_index + 1).min(grid - 1)].s;
    let (mut s_star, mut g_min) = refine_gap(ch, lo, hi, method)?;
    if points[gap_index].gap <= g_min {
        s_star = points[gap_index].s;
        g_min = points[gap_index].gap;
    }
    Ok(SpectrumScan {
        tau_max: points[tau_index].tau,
        points,
        g_min,
        s_star,
        gap_index,
        tau_index,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use forge_core::IsingBuilder;

    #[test]
    fn one_qubit_gap_closed_form() {
        let mut b = IsingBuilder::new(1);
        b.add_field(0, 1.0);
        let ch = ControlHamiltonian::new(b.build(), 1.0, 1.0).unwrap();
        let scan = spectrum_scan(&ch, 101, 2, EigenMethod::Dense).unwrap();
        for p in &scan.points {
            let exact = 2.0 * ((1.0 - p.s).powi(2) + p.s * p.s).sqrt();
            assert!((p.gap - exact).abs() < 1e-9);
        }
        assert!((scan.g_min - 2f64.sqrt()).abs() < 1e-9);
        assert!((scan.s_star - 0.5).abs() < 1e-6);
    }
}
