//! Single-vehicle tours over targets with Dubins (curvature bounded) travel
//! distances.
//!
//! `z_{i,a}` (index `i*N + a`) says target `i` is visited at position `a`.
//! The tour term is `1/2 sum_{i != j} d_ij sum_a z_{i,a} (z_{j,a+1} + z_{j,a-1})`
//! with positions taken cyclically, plus
//! `W1 sum_i (sum_a z_{i,a} - 1)^2 + W2 sum_a (sum_i z_{i,a} - 1)^2`.
//! For a valid tour the first term is the mean of the forward and reverse
//! tour lengths.

use std::f64::consts::TAU;

use forge_core::{qubo_to_ising, IsingModel, QuboBuilder, QuboModel};
use serde::{Deserialize, Serialize};

use crate::error::{CompileError, Result};

const FEAS_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TargetTriple {
    pub x: f64,
    pub y: f64,
    /// Heading, radians counter-clockwise from +x.
    pub theta: f64,
}

impl TargetTriple {
    pub fn new(x: f64, y: f64, theta: f64) -> Self {
        Self {
            x,
            y,
            theta: mod2pi(theta),
        }
    }
}

/// Constant speed and maximum turn rate; the turn radius is their ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Vehicle {
    pub speed: f64,
    pub max_turn_rate: f64,
}

impl Vehicle {
    pub fn turn_radius(&self) -> Result<f64> {
        let r = self.speed / self.max_turn_rate;
        if r > 0.0 && r.is_finite() {
            Ok(r)
        } else {
            Err(CompileError::InvalidParameter(format!(
                "turn radius must be positive, got {r}"
            )))
        }
    }
}

/// Wraps to `[0, 2pi)`, snapping values within 1e-12 of a full turn to 0.
pub fn mod2pi(a: f64) -> f64 {
    let m = a.rem_euclid(TAU);
    if TAU - m < 1e-12 {
        0.0
    } else {
        m
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DubinsWord {
    Lsl,
    Rsr,
    Lsr,
    Rsl,
    Rlr,
    Lrl,
}

impl DubinsWord {
    pub const ALL: [DubinsWord; 6] = [
        DubinsWord::Lsl,
        DubinsWord::Rsr,
        DubinsWord::Lsr,
        DubinsWord::Rsl,
        DubinsWord::Rlr,
        DubinsWord::Lrl,
    ];

    /// Turn direction of each segment: +1 left, -1 right, 0 straight.
    pub fn turns(self) -> [i8; 3] {
        match self {
            DubinsWord::Lsl => [1, 0, 1],
            DubinsWord::Rsr => [-1, 0, -1],
            DubinsWord::Lsr => [1, 0, -1],
            DubinsWord::Rsl => [-1, 0, 1],
            DubinsWord::Rlr => [-1, 1, -1],
            DubinsWord::Lrl => [1, -1, 1],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DubinsPath {
    pub word: DubinsWord,
    /// Segment lengths in units of the turn radius: arc angles for turns,
    /// distance for the straight part.
    pub segments: [f64; 3],
    pub radius: f64,
}

impl DubinsPath {
    pub fn length(&self) -> f64 {
        self.radius * self.segments.iter().sum::<f64>()
    }
}

/// Normalised segments of `word` for heading offsets `alpha`, `beta` and
/// separation `d` (in radii), or `None` when the word does not connect.
pub fn dubins_word(word: DubinsWord, alpha: f64, beta: f64, d: f64) -> Option<[f64; 3]> {
    let (sa, sb, ca, cb) = (alpha.sin(), beta.sin(), alpha.cos(), beta.cos());
    let cab = (alpha - beta).cos();
    let sqrt = |v: f64| {
        if v >= -FEAS_TOL {
            Some(v.max(0.0).sqrt())
        } else {
            None
        }
    };
    let acos = |v: f64| {
        if v.abs() <= 1.0 + FEAS_TOL {
            Some(v.clamp(-1.0, 1.0).acos())
        } else {
            None
        }
    };
    match word {
        DubinsWord::Lsl => {
            let p = sqrt(2.0 + d * d - 2.0 * cab + 2.0 * d * (sa - sb))?;
            let k = (cb - ca).atan2(d + sa - sb);
            Some([mod2pi(k - alpha), p, mod2pi(beta - k)])
        }
        DubinsWord::Rsr => {
            let p = sqrt(2.0 + d * d - 2.0 * cab + 2.0 * d * (sb - sa))?;
            let k = (ca - cb).atan2(d - sa + sb);
            Some([mod2pi(alpha - k), p, mod2pi(k - beta)])
        }
        DubinsWord::Lsr => {
            let p = sqrt(-2.0 + d * d + 2.0 * cab + 2.0 * d * (sa + sb))?;
            let k = (-ca - cb).atan2(d + sa + sb) - (-2.0f64).atan2(p);
            Some([mod2pi(k - alpha), p, mod2pi(k - beta)])
        }
        DubinsWord::Rsl => {
            let p = sqrt(d * d - 2.0 + 2.0 * cab - 2.0 * d * (sa + sb))?;
            let k = (ca + cb).atan2(d - sa - sb) - 2.0f64.atan2(p);
            Some([mod2pi(alpha - k), p, mod2pi(beta - k)])
        }
        DubinsWord::Rlr => {
            let p = mod2pi(TAU - acos((6.0 - d * d + 2.0 * cab + 2.0 * d * (sa - sb)) / 8.0)?);
            let k = (ca - cb).atan2(d - sa + sb);
            let t = mod2pi(alpha - k + p / 2.0);
            Some([t, p, mod2pi(alpha - beta - t + p)])
        }
        DubinsWord::Lrl => {
            let p = mod2pi(TAU - acos((6.0 - d * d + 2.0 * cab + 2.0 * d * (sb - sa)) / 8.0)?);
            let k = (ca - cb).atan2(d + sa - sb);
            let t = mod2pi(-alpha - k + p / 2.0);
            Some([t, p, mod2pi(beta - alpha - t + p)])
        }
    }
}

/// Shortest of the six words.
pub fn dubins_path(from: &TargetTriple, to: &TargetTriple, radius: f64) -> Result<DubinsPath> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(CompileError::InvalidParameter(format!(
            "turn radius must be positive, got {radius}"
        )));
    }
    let (dx, dy) = (to.x - from.x, to.y - from.y);
    let dist = dx.hypot(dy);
    let d = dist / radius;
    // with coincident points any reference direction works; the start heading
    // keeps equal configurations at zero
    let phi = if dist == 0.0 {
        from.theta
    } else {
        dy.atan2(dx)
    };
    let alpha = mod2pi(from.theta - phi);
    let beta = mod2pi(to.theta - phi);
    DubinsWord::ALL
        .iter()
        .filter_map(|&w| {
            dubins_word(w, alpha, beta, d).map(|s| DubinsPath {
                word: w,
                segments: s,
                radius,
            })
        })
        .min_by(|a, b| a.length().total_cmp(&b.length()))
        .ok_or_else(|| {
            CompileError::InvalidInput("no Dubins word connects the configurations".into())
        })
}

pub fn dubins_distance(from: &TargetTriple, to: &TargetTriple, radius: f64) -> Result<f64> {
    Ok(dubins_path(from, to, radius)?.length())
}

/// `d[i][j]` from target `i` to target `j`; zero diagonal.
pub fn distance_matrix(targets: &[TargetTriple], radius: f64) -> Result<Vec<Vec<f64>>> {
    let n = targets.len();
    let mut d = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                d[i][j] = dubins_distance(&targets[i], &targets[j], radius)?;
            }
        }
    }
    Ok(d)
}

/// `ceil(N * mean_{i != j} d_ij)`, at least 1.
pub fn default_weight(d: &[Vec<f64>]) -> f64 {
    let n = d.len();
    let mut s = 0.0;
    for (i, row) in d.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            if i != j {
                s += v;
            }
        }
    }
    let mean = s / (n * (n - 1)).max(1) as f64;
    (n as f64 * mean).ceil().max(1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UavModel {
    pub qubo: QuboModel,
    /// Same energies under `s = 1 - 2z`.
    pub ising: IsingModel,
    pub w1: f64,
    pub w2: f64,
}

pub fn uav_tsp_compile(d: &[Vec<f64>], w1: Option<f64>, w2: Option<f64>) -> Result<UavModel> {
    let n = d.len();
    if n < 2 {
        return Err(CompileError::InvalidInput(format!(
            "need at least two targets, got {n}"
        )));
    }
    if d.iter().any(|r| r.len() != n) {
        return Err(CompileError::InvalidInput(
            "distance matrix must be square".into(),
        ));
    }
    if d.iter().flatten().any(|v| !v.is_finite()) {
        return Err(CompileError::InvalidInput(
            "distances must be finite".into(),
        ));
    }
    let w = default_weight(d);
    let (w1, w2) = (w1.unwrap_or(w), w2.unwrap_or(w));
    let z = |i: usize, a: usize| i * n + a;
    let mut q = QuboBuilder::new(n * n);
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            for a in 0..n {
                q.add_quadratic(z(i, a), z(j, (a + 1) % n), 0.5 * d[i][j]);
                q.add_quadratic(z(i, a), z(j, (a + n - 1) % n), 0.5 * d[i][j]);
            }
        }
    }
    for i in 0..n {
        let row: Vec<(usize, f64)> = (0..n).map(|a| (z(i, a), 1.0)).collect();
        q.add_squared_linear(&row, -1.0, w1);
    }
    for a in 0..n {
        let col: Vec<(usize, f64)> = (0..n).map(|i| (z(i, a), 1.0)).collect();
        q.add_squared_linear(&col, -1.0, w2);
    }
    let qubo = q.try_build()?;
    Ok(UavModel {
        ising: qubo_to_ising(&qubo),
        qubo,
        w1,
        w2,
    })
}

/// Target order by position, or an error naming the broken constraint.
pub fn decode_tour(n: usize, bits: &[u8]) -> Result<Vec<usize>> {
    if bits.len() != n * n {
        return Err(CompileError::InvalidInput(format!(
            "{} bits for {n} targets",
            bits.len()
        )));
    }
    for i in 0..n {
        let c = (0..n).filter(|&a| bits[i * n + a] == 1).count();
        if c != 1 {
            return Err(CompileError::InvalidInput(format!(
                "target {i} visited {c} times"
            )));
        }
    }
    (0..n)
        .map(|a| {
            let who: Vec<usize> = (0..n).filter(|&i| bits[i * n + a] == 1).collect();
            match who[..] {
                [i] => Ok(i),
                _ => Err(CompileError::InvalidInput(format!(
                    "position {a} holds {} targets",
                    who.len()
                ))),
            }
        })
        .collect()
}

pub fn encode_tour(tour: &[usize]) -> Vec<u8> {
    let n = tour.len();
    let mut bits = vec![0u8; n * n];
    for (a, &i) in tour.iter().enumerate() {
        bits[i * n + a] = 1;
    }
    bits
}

/// Length of the closed tour in the given direction.
pub fn tour_length(d: &[Vec<f64>], tour: &[usize]) -> f64 {
    let n = tour.len();
    (0..n).map(|a| d[tour[a]][tour[(a + 1) % n]]).sum()
}

/// Reads `x,y,theta,r` rows (header optional). All rows must share `r`.
pub fn parse_targets_csv(s: &str) -> Result<(Vec<TargetTriple>, f64)> {
    let mut targets = Vec::new();
    let mut radius: Option<f64> = None;
    for (ln, line) in s.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        let nums: std::result::Result<Vec<f64>, _> =
            cols.iter().map(|c| c.parse::<f64>()).collect();
        let nums = match nums {
            Ok(v) => v,
            Err(_) if ln == 0 => continue,
            Err(e) => return Err(CompileError::InvalidInput(format!("line {}: {e}", ln + 1))),
        };
        if nums.len() != 4 {
            return Err(CompileError::InvalidInput(format!(
                "line {}: expected x,y,theta,r",
                ln + 1
            )));
        }
        match radius {
            Some(r) if (r - nums[3]).abs() > 1e-12 => {
                return Err(CompileError::InvalidInput(format!(
                    "line {}: turn radius differs from {r}",
                    ln + 1
                )))
            }
            _ => radius = Some(nums[3]),
        }
        targets.push(TargetTriple::new(nums[0], nums[1], nums[2]));
    }
    let r = radius.ok_or_else(|| CompileError::InvalidInput("no targets".into()))?;
    if !(r > 0.0) {
        return Err(CompileError::InvalidParameter(format!(
            "turn radius must be positive, got {r}"
        )));
    }
    Ok((targets, r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use forge_core::solvers::brute_force;
    use std::f64::consts::PI;

    #[test]
    fn equal_configurations() {
        for th in [0.0, 1.0, 3.0, 6.0] {
            let a = TargetTriple::new(2.0, -1.0, th);
            assert!(dubins_distance(&a, &a, 0.7).unwrap() < 1e-12);
        }
    }

    #[test]
    fn straight_ahead() {
        let a = TargetTriple::new(0.0, 0.0, 0.5);
        let b = TargetTriple::new(3.0 * 0.5f64.cos(), 3.0 * 0.5f64.sin(), 0.5);
        assert!((dubins_distance(&a, &b, 1.0).unwrap() - 3.0).abs() < 1e-9);
    }

    #[test]
    fn semicircle() {
        let r = 1.5;
        let a = TargetTriple::new(0.0, 0.0, 0.0);
        let b = TargetTriple::new(0.0, 2.0 * r, PI);
        assert!((dubins_distance(&a, &b, r).unwrap() - PI * r).abs() < 1e-9);
    }

    #[test]
    fn two_targets() {
        let d = vec![vec![0.0, 2.0], vec![3.0, 0.0]];
        let m = uav_tsp_compile(&d, None, None).unwrap();
        let r = brute_force(&m.qubo).unwrap();
        assert!((r.best_energy - 5.0).abs() < 1e-9);
        assert_eq!(decode_tour(2, &r.best_assignment.bits()).unwrap().len(), 2);
    }

    #[test]
    fn csv_targets() {
        let (t, r) = parse_targets_csv("x,y,theta,r\n0,0,0,1\n1,2,3,1\n").unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(r, 1.0);
        assert!(parse_targets_csv("0,0,0,1\n1,2,3,2\n").is_err());
    }
}
