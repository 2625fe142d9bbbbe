//! Schrodinger evolution under the interpolated Hamiltonian (hbar = 1).
//!
//! `d psi/dt = -i H(t/T) psi` is integrated with classical RK4 and step
//! doubling for error control (the two estimates are combined by Richardson
//! extrapolation). Every accepted step is audited: if the norm
//! has drifted by more than `norm_tol` the step is rejected and retried with
//! half the step size, otherwise the state is renormalised.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{QaError, Result};
use crate::hamiltonian::ControlHamiltonian;
use crate::state::{stats_on_diagonal, QuantumState};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolveOptions {
    /// Defaults to the uniform superposition.
    pub initial: Option<QuantumState>,
    /// First trial step; defaults to `min(T, 1) / 100`.
    pub dt: Option<f64>,
    /// Local error bound per step (2-norm).
    pub step_tol: f64,
    pub norm_tol: f64,
    /// Number of evenly spaced trajectory samples, including both ends.
    pub samples: usize,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self {
            initial: None,
            dt: None,
            step_tol: 1e-9,
            norm_tol: 1e-8,
            samples: 101,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub norm: f64,
    /// Mean and variance of the problem energy under measurement.
    pub mean_energy: f64,
    pub var_energy: f64,
    /// `<psi|H(t)|psi>`.
    pub instantaneous_energy: f64,
    /// Probability mass on optimal configurations.
    pub success: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolutionResult {
    pub final_state: QuantumState,
    pub success_probability: f64,
    pub trajectory: Vec<TrajectoryPoint>,
    pub steps: usize,
    pub rejected_steps: usize,
    /// Largest single-step norm drift before renormalisation.
    pub max_norm_drift: f64,
}

fn norm2(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

struct Integrator<'a> {
    ch: &'a ControlHamiltonian,
    schedule: &'a dyn Fn(f64) -> f64,
    k: [Vec<Complex64>; 4],
    tmp: Vec<Complex64>,
}

impl<'a> Integrator<'a> {
    fn new(ch: &'a ControlHamiltonian, schedule: &'a dyn Fn(f64) -> f64) -> Self {
        let dim = ch.dim();
        let z = vec![Complex64::new(0.0, 0.0); dim];
        Self {
            ch,
            schedule,
            k: [z.clone(), z.clone(), z.clone(), z.clone()],
            tmp: z,
        }
    }

    fn rk4(&mut self, t: f64, dt: f64, psi: &[Complex64], out: &mut Vec<Complex64>) {
        let [k1, k2, k3, k4] = &mut self.k;
        let tmp = &mut self.tmp;
        // -i H(t) v
        let rhs = |t: f64, v: &[Complex64], o: &mut [Complex64]| {
            self.ch.at((self.schedule)(t)).apply_complex(v, o);
            for x in o.iter_mut() {
                *x = Complex64::new(x.im, -x.re);
            }
        };
        rhs(t, psi, k1);
        for i in 0..psi.len() {
            tmp[i] = psi[i] + k1[i] * (dt / 2.0);
        }
        rhs(t + dt / 2.0, tmp, k2);
        for i in 0..psi.len() {
            tmp[i] = psi[i] + k2[i] * (dt / 2.0);
        }
        rhs(t + dt / 2.0, tmp, k3);
        for i in 0..psi.len() {
            tmp[i] = psi[i] + k3[i] * dt;
        }
        rhs(t + dt, tmp, k4);
        out.clear();
        out.extend(
            (0..psi.len())
                .map(|i| psi[i] + (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (dt / 6.0)),
        );
    }
}

/// Integrates from `t = 0` to `duration` with `H(schedule(t))`.
fn integrate(
    ch: &ControlHamiltonian,
    schedule: &dyn Fn(f64) -> f64,
    duration: f64,
    opts: &EvolveOptions,
) -> Result<EvolutionResult> {
    if opts.samples < 2 {
        return Err(QaError::InvalidParameter(
            "need at least two trajectory samples".into(),
        ));
    }
    let n = ch.num_qubits();
    let initial = match &opts.initial {
        Some(s) if s.num_qubits() != n => {
            return Err(QaError::DimensionMismatch {
                expected: ch.dim(),
                got: s.dim(),
            });
        }
        Some(s) => s.clone(),
        None => QuantumState::uniform(n),
    };
    let ground = ch.ground_indices();
    let diag = ch.diagonal();
    let mut psi: Vec<Complex64> = initial.amplitudes().to_vec();
    let mut integ = Integrator::new(ch, schedule);
    let mut hpsi = vec![Complex64::new(0.0, 0.0); psi.len()];

    let record = |t: f64, psi: &[Complex64], hpsi: &mut [Complex64]| -> TrajectoryPoint {
        let st = QuantumState::from_amplitudes(n, psi.to_vec()).expect("dimension");
        let (mean, var) = stats_on_diagonal(&st, diag);
        ch.at(schedule(t)).apply_complex(psi, hpsi);
        let inst: f64 = psi
            .iter()
            .zip(hpsi.iter())
            .map(|(a, b)| (a.conj() * b).re)
            .sum();
        TrajectoryPoint {
            t,
            norm: norm2(psi),
            mean_energy: mean,
            var_energy: var,
            instantaneous_energy: inst,
            success: st.probability_of(&ground),
        }
    };

    let mut trajectory = vec![record(0.0, &psi, &mut hpsi)];
    let mut dt = opts.dt.unwrap_or(duration.min(1.0) / 100.0);
    let dt_min = 1e-13 * duration.max(1.0);
    let (mut steps, mut rejected) = (0usize, 0usize);
    let mut max_drift: f64 = 0.0;
    let (mut full, mut half, mut half2) = (Vec::new(), Vec::new(), Vec::new());
    let mut t = 0.0;

    for j in 1..opts.samples {
        let t_next = duration * j as f64 / (opts.samples - 1) as f64;
        while t < t_next {
            let h = dt.min(t_next - t);
            if h < dt_min && t_next - t > dt_min {
                return Err(QaError::StepUnderflow { t, dt: h });
            }
            integ.rk4(t, h, &psi, &mut full);
            integ.rk4(t, h / 2.0, &psi, &mut half);
            integ.rk4(t + h / 2.0, h / 2.0, &half.clone(), &mut half2);
            let err = norm2(
                &full
                    .iter()
                    .zip(&half2)
                    .map(|(a, b)| a - b)
                    .collect::<Vec<_>>(),
            );
            // local Richardson extrapolation
            for (h2, f) in half2.iter_mut().zip(&full) {
                *h2 += (*h2 - f) / 15.0;
            }
            let nrm = norm2(&half2);
            let drift = (nrm - 1.0).abs();
            if err > opts.step_tol || drift > opts.norm_tol {
                rejected += 1;
                dt = if err > opts.step_tol {
                    h * (0.9 * (opts.step_tol / err).powf(0.2)).clamp(0.1, 0.5)
                } else {
                    h / 2.0
                };
                continue;
            }
            max_drift = max_drift.max(drift);
            psi.clear();
            psi.extend(half2.iter().map(|c| c / nrm));
            t = if t_next - (t + h) < dt_min {
                t_next
            } else {
                t + h
            };
            steps += 1;
            let grow = if err > 0.0 {
                (0.9 * (opts.step_tol / err).powf(0.2)).clamp(0.2, 2.0)
            } else {
                2.0
            };
            // A step shortened only to land on a sample time does not set the pace.
            if h >= dt {
                dt = h * grow;
            }
        }
        trajectory.push(record(t_next, &psi, &mut hpsi));
    }

    let final_state = QuantumState::from_amplitudes(n, psi)?;
    let success_probability = final_state.probability_of(&ground);
    Ok(EvolutionResult {
        final_state,
        success_probability,
        trajectory,
        steps,
        rejected_steps: rejected,
        max_norm_drift: max_drift,
    })
}

/// Anneals over `[0, T]` with `s = t/T`.
pub fn evolve(ch: &ControlHamiltonian, opts: &EvolveOptions) -> Result<EvolutionResult> {
    let total = ch.total_time();
    integrate(ch, &move |t| (t / total).clamp(0.0, 1.0), total, opts)
}

/// Evolves under the fixed operator `H(s)` for `duration`.
pub fn evolve_frozen(
    ch: &ControlHamiltonian,
    s: f64,
    duration: f64,
    opts: &EvolveOptions,
) -> Result<EvolutionResult> {
    if !(0.0..=1.0).contains(&s) {
        return Err(QaError::InvalidParameter(format!(
            "interpolation parameter {s} outside [0, 1]"
        )));
    }
    integrate(ch, &move |_| s, duration, opts)
}
