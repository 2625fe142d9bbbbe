//! Minimisation of an expensive spin function by repeatedly fitting a
//! hardware-shaped Ising model to the best evaluations and sampling its low
//! energy states.

use std::collections::{HashMap, HashSet};
use std::fmt::Display;

use forge_core::solvers::{tabu_search_with, TabuParams};
use forge_core::{simulated_annealing, Assignment, HardwareGraph, IsingModel, SaSchedule};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{HybridError, Result};
use crate::population::{filter_population, fit_hardware_model, FitOptions, Population};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Sampler {
    #[default]
    Tabu,
    Anneal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlackboxOptions {
    pub pop_size: usize,
    pub iters: usize,
    pub keep_fraction: f64,
    /// Fraction of each new generation drawn uniformly at random.
    pub immigrant_fraction: f64,
    /// Iterations without a new incumbent before stopping.
    pub stall_limit: usize,
    /// Solver runs on the fitted model per iteration; `None` means
    /// `max(4, pop_size / 4)`.
    pub restarts: Option<usize>,
    pub sampler: Sampler,
    pub fit: FitOptions,
}

impl BlackboxOptions {
    pub fn new(pop_size: usize, iters: usize) -> Self {
        Self {
            pop_size,
            iters,
            keep_fraction: 0.5,
            immigrant_fraction: 0.1,
            stall_limit: 5,
            restarts: None,
            sampler: Sampler::Tabu,
            fit: FitOptions::default(),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.pop_size < 2 {
            return Err(HybridError::InvalidParameter(format!(
                "population size must be at least 2, got {}",
                self.pop_size
            )));
        }
        if !(self.keep_fraction > 0.0 && self.keep_fraction <= 1.0) {
            return Err(HybridError::InvalidParameter(format!(
                "keep fraction must lie in (0, 1], got {}",
                self.keep_fraction
            )));
        }
        if !(0.0..=1.0).contains(&self.immigrant_fraction) {
            return Err(HybridError::InvalidParameter(format!(
                "immigrant fraction must lie in [0, 1], got {}",
                self.immigrant_fraction
            )));
        }
        if self.stall_limit == 0 {
            return Err(HybridError::InvalidParameter(
                "stall limit must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlackboxReport {
    pub best: Assignment,
    pub best_value: f64,
    /// Best value after the initial population, then after each iteration.
    pub history: Vec<f64>,
    pub iterations: usize,
    pub evaluations: usize,
    pub stopped_on_stall: bool,
    pub population: Population,
}

struct Evaluator<F> {
    oracle: F,
    seen: HashMap<Vec<i8>, f64>,
    best: Option<(Vec<i8>, f64)>,
    calls: usize,
}

impl<F, E> Evaluator<F>
where
    F: FnMut(&[i8]) -> std::result::Result<f64, E>,
    E: Display,
{
    fn eval(&mut self, s: &[i8], iteration: usize) -> Result<f64> {
        let v = (self.oracle)(s).map_err(|e| HybridError::Oracle {
            iteration,
            evaluation: self.calls,
            message: e.to_string(),
        })?;
        if v.is_nan() {
            return Err(HybridError::Oracle {
                iteration,
                evaluation: self.calls,
                message: "oracle returned NaN".into(),
            });
        }
        self.calls += 1;
        self.seen.insert(s.to_vec(), v);
        if self.best.as_ref().is_none_or(|(_, b)| v < *b) {
            self.best = Some((s.to_vec(), v));
        }
        Ok(v)
    }
}

fn random_spins(rng: &mut ChaCha8Rng, n: usize) -> Vec<i8> {
    (0..n)
        .map(|_| if rng.gen::<bool>() { 1 } else { -1 })
        .collect()
}

/// Up to `count` unseen random configurations, giving up after a bounded
/// number of draws when the space is nearly exhausted.
fn fresh_random(
    rng: &mut ChaCha8Rng,
    n: usize,
    count: usize,
    taken: &mut HashSet<Vec<i8>>,
) -> Vec<Vec<i8>> {
    let mut out = Vec::new();
    let mut tries = 0;
    while out.len() < count && tries < 20 * count + 100 {
        tries += 1;
        let s = random_spins(rng, n);
        if taken.insert(s.clone()) {
            out.push(s);
        }
    }
    out
}

fn low_energy_states(
    model: &IsingModel,
    sampler: Sampler,
    restarts: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Vec<i8>>> {
    let n = model.num_spins();
    let params = TabuParams::for_size(n);
    let scale = model.max_abs_coefficient().max(1e-12);
    let schedule = SaSchedule::new(0.1 / scale, 10.0 / scale, (20 * n as u64).max(200), true)?;
    let mut out = Vec::with_capacity(restarts);
    for _ in 0..restarts {
        let seed = rng.gen::<u64>();
        let r = match sampler {
            Sampler::Tabu => tabu_search_with(model, &params, seed)?,
            Sampler::Anneal => simulated_annealing(model, &schedule, seed)?,
        };
        out.push(r.best_assignment.spins());
    }
    Ok(out)
}

/// Convenience wrapper with default options.
pub fn blackbox_minimize<F, E>(
    oracle: F,
    graph: &HardwareGraph,
    pop_size: usize,
    iters: usize,
    seed: u64,
    sampler: Sampler,
) -> Result<BlackboxReport>
where
    F: FnMut(&[i8]) -> std::result::Result<f64, E>,
    E: Display,
{
    let opts = BlackboxOptions {
        sampler,
        ..BlackboxOptions::new(pop_size, iters)
    };
    blackbox_minimize_with(oracle, graph, &opts, seed)
}

/// Each iteration filters the population, fits the hardware model to the
/// survivors, and adds `pop_size` unseen configurations to them: the fitted
/// model's solver results and their single-spin neighbours ranked by fitted
/// energy, plus random immigrants. Configurations are never evaluated twice.
pub fn blackbox_minimize_with<F, E>(
    oracle: F,
    graph: &HardwareGraph,
    opts: &BlackboxOptions,
    seed: u64,
) -> Result<BlackboxReport>
where
    F: FnMut(&[i8]) -> std::result::Result<f64, E>,
    E: Display,
{
    opts.validate()?;
    let n = graph.num_nodes();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ev = Evaluator {
        oracle,
        seen: HashMap::new(),
        best: None,
        calls: 0,
    };
    let mut taken = HashSet::new();
    let init = fresh_random(&mut rng, n, opts.pop_size, &mut taken);
    let mut configs = Vec::with_capacity(init.len());
    let mut values = Vec::with_capacity(init.len());
    for s in init {
        values.push(ev.eval(&s, 0)?);
        configs.push(Assignment::from_spins(&s)?);
    }
    let mut pop = Population::new(configs, values, 0)?;
    let mut history = vec![ev.best.as_ref().map(|b| b.1).unwrap_or(f64::INFINITY)];
    let restarts = opts.restarts.unwrap_or((opts.pop_size / 4).max(4));
    let immigrants = (opts.immigrant_fraction * opts.pop_size as f64).ceil() as usize;
    let mut stall = 0;
    let mut iterations = 0;
    let mut stopped_on_stall = false;

    for it in 1..=opts.iters {
        let kept = filter_population(&pop, opts.keep_fraction)?;
        let fit = fit_hardware_model(&kept, graph, &opts.fit)?;
        log::debug!(
            "iteration {it}: fit rms {:.3e} on {} configurations",
            fit.rms,
            kept.len()
        );

        let mut candidates: HashSet<Vec<i8>> = HashSet::new();
        for s in low_energy_states(&fit.model, opts.sampler, restarts, &mut rng)? {
            for i in 0..n {
                let mut t = s.clone();
                t[i] = -t[i];
                candidates.insert(t);
            }
            candidates.insert(s);
        }
        let mut ranked: Vec<(f64, Vec<i8>)> = candidates
            .into_iter()
            .filter(|s| !taken.contains(s))
            .map(|s| (fit.predict(&s), s))
            .collect();
        ranked.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
        let room = opts.pop_size;
        let guided = room - immigrants.min(room);
        let mut fresh: Vec<Vec<i8>> = ranked.into_iter().take(guided).map(|(_, s)| s).collect();
        fresh.iter().for_each(|s| {
            taken.insert(s.clone());
        });
        let fill = room - fresh.len();
        fresh.extend(fresh_random(&mut rng, n, fill, &mut taken));

        let before = ev.best.as_ref().map(|b| b.1).unwrap_or(f64::INFINITY);
        let mut configs = kept.configs().to_vec();
        let mut values = kept.values().to_vec();
        for s in fresh {
            values.push(ev.eval(&s, it)?);
            configs.push(Assignment::from_spins(&s)?);
        }
        pop = Population::new(configs, values, it)?;
        iterations = it;
        let after = ev.best.as_ref().map(|b| b.1).unwrap_or(f64::INFINITY);
        history.push(after);
        if after < before {
            stall = 0;
        } else {
            stall += 1;
            if stall >= opts.stall_limit {
                stopped_on_stall = true;
                break;
            }
        }
    }

    let (best, best_value) = ev
        .best
        .ok_or_else(|| HybridError::InvalidInput("graph has no configurations".into()))?;
    Ok(BlackboxReport {
        best: Assignment::from_spins(&best)?,
        best_value,
        history,
        iterations,
        evaluations: ev.calls,
        stopped_on_stall,
        population: pop,
    })
}
