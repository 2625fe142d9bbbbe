//! Time-to-target statistics.
//!
//! Each run uses a fixed schedule with the budget as a hard cap and records
//! the first sweep (or iteration) at which the target energy is reached. A
//! run that never reaches it is censored. The per-instance statistic is the
//! requested quantile of first-hit times with censored runs ranked last; if
//! that quantile falls on a censored run the statistic itself is censored.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ForgeError, Result};
use crate::model::QuadraticModel;

use super::anneal::anneal_run;
use super::tabu::tabu_run;
use super::{energy_tolerance, rng_for, SaOptions, SaSchedule, TabuParams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SolverConfig {
    Anneal {
        schedule: SaSchedule,
        budget: u64,
        random_order: bool,
    },
    Tabu {
        params: TabuParams,
    },
}

impl SolverConfig {
    pub fn anneal(schedule: SaSchedule, budget: u64) -> Self {
        SolverConfig::Anneal {
            schedule,
            budget,
            random_order: false,
        }
    }

    pub fn budget(&self) -> u64 {
        match self {
            SolverConfig::Anneal { budget, .. } => *budget,
            SolverConfig::Tabu { params } => params.max_iters,
        }
    }

    pub fn with_budget(&self, budget: u64) -> Self {
        match self {
            SolverConfig::Anneal {
                schedule,
                random_order,
                ..
            } => SolverConfig::Anneal {
                schedule: *schedule,
                budget,
                random_order: *random_order,
            },
            SolverConfig::Tabu { params } => SolverConfig::Tabu {
                params: TabuParams {
                    max_iters: budget,
                    ..params.clone()
                },
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub run: u64,
    /// First sweep at which the target was reached; `None` when censored.
    pub first_hit: Option<u64>,
    pub best_energy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TtsStatistic {
    /// Effort in sweeps or iterations; `None` when censored.
    pub value: Option<f64>,
    pub censored: bool,
    pub runs: usize,
    pub hits: usize,
}

/// Runs `runs` independent searches with target early-stopping.
/// Run `r` draws from stream `r` of `seed`, so results are independent of
/// thread count.
pub fn first_hit_times<M: QuadraticModel + Sync + ?Sized>(
    config: &SolverConfig,
    m: &M,
    target: f64,
    runs: u64,
    seed: u64,
) -> Result<Vec<RunRecord>> {
    let tol = energy_tolerance(m);
    (0..runs)
        .into_par_iter()
        .map(|run| {
            let mut rng = rng_for(seed, run);
            let r = match config {
                SolverConfig::Anneal {
                    schedule,
                    budget,
                    random_order,
                } => {
                    let opts = SaOptions {
                        schedule: *schedule,
                        random_order: *random_order,
                        target: Some(target),
                        max_sweeps: Some(*budget),
                    };
                    anneal_run(m, &opts, seed, &mut rng)?
                }
                SolverConfig::Tabu { params } => {
                    let p = TabuParams {
                        target: Some(target),
                        ..params.clone()
                    };
                    tabu_run(m, &p, seed, &mut rng)?
                }
            };
            let hit = r.best_energy <= target + tol;
            Ok(RunRecord {
                run,
                first_hit: hit.then(|| r.best_found_at.max(1)),
                best_energy: r.best_energy,
            })
        })
        .collect()
}

/// Quantile `q` of first-hit times, ranking censored runs last.
pub fn run_quantile(records: &[RunRecord], q: f64) -> Result<TtsStatistic> {
    if !(q > 0.0 && q <= 1.0) {
        return Err(ForgeError::InvalidParameter(format!(
            "quantile {q} outside (0, 1]"
        )));
    }
    if records.is_empty() {
        return Err(ForgeError::InvalidParameter("no runs".into()));
    }
    let mut times: Vec<u64> = records
        .iter()
        .map(|r| r.first_hit.unwrap_or(u64::MAX))
        .collect();
    times.sort_unstable();
    let rank = ((q * times.len() as f64).ceil() as usize).clamp(1, times.len()) - 1;
    let v = times[rank];
    let hits = records.iter().filter(|r| r.first_hit.is_some()).count();
    Ok(TtsStatistic {
        value: (v != u64::MAX).then_some(v as f64),
        censored: v == u64::MAX,
        runs: records.len(),
        hits,
    })
}

pub fn time_to_target<M: QuadraticModel + Sync + ?Sized>(
    config: &SolverConfig,
    m: &M,
    target: f64,
    quantile: f64,
    runs: u64,
    seed: u64,
) -> Result<TtsStatistic> {
    let records = first_hit_times(config, m, target, runs, seed)?;
    run_quantile(&records, quantile)
}

/// Median of per-instance statistics. Censored instances are dropped only
/// while they are fewer than half of the batch; otherwise the batch is
/// censored.
pub fn median_across_instances(stats: &[TtsStatistic]) -> TtsStatistic {
    let censored = stats.iter().filter(|s| s.censored).count();
    let runs = stats.iter().map(|s| s.runs).sum();
    let hits = stats.iter().map(|s| s.hits).sum();
    if stats.is_empty() || 2 * censored >= stats.len() {
        return TtsStatistic {
            value: None,
            censored: true,
            runs,
            hits,
        };
    }
    let mut v: Vec<f64> = stats.iter().filter_map(|s| s.value).collect();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    let median = if v.len() % 2 == 1 {
        v[mid]
    } else {
        0.5 * (v[mid - 1] + v[mid])
    };
    TtsStatistic {
        value: Some(median),
        censored: false,
        runs,
        hits,
    }
}
