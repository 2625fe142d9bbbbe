//! Batch benchmarks: random instances per size, exact targets, and the
//! solver effort needed for a fraction of runs to reach the target.
//!
//! Effort is counted in sweeps (annealing) or iterations (tabu). For one
//! instance it is the `success_quantile` run quantile of first-hit times; a
//! size row reports the median over instances and the 40th and 60th
//! percentiles, with censored instances ranked last.

use std::path::Path;
use std::time::Instant;

use forge_core::solvers::{
    brute_force, median_across_instances, time_to_target, SolverConfig, TabuParams,
};
use forge_core::{chimera_graph, HardwareGraph, SaSchedule};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::instance::{random_instance, DEFAULT_COEFFICIENTS};

/// Largest size for which exact targets are computed.
pub const MAX_BENCH_SIZE: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphSpec {
    pub rows: usize,
    pub cols: usize,
    pub shore: usize,
}

impl GraphSpec {
    pub fn build(&self) -> Result<HardwareGraph> {
        chimera_graph(self.rows, self.cols, self.shore).map_err(CliError::validation)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum BenchSolver {
    Anneal {
        #[serde(default)]
        schedule: SaSchedule,
        /// Sweep cap; defaults to the schedule length.
        #[serde(default)]
        budget: Option<u64>,
    },
    Tabu {
        /// Iteration cap; defaults to the size-scaled value.
        #[serde(default)]
        max_iters: Option<u64>,
        #[serde(default)]
        tenure: Option<usize>,
    },
}

impl BenchSolver {
    pub fn name(&self) -> &'static str {
        match self {
            BenchSolver::Anneal { .. } => "sa",
            BenchSolver::Tabu { .. } => "tabu",
        }
    }

    pub fn config_for(&self, n: usize) -> SolverConfig {
        match self {
            BenchSolver::Anneal { schedule, budget } => {
                SolverConfig::anneal(*schedule, budget.unwrap_or(schedule.sweeps))
            }
            BenchSolver::Tabu { max_iters, tenure } => {
                let base = TabuParams::for_size(n);
                SolverConfig::Tabu {
                    params: TabuParams {
                        max_iters: max_iters.unwrap_or(base.max_iters),
                        tenure: tenure.unwrap_or(base.tenure),
                        ..base
                    },
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BenchConfig {
    pub sizes: Vec<usize>,
    pub instances_per_size: usize,
    pub coefficient_set: Vec<f64>,
    pub solvers: Vec<BenchSolver>,
    pub success_quantile: f64,
    pub runs_per_instance: u64,
    pub graph: GraphSpec,
    pub seed: u64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            sizes: vec![8, 12, 16, 20],
            instances_per_size: 50,
            coefficient_set: DEFAULT_COEFFICIENTS.to_vec(),
            solvers: vec![
                BenchSolver::Anneal {
                    schedule: SaSchedule::default(),
                    budget: None,
                },
                BenchSolver::Tabu {
                    max_iters: None,
                    tenure: None,
                },
            ],
            success_quantile: 0.99,
            runs_per_instance: 100,
            graph: GraphSpec {
                rows: 4,
                cols: 4,
                shore: 4,
            },
            seed: 0,
        }
    }
}

impl BenchConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(CliError::Validation(m));
        if self.sizes.is_empty() {
            return bad("no sizes given".into());
        }
        if self.sizes.windows(2).any(|w| w[0] >= w[1]) {
            return bad(format!(
                "sizes must be strictly ascending, got {:?}",
                self.sizes
            ));
        }
        let nodes = self.graph.build()?.num_nodes();
        let top = *self.sizes.last().unwrap();
        if self.sizes[0] == 0 || top > nodes.min(MAX_BENCH_SIZE) {
            return bad(format!(
                "sizes must lie in 1..={}, got {:?}",
                nodes.min(MAX_BENCH_SIZE),
                self.sizes
            ));
        }
        if !(self.success_quantile > 0.0 && self.success_quantile <= 1.0) {
            return bad(format!(
                "success quantile must lie in (0, 1], got {}",
                self.success_quantile
            ));
        }
        if self.instances_per_size == 0 || self.runs_per_instance == 0 {
            return bad("instances and runs per instance must be positive".into());
        }
        if self.coefficient_set.is_empty() || self.coefficient_set.iter().any(|c| !c.is_finite()) {
            return bad("coefficient set must be non-empty and finite".into());
        }
        if self.solvers.is_empty() {
            return bad("no solvers given".into());
        }
        for s in &self.solvers {
            if let BenchSolver::Anneal { schedule, .. } = s {
                schedule.validate().map_err(CliError::validation)?;
            }
        }
        Ok(())
    }

    /// Seeds for instance `k` of size `n` and for its solver runs; a pure
    /// function of the configuration seed and the key.
    pub fn seeds(&self, n: usize, k: usize) -> (u64, u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(((n as u64) << 32) | k as u64);
        (rng.gen(), rng.gen())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceRecord {
    pub size: usize,
    pub instance: usize,
    pub instance_seed: u64,
    pub solver: String,
    /// Exact optimum used as the target.
    pub target: f64,
    pub effort: Option<f64>,
    pub censored: bool,
    pub hits: usize,
    pub runs: usize,
    /// Wall time for all runs; informational and not reproducible.
    pub wall_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub size: usize,
    pub solver: String,
    pub instances: usize,
    pub median: Option<f64>,
    pub p40: Option<f64>,
    pub p60: Option<f64>,
    pub censored_instances: usize,
    pub median_censored: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchTable {
    pub config: BenchConfig,
    pub rows: Vec<BenchRow>,
    pub records: Vec<InstanceRecord>,
}

/// Quantile `q` over instances with censored entries ranked last; `None`
/// when it lands on one.
fn instance_quantile(efforts: &[Option<f64>], q: f64) -> Option<f64> {
    let mut v: Vec<f64> = efforts.iter().map(|e| e.unwrap_or(f64::INFINITY)).collect();
    v.sort_by(f64::total_cmp);
    let rank = ((q * v.len() as f64).ceil() as usize).clamp(1, v.len()) - 1;
    v[rank].is_finite().then_some(v[rank])
}

pub fn bench_run(cfg: &BenchConfig) -> Result<BenchTable> {
    cfg.validate()?;
    let graph = cfg.graph.build()?;
    let mut records = Vec::new();
    let mut rows = Vec::new();
    for &n in &cfg.sizes {
        let per_instance: Vec<Vec<InstanceRecord>> = (0..cfg.instances_per_size)
            .into_par_iter()
            .map(|k| {
                let (iseed, rseed) = cfg.seeds(n, k);
                let m = random_instance(n, &graph, &cfg.coefficient_set, iseed)?;
                let target = brute_force(&m).map_err(CliError::solver)?.best_energy;
                cfg.solvers
                    .iter()
                    .map(|s| {
                        let start = Instant::now();
                        let stat = time_to_target(
                            &s.config_for(n),
                            &m,
                            target,
                            cfg.success_quantile,
                            cfg.runs_per_instance,
                            rseed,
                        )
                        .map_err(CliError::solver)?;
                        Ok(InstanceRecord {
                            size: n,
                            instance: k,
                            instance_seed: iseed,
                            solver: s.name().into(),
                            target,
                            effort: stat.value,
                            censored: stat.censored,
                            hits: stat.hits,
                            runs: stat.runs,
                            wall_seconds: start.elapsed().as_secs_f64(),
                        })
                    })
                    .collect()
            })
            .collect::<Result<_>>()?;
        for (si, s) in cfg.solvers.iter().enumerate() {
            let recs: Vec<&InstanceRecord> = per_instance.iter().map(|r| &r[si]).collect();
            let stats: Vec<_> = recs
                .iter()
                .map(|r| forge_core::solvers::TtsStatistic {
                    value: r.effort,
                    censored: r.censored,
                    runs: r.runs,
                    hits: r.hits,
                })
                .collect();
            let median = median_across_instances(&stats);
            let efforts: Vec<Option<f64>> = recs.iter().map(|r| r.effort).collect();
            let censored = recs.iter().filter(|r| r.censored).count();
            if median.censored {
                log::warn!(
                    "size {n}, {}: median censored ({censored} censored instances)",
                    s.name()
                );
            }
            rows.push(BenchRow {
                size: n,
                solver: s.name().into(),
                instances: recs.len(),
                median: median.value,
                p40: instance_quantile(&efforts, 0.4),
                p60: instance_quantile(&efforts, 0.6),
                censored_instances: censored,
                median_censored: median.censored,
            });
        }
        records.extend(per_instance.into_iter().flatten());
    }
    Ok(BenchTable {
        config: cfg.clone(),
        rows,
        records,
    })
}

impl BenchTable {
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &self.rows {
            w.serialize(r).map_err(CliError::solver)?;
        }
        let bytes = w.into_inner().map_err(CliError::solver)?;
        String::from_utf8(bytes).map_err(CliError::solver)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(CliError::solver)
    }

    pub fn rows_from_csv(text: &str) -> Result<Vec<BenchRow>> {
        csv::Reader::from_reader(text.as_bytes())
            .deserialize()
            .collect::<std::result::Result<_, _>>()
            .map_err(CliError::validation)
    }

    /// Writes `bench.csv`, `bench.json` and one two-column `<solver>.dat`
    /// (size, median) per solver into `dir`.
    pub fn write_all(&self, dir: &Path) -> Result<()> {
        let io = |e: std::io::Error| CliError::Solver(format!("{}: {e}", dir.display()));
        std::fs::create_dir_all(dir).map_err(io)?;
        std::fs::write(dir.join("bench.csv"), self.to_csv()?).map_err(io)?;
        std::fs::write(dir.join("bench.json"), self.to_json()?).map_err(io)?;
        for s in &self.config.solvers {
            let mut dat = format!("# size median_{}\n", s.name());
            for r in self.rows.iter().filter(|r| r.solver == s.name()) {
                if let Some(m) = r.median {
                    dat.push_str(&format!("{} {}\n", r.size, m));
                }
            }
            std::fs::write(dir.join(format!("{}.dat", s.name())), dat).map_err(io)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantile_with_censoring() {
        let e = [Some(4.0), None, Some(1.0), Some(3.0), Some(2.0)];
        assert_eq!(instance_quantile(&e, 0.4), Some(2.0));
        assert_eq!(instance_quantile(&e, 0.6), Some(3.0));
        assert_eq!(instance_quantile(&e, 1.0), None);
    }

    #[test]
    fn config_checks() {
        let ok = BenchConfig::default();
        assert!(ok.validate().is_ok());
        for bad in [
            BenchConfig {
                sizes: vec![12, 8],
                ..ok.clone()
            },
            BenchConfig {
                sizes: vec![],
                ..ok.clone()
            },
            BenchConfig {
                sizes: vec![30],
                ..ok.clone()
            },
            BenchConfig {
                success_quantile: 0.0,
                ..ok.clone()
            },
            BenchConfig {
                instances_per_size: 0,
                ..ok.clone()
            },
            BenchConfig {
                coefficient_set: vec![],
                ..ok.clone()
            },
        ] {
            assert!(matches!(bad.validate(), Err(CliError::Validation(_))));
        }
    }

    #[test]
    fn config_json_defaults() {
        let c: BenchConfig =
            serde_json::from_str(r#"{"sizes": [4, 6], "solvers": [{"kind": "tabu"}]}"#).unwrap();
        assert_eq!(c.sizes, vec![4, 6]);
        assert_eq!(c.instances_per_size, 50);
        assert_eq!(c.solvers[0].name(), "tabu");
    }
}
