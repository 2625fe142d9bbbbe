use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde_json::{json, Map, Value};

use forge_cli::{
    bench_run, scaling_fit, BenchConfig, BenchRow, BenchTable, CliError, Result, SubprocessOracle,
};
use forge_compile::learning::qims::selected_centers;
use forge_compile::learning::{
    cut_value, qboost_compile, qcut_compile, qcut_decode, qims_batch, qims_compile, Metric,
    PointSet, QimsParams, Stump, WeakClassifierMatrix,
};
use forge_compile::mission::faulttree::{decode_cut, faulttree_compile, FaultTree};
use forge_compile::mission::planning::{
    plan_compile_reduced, plan_decode_validate, rocket_problem, PlanningProblem,
};
use forge_compile::mission::sat::{parse_dimacs, sat3_compile, sat3_random_instance};
use forge_compile::mission::uav::{
    decode_tour, distance_matrix, parse_targets_csv, tour_length, uav_tsp_compile, Vehicle,
};
use forge_compile::CompileError;
use forge_core::io::{format_assignment, parse_assignment, problem_to_json, read_problem, Problem};
use forge_core::solvers::{exact_minimum, tabu_search_with, TabuParams};
use forge_core::{
    check_compatible, chimera_graph, simulated_annealing, Assignment, Form, HardwareGraph,
    QuadraticModel, SaSchedule,
};
use forge_hybrid::{blackbox_minimize_with, BlackboxOptions, HybridError, Sampler};
use forge_qa::{evolve, spectrum_scan, ControlHamiltonian, EigenMethod, EvolveOptions};

#[derive(Parser)]
#[command(
    name = "forge",
    version,
    about = "QUBO and Ising modelling, compilers, solvers and benchmarks"
)]
struct Cli {
    /// JSON file of option defaults, either flat or keyed by subcommand.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Rewrite a problem file in the other form.
    Convert {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Energy of one assignment.
    Energy {
        #[arg(long)]
        input: PathBuf,
        /// Bits such as `0110`, or spins such as `+1,-1,-1`.
        #[arg(long, allow_hyphen_values = true)]
        assignment: String,
    },
    /// Describe a Chimera graph, optionally checking a problem against it.
    Graph {
        /// `chimera:RxCxS`.
        #[arg(long)]
        graph: Option<String>,
        #[arg(long)]
        check: Option<PathBuf>,
        #[arg(long)]
        edges: bool,
    },
    /// Minimise a problem file.
    Solve {
        #[arg(long)]
        input: PathBuf,
        /// exact, sa or tabu.
        #[arg(long)]
        solver: Option<String>,
        #[arg(long)]
        sweeps: Option<u64>,
        #[arg(long)]
        iters: Option<u64>,
    },
    /// Quantum annealing simulation.
    Qa {
        #[command(subcommand)]
        cmd: QaCmd,
    },
    /// Learning problems.
    Ml {
        #[command(subcommand)]
        cmd: MlCmd,
    },
    /// STRIPS planning at a fixed horizon.
    Plan {
        /// Name-based JSON domain.
        #[arg(long)]
        domain: Option<PathBuf>,
        /// Use the built-in rocket domain.
        #[arg(long)]
        rocket: bool,
        #[arg(long)]
        horizon: Option<usize>,
        #[arg(long)]
        epsilon: Option<f64>,
        /// exact (default), sa or tabu.
        #[arg(long)]
        solver: Option<String>,
    },
    /// Minimum-weight cut of a fault tree.
    Fault {
        #[arg(long)]
        tree: PathBuf,
        #[arg(long)]
        a: Option<f64>,
        #[arg(long)]
        b: Option<f64>,
    },
    /// Shortest closed tour over Dubins targets.
    Uav {
        /// Rows `x,y,theta,r`.
        #[arg(long)]
        targets: PathBuf,
        /// Overrides the radius column together with `--turn-rate`.
        #[arg(long)]
        speed: Option<f64>,
        #[arg(long)]
        turn_rate: Option<f64>,
        #[arg(long)]
        solver: Option<String>,
    },
    /// 3-SAT through the clause gadget.
    Sat {
        #[arg(long)]
        cnf: Option<PathBuf>,
        /// Random instance with this many variables.
        #[arg(long)]
        random: Option<usize>,
        #[arg(long)]
        ratio: Option<f64>,
        #[arg(long)]
        solver: Option<String>,
    },
    /// Minimise an external function of spins.
    Blackbox {
        /// Shell command speaking the line protocol.
        #[arg(long)]
        oracle: String,
        #[arg(long)]
        graph: Option<String>,
        #[arg(long)]
        pop: Option<usize>,
        #[arg(long)]
        iters: Option<usize>,
        /// tabu or anneal.
        #[arg(long)]
        sampler: Option<String>,
    },
    /// Batch benchmark; writes CSV, JSON and per-solver data files.
    Bench {
        /// Comma-separated sizes.
        #[arg(long)]
        sizes: Option<String>,
        #[arg(long)]
        instances: Option<usize>,
        #[arg(long)]
        runs: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Scaling fits of a benchmark table (CSV or JSON).
    Fit {
        #[arg(long)]
        table: PathBuf,
    },
}

#[derive(Subcommand)]
enum QaCmd {
    /// Low-lying spectrum, gap and tau over the anneal.
    Spectrum {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Schrodinger evolution over total time `T`.
    Evolve {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long = "T")]
        total_time: Option<f64>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum MlCmd {
    /// Sparse vote over median-threshold stumps. Rows: features then a +-1 label.
    Qboost {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        lambda: Option<f64>,
    },
    /// Clustering by maximum cut. Rows: coordinates.
    Qcut {
        #[arg(long)]
        points: PathBuf,
        #[arg(long)]
        k: Option<usize>,
        /// euclidean or max_coordinate.
        #[arg(long)]
        metric: Option<String>,
    },
    /// Box cover of a point set.
    Qims {
        #[arg(long)]
        points: PathBuf,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        mu: Option<f64>,
        #[arg(long)]
        lambda: Option<f64>,
        /// Stream through batches of at most this many boxes.
        #[arg(long)]
        capacity: Option<usize>,
    },
}

/// Option lookup: command-line flag, then the subcommand section of the
/// config file, then its top level, then the default.
struct Settings {
    root: Map<String, Value>,
    section: &'static str,
}

impl Settings {
    fn load(path: Option<&Path>, section: &'static str) -> Result<Self> {
        let root = match path {
            None => Map::new(),
            Some(p) => {
                match serde_json::from_str::<Value>(&read_text(p)?).map_err(CliError::validation)? {
                    Value::Object(m) => m,
                    _ => {
                        return Err(CliError::Validation(format!(
                            "{}: config must be a JSON object",
                            p.display()
                        )))
                    }
                }
            }
        };
        Ok(Self { root, section })
    }

    fn lookup(&self, key: &str) -> Option<&Value> {
        self.root
            .get(self.section)
            .and_then(|s| s.get(key))
            .or_else(|| self.root.get(key))
    }

    fn get<T: DeserializeOwned>(&self, key: &str, flag: Option<T>, default: T) -> Result<T> {
        if let Some(v) = flag {
            return Ok(v);
        }
        match self.lookup(key) {
            Some(v) => serde_json::from_value(v.clone())
                .map_err(|e| CliError::Validation(format!("config key {key:?}: {e}"))),
            None => Ok(default),
        }
    }
}

fn read_text(p: &Path) -> Result<String> {
    std::fs::read_to_string(p).map_err(|e| CliError::Validation(format!("{}: {e}", p.display())))
}

fn write_text(p: &Path, s: &str) -> Result<()> {
    std::fs::write(p, s).map_err(|e| CliError::Solver(format!("{}: {e}", p.display())))
}

fn problem(p: &Path) -> Result<Problem> {
    read_problem(p).map_err(|e| CliError::Validation(format!("{}: {e}", p.display())))
}

fn parse_graph(spec: &str) -> Result<HardwareGraph> {
    let bad = || CliError::Validation(format!("graph must look like chimera:RxCxS, got {spec:?}"));
    let dims = spec.strip_prefix("chimera:").ok_or_else(bad)?;
    let v: Vec<usize> = dims
        .split('x')
        .map(|t| t.parse().map_err(|_| bad()))
        .collect::<Result<_>>()?;
    if v.len() != 3 {
        return Err(bad());
    }
    chimera_graph(v[0], v[1], v[2]).map_err(CliError::validation)
}

fn compile_err(e: CompileError) -> CliError {
    match e {
        CompileError::Solver(m) => CliError::Solver(m),
        CompileError::Unsatisfiable(m) => CliError::Solver(m),
        other => CliError::validation(other),
    }
}

/// Minimiser of `m` in its own form. `auto` is exact up to 40 variables and
/// tabu beyond.
fn minimize<M: QuadraticModel + ?Sized>(
    m: &M,
    solver: &str,
    seed: u64,
    sweeps: Option<u64>,
    iters: Option<u64>,
) -> Result<(Assignment, f64)> {
    let n = m.num_vars();
    let r = match solver {
        "auto" if n <= 40 => exact_minimum(m),
        "exact" => exact_minimum(m),
        "auto" | "tabu" => {
            let base = TabuParams::for_size(n);
            tabu_search_with(
                m,
                &TabuParams {
                    max_iters: iters.unwrap_or(base.max_iters),
                    ..base
                },
                seed,
            )
        }
        "sa" => {
            let s = SaSchedule {
                sweeps: sweeps.unwrap_or(1000),
                ..SaSchedule::default()
            };
            simulated_annealing(m, &s, seed)
        }
        other => {
            return Err(CliError::Validation(format!(
                "unknown solver {other:?}; use exact, sa or tabu"
            )))
        }
    }
    .map_err(CliError::solver)?;
    Ok((r.best_assignment, r.best_energy))
}

fn csv_rows(p: &Path) -> Result<Vec<Vec<f64>>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(p)
        .map_err(|e| CliError::Validation(format!("{}: {e}", p.display())))?;
    let mut rows = Vec::new();
    for (ln, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| CliError::Validation(format!("{}: {e}", p.display())))?;
        let row: std::result::Result<Vec<f64>, _> = rec.iter().map(str::parse::<f64>).collect();
        match row {
            Ok(r) => rows.push(r),
            // a header line
            Err(_) if ln == 0 => continue,
            Err(_) => {
                return Err(CliError::Validation(format!(
                    "{}: bad number on row {}",
                    p.display(),
                    ln + 1
                )))
            }
        }
    }
    Ok(rows)
}

fn point_set(p: &Path, metric: &str) -> Result<PointSet> {
    let metric = match metric {
        "euclidean" => Metric::Euclidean,
        "max_coordinate" => Metric::MaxCoordinate,
        other => return Err(CliError::Validation(format!("unknown metric {other:?}"))),
    };
    PointSet::new(csv_rows(p)?, metric).map_err(compile_err)
}

fn run(cli: Cli) -> Result<Value> {
    let cfg_path = cli.config.as_deref();
    match cli.cmd {
        Cmd::Convert { input, output } => {
            let out = problem_to_json(&problem(&input)?.converted());
            if let Some(o) = output {
                write_text(&o, &out)?;
                Ok(json!({ "written": o }))
            } else {
                serde_json::from_str(&out).map_err(CliError::solver)
            }
        }
        Cmd::Energy { input, assignment } => {
            let p = problem(&input)?;
            let a =
                parse_assignment(&assignment, p.assignment_form()).map_err(CliError::validation)?;
            let e = p.energy(&a).map_err(CliError::validation)?;
            Ok(json!({ "energy": e }))
        }
        Cmd::Graph {
            graph,
            check,
            edges,
        } => {
            let st = Settings::load(cfg_path, "graph")?;
            let g = parse_graph(&st.get("graph", graph, "chimera:2x2x4".into())?)?;
            let mut out = json!({ "nodes": g.num_nodes(), "edges": g.edges().len() });
            if edges {
                out["edge_list"] = json!(g.edges().iter().collect::<Vec<_>>());
            }
            if let Some(c) = check {
                let m = problem(&c)?.to_ising();
                let bad = check_compatible(&m, &g);
                out["compatible"] = json!(m.num_spins() <= g.num_nodes() && bad.is_empty());
                out["missing_edges"] = json!(bad);
            }
            Ok(out)
        }
        Cmd::Solve {
            input,
            solver,
            sweeps,
            iters,
        } => {
            let st = Settings::load(cfg_path, "solve")?;
            let seed = st.get("seed", cli.seed, 0)?;
            let solver: String = st.get("solver", solver, "exact".into())?;
            let sweeps = st.get("sweeps", sweeps, 1000)?;
            let p = problem(&input)?;
            let (a, e) = match &p {
                Problem::Qubo(q) => minimize(q, &solver, seed, Some(sweeps), iters)?,
                Problem::Ising(m) => minimize(m, &solver, seed, Some(sweeps), iters)?,
            };
            Ok(
                json!({ "solver": solver, "energy": e, "assignment": format_assignment(&a), "seed": seed }),
            )
        }
        Cmd::Qa { cmd } => run_qa(cmd, cfg_path),
        Cmd::Ml { cmd } => run_ml(cmd, cfg_path, cli.seed),
        Cmd::Plan {
            domain,
            rocket,
            horizon,
            epsilon,
            solver,
        } => {
            let st = Settings::load(cfg_path, "plan")?;
            let horizon = st.get("horizon", horizon, 3)?;
            let epsilon: Option<f64> = st.get("epsilon", epsilon.map(Some), None)?;
            let p = match (domain, rocket) {
                (Some(d), false) => {
                    PlanningProblem::from_json(&read_text(&d)?).map_err(compile_err)?
                }
                (None, true) => rocket_problem(),
                _ => {
                    return Err(CliError::Validation(
                        "give exactly one of --domain or --rocket".into(),
                    ))
                }
            };
            let (q, fixed) = plan_compile_reduced(&p, horizon, epsilon).map_err(compile_err)?;
            let solver: String = st.get("solver", solver, "exact".into())?;
            let (a, _) = minimize(&q, &solver, st.get("seed", cli.seed, 0)?, None, None)?;
            let full = fixed.expand(&a).map_err(compile_err)?;
            let report = plan_decode_validate(&p, horizon, &full).map_err(compile_err)?;
            let out = json!({
                "horizon": horizon,
                "free_variables": q.num_vars(),
                "fixed_variables": fixed.num_fixed(),
                "valid": report.is_valid(),
                "steps": report.operator_names(&p),
                "violations": format!("{:?}", report.violations),
            });
            if report.is_valid() {
                Ok(out)
            } else {
                Err(CliError::Solver(format!("decoded plan is invalid: {out}")))
            }
        }
        Cmd::Fault { tree, a, b } => {
            let st = Settings::load(cfg_path, "fault")?;
            let t = FaultTree::from_json(&read_text(&tree)?).map_err(compile_err)?;
            let fm = faulttree_compile(
                &t,
                st.get("a", a.map(Some), None)?,
                st.get("b", b.map(Some), None)?,
            )
            .map_err(compile_err)?;
            let (x, e) = minimize(&fm.model, "auto", st.get("seed", cli.seed, 0)?, None, None)?;
            let cut = decode_cut(&t, &x).map_err(compile_err)?;
            Ok(
                json!({ "cut": cut.cut, "weight": cut.weight, "triggers_top": cut.triggers_top, "energy": e, "a": fm.a, "b": fm.b }),
            )
        }
        Cmd::Uav {
            targets,
            speed,
            turn_rate,
            solver,
        } => {
            let st = Settings::load(cfg_path, "uav")?;
            let (ts, r) = parse_targets_csv(&read_text(&targets)?).map_err(compile_err)?;
            let radius = match (
                st.get("speed", speed.map(Some), None)?,
                st.get("turn_rate", turn_rate.map(Some), None)?,
            ) {
                (Some(s), Some(w)) => Vehicle {
                    speed: s,
                    max_turn_rate: w,
                }
                .turn_radius()
                .map_err(compile_err)?,
                (None, None) => r,
                _ => {
                    return Err(CliError::Validation(
                        "--speed and --turn-rate go together".into(),
                    ))
                }
            };
            let d = distance_matrix(&ts, radius).map_err(compile_err)?;
            let um = uav_tsp_compile(&d, None, None).map_err(compile_err)?;
            let solver: String = st.get("solver", solver, "auto".into())?;
            let (a, e) = minimize(&um.qubo, &solver, st.get("seed", cli.seed, 0)?, None, None)?;
            let tour = decode_tour(ts.len(), &a.bits())
                .map_err(|e| CliError::Solver(format!("no tour decoded: {e}")))?;
            Ok(
                json!({ "tour": tour, "length": tour_length(&d, &tour), "energy": e, "radius": radius }),
            )
        }
        Cmd::Sat {
            cnf,
            random,
            ratio,
            solver,
        } => {
            let st = Settings::load(cfg_path, "sat")?;
            let seed = st.get("seed", cli.seed, 0)?;
            let inst = match (cnf, random) {
                (Some(f), None) => parse_dimacs(&read_text(&f)?).map_err(compile_err)?,
                (None, Some(n)) => sat3_random_instance(n, st.get("ratio", ratio, 4.26)?, seed)
                    .map_err(compile_err)?,
                _ => {
                    return Err(CliError::Validation(
                        "give exactly one of --cnf or --random".into(),
                    ))
                }
            };
            let q = sat3_compile(&inst.clauses, inst.num_vars).map_err(compile_err)?;
            let (a, e) = minimize(
                &q,
                &st.get("solver", solver, "auto".to_string())?,
                seed,
                None,
                None,
            )?;
            let z = &a.bits()[..inst.num_vars];
            Ok(json!({
                "variables": inst.num_vars,
                "clauses": inst.clauses.len(),
                "violated": inst.violated(z),
                "energy": e,
                "assignment": z.iter().map(|b| char::from(b'0' + b)).collect::<String>(),
            }))
        }
        Cmd::Blackbox {
            oracle,
            graph,
            pop,
            iters,
            sampler,
        } => {
            let st = Settings::load(cfg_path, "blackbox")?;
            let g = parse_graph(&st.get("graph", graph, "chimera:2x2x4".into())?)?;
            let sampler = match st.get("sampler", sampler, "tabu".to_string())?.as_str() {
                "tabu" => Sampler::Tabu,
                "anneal" => Sampler::Anneal,
                other => return Err(CliError::Validation(format!("unknown sampler {other:?}"))),
            };
            let opts = BlackboxOptions {
                sampler,
                ..BlackboxOptions::new(st.get("pop", pop, 64)?, st.get("iters", iters, 50)?)
            };
            let mut o = SubprocessOracle::spawn(&oracle)?;
            let r = blackbox_minimize_with(
                |s: &[i8]| o.evaluate(s),
                &g,
                &opts,
                st.get("seed", cli.seed, 0)?,
            )
            .map_err(|e| match e {
                HybridError::Oracle { .. } => CliError::solver(e),
                other => CliError::validation(other),
            })?;
            Ok(json!({
                "best_value": r.best_value,
                "best": format_assignment(&r.best),
                "iterations": r.iterations,
                "evaluations": r.evaluations,
                "stopped_on_stall": r.stopped_on_stall,
                "history": r.history,
            }))
        }
        Cmd::Bench {
            sizes,
            instances,
            runs,
            out,
        } => {
            let mut cfg: BenchConfig = match cfg_path {
                None => BenchConfig::default(),
                Some(p) => {
                    let v: Value =
                        serde_json::from_str(&read_text(p)?).map_err(CliError::validation)?;
                    let v = v.get("bench").cloned().unwrap_or(v);
                    serde_json::from_value(v)
                        .map_err(|e| CliError::Validation(format!("bench config: {e}")))?
                }
            };
            if let Some(s) = sizes {
                cfg.sizes = s
                    .split(',')
                    .map(|t| {
                        t.trim()
                            .parse()
                            .map_err(|_| CliError::Validation(format!("bad size {t:?}")))
                    })
                    .collect::<Result<_>>()?;
            }
            cfg.instances_per_size = instances.unwrap_or(cfg.instances_per_size);
            cfg.runs_per_instance = runs.unwrap_or(cfg.runs_per_instance);
            cfg.seed = cli.seed.unwrap_or(cfg.seed);
            let table = bench_run(&cfg)?;
            let dir = out.unwrap_or_else(|| PathBuf::from("bench-out"));
            table.write_all(&dir)?;
            Ok(json!({ "written": dir, "rows": table.rows }))
        }
        Cmd::Fit { table } => {
            let text = read_text(&table)?;
            let rows: Vec<BenchRow> = if table.extension().is_some_and(|e| e == "json") {
                match serde_json::from_str::<BenchTable>(&text) {
                    Ok(t) => t.rows,
                    Err(_) => serde_json::from_str(&text).map_err(CliError::validation)?,
                }
            } else {
                BenchTable::rows_from_csv(&text)?
            };
            Ok(json!(scaling_fit(&rows)?))
        }
    }
}

fn run_qa(cmd: QaCmd, cfg_path: Option<&Path>) -> Result<Value> {
    let st = Settings::load(cfg_path, "qa")?;
    match cmd {
        QaCmd::Spectrum {
            model,
            delta,
            grid,
            k,
            csv,
        } => {
            let ch = ControlHamiltonian::new(
                problem(&model)?.to_ising(),
                st.get("delta", delta, 1.0)?,
                1.0,
            )
            .map_err(CliError::validation)?;
            let k = st.get("k", k, 2)?;
            let scan = spectrum_scan(&ch, st.get("grid", grid, 101)?, k, EigenMethod::Auto)
                .map_err(CliError::validation)?;
            if let Some(path) = csv {
                let mut w = csv::Writer::from_writer(Vec::new());
                let mut header = vec!["s".to_string()];
                header.extend((0..k).map(|i| format!("lambda{i}")));
                header.extend(["gap", "tau", "V"].map(String::from));
                w.write_record(&header).map_err(CliError::solver)?;
                for p in &scan.points {
                    let mut rec = vec![p.s];
                    rec.extend(&p.eigenvalues);
                    rec.extend([p.gap, p.tau, p.v]);
                    w.write_record(rec.iter().map(|v| v.to_string()))
                        .map_err(CliError::solver)?;
                }
                write_text(
                    &path,
                    &String::from_utf8(w.into_inner().map_err(CliError::solver)?)
                        .map_err(CliError::solver)?,
                )?;
            }
            Ok(json!({
                "g_min": scan.g_min,
                "s_star": scan.s_star,
                "tau_max": scan.tau_max,
                "tau_s": scan.points[scan.tau_index].s,
            }))
        }
        QaCmd::Evolve {
            model,
            delta,
            total_time,
            samples,
            csv,
        } => {
            let ch = ControlHamiltonian::new(
                problem(&model)?.to_ising(),
                st.get("delta", delta, 1.0)?,
                st.get("T", total_time, 10.0)?,
            )
            .map_err(CliError::validation)?;
            let opts = EvolveOptions {
                samples: st.get("samples", samples, 101)?,
                ..EvolveOptions::default()
            };
            let r = evolve(&ch, &opts).map_err(CliError::solver)?;
            if let Some(path) = csv {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(["t", "norm", "mean_E", "var_E", "success"])
                    .map_err(CliError::solver)?;
                for p in &r.trajectory {
                    w.write_record(
                        [p.t, p.norm, p.mean_energy, p.var_energy, p.success]
                            .map(|v| v.to_string()),
                    )
                    .map_err(CliError::solver)?;
                }
                write_text(
                    &path,
                    &String::from_utf8(w.into_inner().map_err(CliError::solver)?)
                        .map_err(CliError::solver)?,
                )?;
            }
            Ok(
                json!({ "success_probability": r.success_probability, "steps": r.steps, "rejected_steps": r.rejected_steps }),
            )
        }
    }
}

fn run_ml(cmd: MlCmd, cfg_path: Option<&Path>, seed: Option<u64>) -> Result<Value> {
    let st = Settings::load(cfg_path, "ml")?;
    let seed = st.get("seed", seed, 0)?;
    match cmd {
        MlCmd::Qboost { data, lambda } => {
            let rows = csv_rows(&data)?;
            if rows.is_empty() || rows[0].len() < 2 {
                return Err(CliError::Validation(
                    "need rows of features followed by a label".into(),
                ));
            }
            let f = rows[0].len() - 1;
            let x: Vec<Vec<f64>> = rows.iter().map(|r| r[..f].to_vec()).collect();
            let y: Vec<i8> = rows
                .iter()
                .map(|r| if r[f] > 0.0 { 1 } else { -1 })
                .collect();
            let stumps: Vec<Stump> = (0..f)
                .flat_map(|k| {
                    let mut col: Vec<f64> = x.iter().map(|r| r[k]).collect();
                    col.sort_by(f64::total_cmp);
                    let threshold = col[col.len() / 2];
                    [1, -1].map(|polarity| Stump {
                        feature: k,
                        threshold,
                        polarity,
                    })
                })
                .collect();
            let w = WeakClassifierMatrix::from_stumps(&x, &y, &stumps).map_err(compile_err)?;
            let q = qboost_compile(&w, st.get("lambda", lambda, 0.1)?).map_err(compile_err)?;
            let (a, _) = minimize(&q, "auto", seed, None, None)?;
            let z = a.bits();
            let selected: Vec<&Stump> = stumps
                .iter()
                .zip(&z)
                .filter(|(_, &b)| b == 1)
                .map(|(s, _)| s)
                .collect();
            let single = (0..stumps.len())
                .map(|i| {
                    let mut e = vec![0u8; stumps.len()];
                    e[i] = 1;
                    w.accuracy(&e)
                })
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(compile_err)?;
            Ok(json!({
                "selected": selected,
                "accuracy": w.accuracy(&z).map_err(compile_err)?,
                "best_single_accuracy": single.into_iter().fold(0.0, f64::max),
            }))
        }
        MlCmd::Qcut { points, k, metric } => {
            let p = point_set(&points, &st.get("metric", metric, "euclidean".into())?)?;
            let k = st.get("k", k, 2)?;
            let q = qcut_compile(&p, k, None).map_err(compile_err)?;
            let (a, _) = minimize(&q, "auto", seed, None, None)?;
            let labels =
                qcut_decode(p.len(), k, &a.bits()).map_err(|e| CliError::Solver(e.to_string()))?;
            Ok(json!({ "labels": labels, "cut": cut_value(&p, &labels) }))
        }
        MlCmd::Qims {
            points,
            epsilon,
            mu,
            lambda,
            capacity,
        } => {
            let p = point_set(&points, "max_coordinate")?;
            let params = QimsParams::new(
                st.get("epsilon", epsilon, 0.5)?,
                st.get("mu", mu, 1.0)?,
                st.get("lambda", lambda, 0.5)?,
            )
            .map_err(compile_err)?;
            let centers = match st.get("capacity", capacity.map(Some), None)? {
                Some(cap) => {
                    let out = qims_batch(&p, &params, cap, |q: &forge_core::QuboModel| {
                        minimize(q, "auto", seed, None, None)
                            .map(|r| r.0)
                            .map_err(|e| forge_core::ForgeError::InvalidParameter(e.to_string()))
                    })
                    .map_err(compile_err)?;
                    if !out.complete {
                        return Err(CliError::Solver(
                            out.error.unwrap_or_else(|| "batch stream stopped".into()),
                        ));
                    }
                    out.centers
                }
                None => {
                    let q = qims_compile(&p, &params).map_err(compile_err)?;
                    let (a, _) = minimize(&q, "auto", seed, None, None)?;
                    let all: Vec<usize> = (0..p.len()).collect();
                    selected_centers(&all, &a.to_form(Form::Bit))
                }
            };
            Ok(json!({ "centers": centers }))
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(v) => {
            println!("{}", serde_json::to_string_pretty(&v).expect("json output"));
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
