//! Quadratic gadget for 3-SAT.
//!
//! A clause is violated by exactly one assignment `a` of its three variables.
//! With `d_r = a_r (1 - z_r) + (1 - a_r) z_r` the number of disagreements is
//! `k = sum_r d_r`, and with one ancilla `u` per clause
//! `E = 1 + 5u - (1 + 3u) k + sum_{r != r'} d_r d_r'`.
//! Minimised over `u` this is 1 when `k = 0` and 0 otherwise.

use forge_core::{QuboBuilder, QuboModel};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{CompileError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Clause3 {
    pub vars: [usize; 3],
    /// The one assignment of `vars` that violates the clause.
    pub violating: [u8; 3],
}

impl Clause3 {
    pub fn new(vars: [usize; 3], violating: [u8; 3]) -> Result<Self> {
        let c = Self { vars, violating };
        c.check(usize::MAX)?;
        Ok(c)
    }

    fn check(&self, n: usize) -> Result<()> {
        let [i, j, k] = self.vars;
        if i == j || j == k || i == k {
            return Err(CompileError::InvalidInput(format!(
                "clause repeats a variable: {:?}",
                self.vars
            )));
        }
        if self.vars.iter().any(|&v| v >= n) {
            return Err(CompileError::InvalidInput(format!(
                "clause {:?} outside {n} variables",
                self.vars
            )));
        }
        if self.violating.iter().any(|&b| b > 1) {
            return Err(CompileError::InvalidInput(
                "violating pattern must be bits".into(),
            ));
        }
        Ok(())
    }

    pub fn is_violated(&self, z: &[u8]) -> bool {
        self.vars
            .iter()
            .zip(&self.violating)
            .all(|(&v, &a)| z[v] == a)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sat3Instance {
    pub num_vars: usize,
    pub clauses: Vec<Clause3>,
}

impl Sat3Instance {
    pub fn violated(&self, z: &[u8]) -> usize {
        self.clauses.iter().filter(|c| c.is_violated(z)).count()
    }
}

/// Variables `0..n` are the problem bits; clause `c` owns ancilla `n + c`.
pub fn sat3_compile(clauses: &[Clause3], n: usize) -> Result<QuboModel> {
    for c in clauses {
        c.check(n)?;
    }
    let mut q = QuboBuilder::new(n + clauses.len());
    for (ci, c) in clauses.iter().enumerate() {
        let u = n + ci;
        // d_r = a_r + s_r z_r
        let terms: Vec<(usize, f64, f64)> = c
            .vars
            .iter()
            .zip(&c.violating)
            .map(|(&v, &a)| (v, a as f64, 1.0 - 2.0 * a as f64))
            .collect();
        q.add_offset(1.0).add_linear(u, 5.0);
        for &(v, a, s) in &terms {
            // -(1 + 3u) d_r
            q.add_offset(-a).add_linear(v, -s);
            q.add_linear(u, -3.0 * a).add_quadratic(u, v, -3.0 * s);
        }
        for (r, &(v, a, s)) in terms.iter().enumerate() {
            for &(w, b, t) in &terms[r + 1..] {
                // both orders of d_r d_r'
                q.add_offset(2.0 * a * b);
                q.add_linear(v, 2.0 * s * b).add_linear(w, 2.0 * a * t);
                q.add_quadratic(v, w, 2.0 * s * t);
            }
        }
    }
    Ok(q.try_build()?)
}

/// `M = round(ratio * n)` clauses over three distinct uniform variables with
/// uniform violating patterns.
pub fn sat3_random_instance(n: usize, ratio: f64, seed: u64) -> Result<Sat3Instance> {
    if n < 3 {
        return Err(CompileError::InvalidParameter(format!(
            "need at least 3 variables, got {n}"
        )));
    }
    if !(ratio > 0.0 && ratio.is_finite()) {
        return Err(CompileError::InvalidParameter(format!(
            "clause ratio must be positive, got {ratio}"
        )));
    }
    let m = (ratio * n as f64).round() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let clauses = (0..m)
        .map(|_| {
            let v = sample(&mut rng, n, 3);
            Clause3 {
                vars: [v.index(0), v.index(1), v.index(2)],
                violating: [
                    rng.gen_range(0..2),
                    rng.gen_range(0..2),
                    rng.gen_range(0..2),
                ],
            }
        })
        .collect();
    Ok(Sat3Instance {
        num_vars: n,
        clauses,
    })
}

/// DIMACS CNF with exactly three literals per clause. Literal `v` is violated
/// by `z_v = 0` and literal `-v` by `z_v = 1`.
pub fn parse_dimacs(s: &str) -> Result<Sat3Instance> {
    let mut num_vars = None;
    let mut declared = 0usize;
    let mut lits: Vec<i64> = Vec::new();
    let mut clauses = Vec::new();
    for line in s.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
            continue;
        }
        if let Some(rest) = line.strip_prefix('p') {
            let f: Vec<&str> = rest.split_whitespace().collect();
            if f.len() != 3 || f[0] != "cnf" {
                return Err(CompileError::InvalidInput(format!(
                    "bad problem line: {line}"
                )));
            }
            let bad = |_| CompileError::InvalidInput(format!("bad problem line: {line}"));
            num_vars = Some(f[1].parse::<usize>().map_err(bad)?);
            declared = f[2].parse::<usize>().map_err(bad)?;
            continue;
        }
        let n = num_vars
            .ok_or_else(|| CompileError::InvalidInput("clause before the problem line".into()))?;
        for tok in line.split_whitespace() {
            let l: i64 = tok
                .parse()
                .map_err(|_| CompileError::InvalidInput(format!("bad literal {tok}")))?;
            if l != 0 {
                if l.unsigned_abs() as usize > n {
                    return Err(CompileError::InvalidInput(format!(
                        "literal {l} exceeds {n} variables"
                    )));
                }
                lits.push(l);
                continue;
            }
            if lits.len() != 3 {
                return Err(CompileError::Arity {
                    kind: "clause",
                    expected: "3".into(),
                    got: lits.len(),
                });
            }
            let vars = [0, 1, 2].map(|r| lits[r].unsigned_abs() as usize - 1);
            let violating = [0, 1, 2].map(|r| (lits[r] < 0) as u8);
            let c = Clause3 { vars, violating };
            c.check(n)?;
            clauses.push(c);
            lits.clear();
        }
    }
    if !lits.is_empty() {
        return Err(CompileError::InvalidInput("unterminated clause".into()));
    }
    let num_vars =
        num_vars.ok_or_else(|| CompileError::InvalidInput("missing problem line".into()))?;
    if clauses.len() != declared {
        log::warn!(
            "problem line declares {declared} clauses, found {}",
            clauses.len()
        );
    }
    Ok(Sat3Instance { num_vars, clauses })
}
