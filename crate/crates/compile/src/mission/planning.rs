//! Propositional STRIPS planning with a fixed horizon.
//!
//! Variables: `x(t, i)` for propositions at times `0..=L`, then `y(t, j)` for
//! operators executed between `t - 1` and `t`, `t = 1..=L`. The cost sums
//! boundary, precondition, effect, conflict and frame penalties (the hard
//! part, zero exactly on valid plans) and a weak `-eps` persistence reward.
//!
//! The frame penalty for proposition `i` at step `t`, with `a = x(t-1, i)`,
//! `b = x(t, i)` and the adders `A` and deleters `D` of `i`, is
//! `b - ab + sum_A (a - b) y + 2 sum_{A pairs} y y'` plus
//! `a - ab + sum_D (b - a) y + 2 sum_{D pairs} y y'`. It forbids a change
//! with no operator responsible for it, and two operators making the same
//! change at once.

use std::collections::BTreeMap;

use forge_core::{Assignment, QuboBuilder, QuboModel};
use serde::{Deserialize, Serialize};

use crate::error::{CompileError, Result};
use crate::reduce::FixedVariables;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Operator {
    pub name: String,
    pub pre_pos: Vec<usize>,
    pub pre_neg: Vec<usize>,
    pub add: Vec<usize>,
    pub del: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanningProblem {
    pub propositions: Vec<String>,
    pub operators: Vec<Operator>,
    /// Truth value of every proposition at `t = 0`.
    pub initial: Vec<bool>,
    pub goal_pos: Vec<usize>,
    pub goal_neg: Vec<usize>,
}

/// Name-based form used for JSON input. Propositions not listed in
/// `initial` start false.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StripsSpec {
    pub propositions: Vec<String>,
    pub operators: Vec<StripsOperator>,
    pub initial: Vec<String>,
    #[serde(default)]
    pub goal_pos: Vec<String>,
    #[serde(default)]
    pub goal_neg: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StripsOperator {
    pub name: String,
    #[serde(default)]
    pub pre_pos: Vec<String>,
    #[serde(default)]
    pub pre_neg: Vec<String>,
    #[serde(default)]
    pub add: Vec<String>,
    #[serde(default)]
    pub del: Vec<String>,
}

fn disjoint(a: &[usize], b: &[usize]) -> bool {
    a.iter().all(|x| !b.contains(x))
}

impl PlanningProblem {
    pub fn num_propositions(&self) -> usize {
        self.propositions.len()
    }

    pub fn num_operators(&self) -> usize {
        self.operators.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.propositions.len();
        if self.initial.len() != n {
            return Err(CompileError::InvalidInput(format!(
                "initial state has {} values for {n} propositions",
                self.initial.len()
            )));
        }
        let in_range = |v: &[usize]| v.iter().all(|&i| i < n);
        for op in &self.operators {
            if ![&op.pre_pos, &op.pre_neg, &op.add, &op.del]
                .iter()
                .all(|v| in_range(v))
            {
                return Err(CompileError::InvalidInput(format!(
                    "operator {} refers to an unknown proposition",
                    op.name
                )));
            }
            if !disjoint(&op.pre_pos, &op.pre_neg) {
                return Err(CompileError::InvalidInput(format!(
                    "operator {} has contradictory preconditions",
                    op.name
                )));
            }
            if !disjoint(&op.add, &op.del) {
                return Err(CompileError::InvalidInput(format!(
                    "operator {} adds and deletes the same proposition",
                    op.name
                )));
            }
        }
        if !in_range(&self.goal_pos) || !in_range(&self.goal_neg) {
            return Err(CompileError::InvalidInput(
                "goal refers to an unknown proposition".into(),
            ));
        }
        if !disjoint(&self.goal_pos, &self.goal_neg) {
            return Err(CompileError::InvalidInput("goal is contradictory".into()));
        }
        Ok(())
    }

    pub fn from_spec(spec: &StripsSpec) -> Result<Self> {
        let mut index = BTreeMap::new();
        for (i, p) in spec.propositions.iter().enumerate() {
            if index.insert(p.as_str(), i).is_some() {
                return Err(CompileError::InvalidInput(format!(
                    "duplicate proposition {p}"
                )));
            }
        }
        let look = |names: &[String]| -> Result<Vec<usize>> {
            let mut v = Vec::with_capacity(names.len());
            for s in names {
                let i = *index.get(s.as_str()).ok_or_else(|| {
                    CompileError::InvalidInput(format!("unknown proposition {s}"))
                })?;
                if v.contains(&i) {
                    return Err(CompileError::InvalidInput(format!("{s} listed twice")));
                }
                v.push(i);
            }
            Ok(v)
        };
        let mut initial = vec![false; spec.propositions.len()];
        for i in look(&spec.initial)? {
            initial[i] = true;
        }
        let operators = spec
            .operators
            .iter()
            .map(|o| {
                Ok(Operator {
                    name: o.name.clone(),
                    pre_pos: look(&o.pre_pos)?,
                    pre_neg: look(&o.pre_neg)?,
                    add: look(&o.add)?,
                    del: look(&o.del)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let p = Self {
            propositions: spec.propositions.clone(),
            operators,
            initial,
            goal_pos: look(&spec.goal_pos)?,
            goal_neg: look(&spec.goal_neg)?,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Self::from_spec(&serde_json::from_str(s)?)
    }

    fn adders(&self, i: usize) -> Vec<usize> {
        (0..self.operators.len())
            .filter(|&j| self.operators[j].add.contains(&i))
            .collect()
    }

    fn deleters(&self, i: usize) -> Vec<usize> {
        (0..self.operators.len())
            .filter(|&j| self.operators[j].del.contains(&i))
            .collect()
    }

    /// `(j, j', i)` with `j != j'` and `i` in `C+_j ∩ E-_j'` or `C-_j ∩ E+_j'`.
    pub fn conflicts(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for (j, a) in self.operators.iter().enumerate() {
            for (k, b) in self.operators.iter().enumerate() {
                if j == k {
                    continue;
                }
                for &i in &a.pre_pos {
                    if b.del.contains(&i) {
                        out.push((j, k, i));
                    }
                }
                for &i in &a.pre_neg {
                    if b.add.contains(&i) {
                        out.push((j, k, i));
                    }
                }
            }
        }
        out
    }
}

/// Variable indices of a compiled plan of horizon `L`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanLayout {
    pub propositions: usize,
    pub operators: usize,
    pub horizon: usize,
}

impl PlanLayout {
    pub fn new(p: &PlanningProblem, horizon: usize) -> Self {
        Self {
            propositions: p.num_propositions(),
            operators: p.num_operators(),
            horizon,
        }
    }

    pub fn x(&self, t: usize, i: usize) -> usize {
        t * self.propositions + i
    }

    /// `t` from 1.
    pub fn y(&self, t: usize, j: usize) -> usize {
        (self.horizon + 1) * self.propositions + (t - 1) * self.operators + j
    }

    pub fn num_vars(&self) -> usize {
        (self.horizon + 1) * self.propositions + self.horizon * self.operators
    }
}

pub fn default_epsilon(p: &PlanningProblem, horizon: usize) -> f64 {
    1.0 / (4.0 * (p.num_propositions().max(1) * horizon.max(1)) as f64)
}

fn check_horizon(p: &PlanningProblem, horizon: usize) -> Result<()> {
    p.validate()?;
    if horizon == 0 {
        return Err(CompileError::InvalidParameter(
            "horizon must be at least 1".into(),
        ));
    }
    Ok(())
}

/// Hard terms only.
pub fn plan_hard_compile(p: &PlanningProblem, horizon: usize) -> Result<QuboModel> {
    check_horizon(p, horizon)?;
    let lay = PlanLayout::new(p, horizon);
    let (n, l) = (lay.propositions, horizon);
    let mut q = QuboBuilder::new(lay.num_vars());

    for i in 0..n {
        if p.initial[i] {
            q.add_offset(1.0).add_linear(lay.x(0, i), -1.0);
        } else {
            q.add_linear(lay.x(0, i), 1.0);
        }
    }
    for &i in &p.goal_pos {
        q.add_offset(1.0).add_linear(lay.x(l, i), -1.0);
    }
    for &i in &p.goal_neg {
        q.add_linear(lay.x(l, i), 1.0);
    }

    let conflicts = p.conflicts();
    let adders: Vec<Vec<usize>> = (0..n).map(|i| p.adders(i)).collect();
    let deleters: Vec<Vec<usize>> = (0..n).map(|i| p.deleters(i)).collect();
    for t in 1..=l {
        for (j, op) in p.operators.iter().enumerate() {
            let y = lay.y(t, j);
            for &i in &op.pre_pos {
                q.add_linear(y, 1.0).add_quadratic(y, lay.x(t - 1, i), -1.0);
            }
            for &i in &op.pre_neg {
                q.add_quadratic(y, lay.x(t - 1, i), 1.0);
            }
            for &i in &op.add {
                q.add_linear(y, 1.0).add_quadratic(y, lay.x(t, i), -1.0);
            }
            for &i in &op.del {
                q.add_quadratic(y, lay.x(t, i), 1.0);
            }
        }
        for &(j, k, _) in &conflicts {
            q.add_quadratic(lay.y(t, j), lay.y(t, k), 1.0);
        }
        for i in 0..n {
            let (a, b) = (lay.x(t - 1, i), lay.x(t, i));
            q.add_linear(b, 1.0).add_quadratic(a, b, -1.0);
            for &j in &adders[i] {
                q.add_quadratic(a, lay.y(t, j), 1.0)
                    .add_quadratic(b, lay.y(t, j), -1.0);
            }
            q.add_linear(a, 1.0).add_quadratic(a, b, -1.0);
            for &j in &deleters[i] {
                q.add_quadratic(b, lay.y(t, j), 1.0)
                    .add_quadratic(a, lay.y(t, j), -1.0);
            }
            for group in [&adders[i], &deleters[i]] {
                for (u, &j) in group.iter().enumerate() {
                    for &k in &group[u + 1..] {
                        q.add_quadratic(lay.y(t, j), lay.y(t, k), 2.0);
                    }
                }
            }
        }
    }
    Ok(q.try_build()?)
}

/// Full cost with persistence weight `epsilon` (default [`default_epsilon`]).
pub fn plan_compile(
    p: &PlanningProblem,
    horizon: usize,
    epsilon: Option<f64>,
) -> Result<QuboModel> {
    let eps = epsilon.unwrap_or_else(|| default_epsilon(p, horizon));
    let bound = 1.0 / (p.num_propositions().max(1) * horizon.max(1)) as f64;
    if !(eps > 0.0 && eps < bound) {
        return Err(CompileError::InvalidParameter(format!(
            "epsilon must lie in (0, {bound}), got {eps}"
        )));
    }
    let mut q = plan_hard_compile(p, horizon)?.to_builder();
    let lay = PlanLayout::new(p, horizon);
    for t in 1..=horizon {
        for i in 0..lay.propositions {
            // -eps (1 - 2a)(1 - 2b)
            let (a, b) = (lay.x(t - 1, i), lay.x(t, i));
            q.add_offset(-eps)
                .add_linear(a, 2.0 * eps)
                .add_linear(b, 2.0 * eps)
                .add_quadratic(a, b, -4.0 * eps);
        }
    }
    Ok(q.try_build()?)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PlanEnergy {
    pub boundary: f64,
    pub conditions: f64,
    pub effects: f64,
    pub conflicts: f64,
    pub frame: f64,
    pub no_op: f64,
}

impl PlanEnergy {
    pub fn hard(&self) -> f64 {
        self.boundary + self.conditions + self.effects + self.conflicts + self.frame
    }

    pub fn total(&self) -> f64 {
        self.hard() + self.no_op
    }
}

/// Each cost term evaluated directly on `bits`.
pub fn plan_energy(
    p: &PlanningProblem,
    horizon: usize,
    epsilon: f64,
    bits: &[u8],
) -> Result<PlanEnergy> {
    check_horizon(p, horizon)?;
    let lay = PlanLayout::new(p, horizon);
    if bits.len() != lay.num_vars() {
        return Err(CompileError::InvalidInput(format!(
            "{} bits, layout has {}",
            bits.len(),
            lay.num_vars()
        )));
    }
    let x = |t: usize, i: usize| bits[lay.x(t, i)] as f64;
    let y = |t: usize, j: usize| bits[lay.y(t, j)] as f64;
    let mut e = PlanEnergy::default();
    for i in 0..lay.propositions {
        e.boundary += if p.initial[i] { 1.0 - x(0, i) } else { x(0, i) };
    }
    e.boundary += p.goal_pos.iter().map(|&i| 1.0 - x(horizon, i)).sum::<f64>();
    e.boundary += p.goal_neg.iter().map(|&i| x(horizon, i)).sum::<f64>();
    let conflicts = p.conflicts();
    for t in 1..=horizon {
        for (j, op) in p.operators.iter().enumerate() {
            e.conditions += op
                .pre_pos
                .iter()
                .map(|&i| (1.0 - x(t - 1, i)) * y(t, j))
                .sum::<f64>();
            e.conditions += op
                .pre_neg
                .iter()
                .map(|&i| x(t - 1, i) * y(t, j))
                .sum::<f64>();
            e.effects += op
                .add
                .iter()
                .map(|&i| y(t, j) * (1.0 - x(t, i)))
                .sum::<f64>();
            e.effects += op.del.iter().map(|&i| y(t, j) * x(t, i)).sum::<f64>();
        }
        e.conflicts += conflicts
            .iter()
            .map(|&(j, k, _)| y(t, j) * y(t, k))
            .sum::<f64>();
        for i in 0..lay.propositions {
            let (a, b) = (x(t - 1, i), x(t, i));
            let k: f64 = p.adders(i).iter().map(|&j| y(t, j)).sum();
            let m: f64 = p.deleters(i).iter().map(|&j| y(t, j)).sum();
            e.frame += (1.0 - a) * (b - k) + k * (1.0 - b) + k * (k - 1.0);
            e.frame += a * ((1.0 - b) - m) + m * b + m * (m - 1.0);
            e.no_op -= epsilon * (1.0 - 2.0 * a) * (1.0 - 2.0 * b);
        }
    }
    Ok(e)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum PlanViolation {
    InitialState {
        i: usize,
    },
    Goal {
        i: usize,
    },
    Precondition {
        t: usize,
        j: usize,
        i: usize,
    },
    EffectNotApplied {
        t: usize,
        j: usize,
        i: usize,
    },
    ContradictoryEffects {
        t: usize,
        i: usize,
    },
    RedundantEffect {
        t: usize,
        i: usize,
    },
    Conflict {
        t: usize,
        j: usize,
        k: usize,
        i: usize,
    },
    StateMismatch {
        t: usize,
        i: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanReport {
    /// Operators executed at each step `1..=L`.
    pub steps: Vec<Vec<usize>>,
    pub states: Vec<Vec<bool>>,
    pub violations: Vec<PlanViolation>,
}

impl PlanReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn operator_names(&self, p: &PlanningProblem) -> Vec<Vec<String>> {
        self.steps
            .iter()
            .map(|s| s.iter().map(|&j| p.operators[j].name.clone()).collect())
            .collect()
    }
}

/// Decodes the trajectory and checks it by simulation. Violations are
/// reported, never raised.
pub fn plan_decode_validate(
    p: &PlanningProblem,
    horizon: usize,
    a: &Assignment,
) -> Result<PlanReport> {
    check_horizon(p, horizon)?;
    let lay = PlanLayout::new(p, horizon);
    if a.len() != lay.num_vars() {
        return Err(CompileError::InvalidInput(format!(
            "{} values, layout has {}",
            a.len(),
            lay.num_vars()
        )));
    }
    let bits = a.bits();
    let n = lay.propositions;
    let states: Vec<Vec<bool>> = (0..=horizon)
        .map(|t| (0..n).map(|i| bits[lay.x(t, i)] == 1).collect())
        .collect();
    let steps: Vec<Vec<usize>> = (1..=horizon)
        .map(|t| {
            (0..lay.operators)
                .filter(|&j| bits[lay.y(t, j)] == 1)
                .collect()
        })
        .collect();
    let mut v = Vec::new();

    for i in 0..n {
        if states[0][i] != p.initial[i] {
            v.push(PlanViolation::InitialState { i });
        }
    }
    for &i in &p.goal_pos {
        if !states[horizon][i] {
            v.push(PlanViolation::Goal { i });
        }
    }
    for &i in &p.goal_neg {
        if states[horizon][i] {
            v.push(PlanViolation::Goal { i });
        }
    }
    let conflicts = p.conflicts();
    for t in 1..=horizon {
        let (prev, next) = (&states[t - 1], &states[t]);
        let ops = &steps[t - 1];
        for &j in ops {
            let op = &p.operators[j];
            for &i in &op.pre_pos {
                if !prev[i] {
                    v.push(PlanViolation::Precondition { t, j, i });
                }
            }
            for &i in &op.pre_neg {
                if prev[i] {
                    v.push(PlanViolation::Precondition { t, j, i });
                }
            }
            for &i in &op.add {
                if !next[i] {
                    v.push(PlanViolation::EffectNotApplied { t, j, i });
                }
            }
            for &i in &op.del {
                if next[i] {
                    v.push(PlanViolation::EffectNotApplied { t, j, i });
                }
            }
        }
        for &(j, k, i) in &conflicts {
            if ops.contains(&j) && ops.contains(&k) {
                v.push(PlanViolation::Conflict { t, j, k, i });
            }
        }
        for i in 0..n {
            let adds = ops
                .iter()
                .filter(|&&j| p.operators[j].add.contains(&i))
                .count();
            let dels = ops
                .iter()
                .filter(|&&j| p.operators[j].del.contains(&i))
                .count();
            if adds > 0 && dels > 0 {
                v.push(PlanViolation::ContradictoryEffects { t, i });
                continue;
            }
            if adds > 1 || dels > 1 {
                v.push(PlanViolation::RedundantEffect { t, i });
            }
            let expect = if adds > 0 {
                true
            } else if dels > 0 {
                false
            } else {
                prev[i]
            };
            if next[i] != expect {
                v.push(PlanViolation::StateMismatch { t, i });
            }
        }
    }
    Ok(PlanReport {
        steps,
        states,
        violations: v,
    })
}

/// Layout values shared by every zero-hard-energy assignment, derived by
/// forward and backward propagation from the boundary conditions.
pub fn constant_propagation(p: &PlanningProblem, horizon: usize) -> Result<FixedVariables> {
    check_horizon(p, horizon)?;
    let lay = PlanLayout::new(p, horizon);
    let n = lay.propositions;
    let mut f = FixedVariables::new(lay.num_vars());
    for i in 0..n {
        f.fix(lay.x(0, i), p.initial[i] as u8)?;
    }
    for &i in &p.goal_pos {
        f.fix(lay.x(horizon, i), 1)?;
    }
    for &i in &p.goal_neg {
        f.fix(lay.x(horizon, i), 0)?;
    }
    let adders: Vec<Vec<usize>> = (0..n).map(|i| p.adders(i)).collect();
    let deleters: Vec<Vec<usize>> = (0..n).map(|i| p.deleters(i)).collect();
    let conflicts = p.conflicts();

    loop {
        let mut changed = false;
        for t in 1..=horizon {
            let idle = |f: &FixedVariables, ops: &[usize]| {
                ops.iter().all(|&j| f.get(lay.y(t, j)) == Some(0))
            };
            let live = |f: &FixedVariables, ops: &[usize]| -> Vec<usize> {
                ops.iter()
                    .copied()
                    .filter(|&j| f.get(lay.y(t, j)) != Some(0))
                    .collect()
            };
            for (j, op) in p.operators.iter().enumerate() {
                let y = lay.y(t, j);
                let blocked = op
                    .pre_pos
                    .iter()
                    .any(|&i| f.get(lay.x(t - 1, i)) == Some(0))
                    || op
                        .pre_neg
                        .iter()
                        .any(|&i| f.get(lay.x(t - 1, i)) == Some(1))
                    || op.add.iter().any(|&i| f.get(lay.x(t, i)) == Some(0))
                    || op.del.iter().any(|&i| f.get(lay.x(t, i)) == Some(1));
                if blocked {
                    changed |= f.fix(y, 0)?;
                }
                if f.get(y) == Some(1) {
                    for &i in &op.pre_pos {
                        changed |= f.fix(lay.x(t - 1, i), 1)?;
                    }
                    for &i in &op.pre_neg {
                        changed |= f.fix(lay.x(t - 1, i), 0)?;
                    }
                    for &i in &op.add {
                        changed |= f.fix(lay.x(t, i), 1)?;
                    }
                    for &i in &op.del {
                        changed |= f.fix(lay.x(t, i), 0)?;
                    }
                    for &(a, b, _) in &conflicts {
                        if a == j {
                            changed |= f.fix(lay.y(t, b), 0)?;
                        } else if b == j {
                            changed |= f.fix(lay.y(t, a), 0)?;
                        }
                    }
                }
            }
            for i in 0..n {
                let (a, b) = (lay.x(t - 1, i), lay.x(t, i));
                // nothing can change i: the value carries across the step
                if idle(&f, &adders[i]) && idle(&f, &deleters[i]) {
                    if let Some(v) = f.get(a) {
                        changed |= f.fix(b, v)?;
                    }
                    if let Some(v) = f.get(b) {
                        changed |= f.fix(a, v)?;
                    }
                }
                // a rise needs an adder, a fall a deleter; with no candidate the
                // change is impossible, with one it is forced
                let need = match (f.get(a), f.get(b)) {
                    (Some(0), Some(1)) => Some(live(&f, &adders[i])),
                    (Some(1), Some(0)) => Some(live(&f, &deleters[i])),
                    _ => None,
                };
                match need.as_deref() {
                    Some([]) => {
                        return Err(CompileError::Unsatisfiable(format!(
                            "{} must change at step {t} but no operator can change it",
                            p.propositions[i]
                        )))
                    }
                    Some(&[j]) => changed |= f.fix(lay.y(t, j), 1)?,
                    _ => {}
                }
                if f.get(a) == Some(0) && idle(&f, &adders[i]) {
                    changed |= f.fix(b, 0)?;
                }
                if f.get(a) == Some(1) && idle(&f, &deleters[i]) {
                    changed |= f.fix(b, 1)?;
                }
                if f.get(b) == Some(1) && idle(&f, &adders[i]) {
                    changed |= f.fix(a, 1)?;
                }
                if f.get(b) == Some(0) && idle(&f, &deleters[i]) {
                    changed |= f.fix(a, 0)?;
                }
            }
        }
        if !changed {
            return Ok(f);
        }
    }
}

/// Full cost restricted to the variables left free by propagation.
pub fn plan_compile_reduced(
    p: &PlanningProblem,
    horizon: usize,
    epsilon: Option<f64>,
) -> Result<(QuboModel, FixedVariables)> {
    let fixed = constant_propagation(p, horizon)?;
    let q = plan_compile(p, horizon, epsilon)?;
    Ok((fixed.reduce(&q)?, fixed))
}

pub fn plan_hard_compile_reduced(
    p: &PlanningProblem,
    horizon: usize,
) -> Result<(QuboModel, FixedVariables)> {
    let fixed = constant_propagation(p, horizon)?;
    let q = plan_hard_compile(p, horizon)?;
    Ok((fixed.reduce(&q)?, fixed))
}

/// Two packages and a rocket with one load of fuel, starting at `L`. Both
/// packages must reach `P`.
pub fn rocket_problem() -> PlanningProblem {
    let props = [
        "at(A,L)", "at(A,P)", "at(B,L)", "at(B,P)", "at(R,L)", "at(R,P)", "in(A,R)", "in(B,R)",
        "fuel(R)",
    ];
    let ix = |s: &str| props.iter().position(|&p| p == s).unwrap();
    let mut ops = Vec::new();
    for x in ["A", "B"] {
        for loc in ["L", "P"] {
            let at_x = ix(&format!("at({x},{loc})"));
            let at_r = ix(&format!("at(R,{loc})"));
            let inside = ix(&format!("in({x},R)"));
            ops.push(Operator {
                name: format!("load({x},{loc})"),
                pre_pos: vec![at_x, at_r],
                pre_neg: vec![],
                add: vec![inside],
                del: vec![at_x],
            });
            ops.push(Operator {
                name: format!("unload({x},{loc})"),
                pre_pos: vec![inside, at_r],
                pre_neg: vec![],
                add: vec![at_x],
                del: vec![inside],
            });
        }
    }
    for (from, to) in [("L", "P"), ("P", "L")] {
        let (a, b) = (ix(&format!("at(R,{from})")), ix(&format!("at(R,{to})")));
        ops.push(Operator {
            name: format!("move({from},{to})"),
            pre_pos: vec![a, ix("fuel(R)")],
            pre_neg: vec![],
            add: vec![b],
            del: vec![a, ix("fuel(R)")],
        });
    }
    let mut initial = vec![false; props.len()];
    for s in ["at(A,L)", "at(B,L)", "at(R,L)", "fuel(R)"] {
        initial[ix(s)] = true;
    }
    PlanningProblem {
        propositions: props.iter().map(|s| s.to_string()).collect(),
        operators: ops,
        initial,
        goal_pos: vec![ix("at(A,P)"), ix("at(B,P)")],
        goal_neg: vec![],
    }
}
