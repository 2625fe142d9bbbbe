//! Minimum-weight cut sets of fault trees.
//!
//! Events are `z_0..z_N` with `z_0` the top event. Every gate contributes a
//! penalty that is zero exactly when its output agrees with its inputs. With
//! `A` and `B` large enough the ground state of
//! `A sum_gates H_gate + B (1 - z_0) + sum_{i in basic} w_i z_i`
//! has the top event on, every gate consistent and the cheapest basic set.

use std::sync::OnceLock;

use forge_core::{Assignment, QuadraticModel, QuboBuilder, QuboModel};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{CompileError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GateKind {
    And,
    Or,
    Maj3,
}

impl GateKind {
    pub fn eval(self, xs: &[bool]) -> bool {
        match self {
            GateKind::And => xs.iter().all(|&x| x),
            GateKind::Or => xs.iter().any(|&x| x),
            GateKind::Maj3 => 2 * xs.iter().filter(|&&x| x).count() > xs.len(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GateKind::And => "AND",
            GateKind::Or => "OR",
            GateKind::Maj3 => "MAJ3",
        }
    }

    fn arity(self) -> usize {
        match self {
            GateKind::Maj3 => 3,
            _ => 2,
        }
    }
}

/// Candidate two-input penalty over `(y, x1, x2)`, as commonly printed under
/// the AND label.
pub fn printed_and_form() -> QuboModel {
    let mut b = QuboBuilder::new(3);
    b.add_linear(0, 1.0).add_linear(1, 1.0).add_linear(2, 1.0);
    b.add_quadratic(1, 2, 1.0)
        .add_quadratic(0, 1, -2.0)
        .add_quadratic(0, 2, -2.0);
    b.build()
}

/// Candidate two-input penalty over `(y, x1, x2)`, as commonly printed under
/// the OR label.
pub fn printed_or_form() -> QuboModel {
    let mut b = QuboBuilder::new(3);
    b.add_linear(0, 3.0);
    b.add_quadratic(1, 2, 1.0)
        .add_quadratic(0, 1, -2.0)
        .add_quadratic(0, 2, -2.0);
    b.build()
}

/// `3y - 2y(x1 + x2 + x3) + x1 x2 + x1 x3 + x2 x3` over `(y, x1, x2, x3)`.
pub fn maj3_form() -> QuboModel {
    let mut b = QuboBuilder::new(4);
    b.add_linear(0, 3.0);
    for i in 1..4 {
        b.add_quadratic(0, i, -2.0);
        for j in i + 1..4 {
            b.add_quadratic(i, j, 1.0);
        }
    }
    b.build()
}

/// True when `form` over `(y, x...)` is 0 on every row consistent with
/// `kind` and at least 1 on every other row.
pub fn check_truth_table(kind: GateKind, form: &QuboModel) -> bool {
    let n = form.num_vars();
    (0..1u64 << n).all(|idx| {
        let bits: Vec<u8> = (0..n).map(|k| ((idx >> (n - 1 - k)) & 1) as u8).collect();
        let xs: Vec<bool> = bits[1..].iter().map(|&b| b == 1).collect();
        let e = form.energy_bits(&bits);
        if kind.eval(&xs) == (bits[0] == 1) {
            e == 0.0
        } else {
            e >= 1.0
        }
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateAudit {
    pub kind: GateKind,
    /// Label the installed form is printed under.
    pub source: &'static str,
    pub printed_form_passes: bool,
}

struct Installed {
    and: QuboModel,
    or: QuboModel,
    maj3: QuboModel,
    audit: Vec<GateAudit>,
}

fn installed() -> &'static Installed {
    static CELL: OnceLock<Installed> = OnceLock::new();
    CELL.get_or_init(|| {
        let candidates = [("AND", printed_and_form()), ("OR", printed_or_form())];
        let mut audit = Vec::new();
        let mut pick = |kind: GateKind| -> QuboModel {
            let own = candidates.iter().find(|(l, _)| *l == kind.name()).unwrap();
            let own_passes = check_truth_table(kind, &own.1);
            let (label, form) = candidates
                .iter()
                .find(|(_, f)| check_truth_table(kind, f))
                .expect("one printed two-input form must fit each gate");
            if !own_passes {
                log::warn!(
                    "the form printed for {} fails its truth table; installing the form printed for {label}",
                    kind.name()
                );
            }
            audit.push(GateAudit { kind, source: label, printed_form_passes: own_passes });
            form.clone()
        };
        let and = pick(GateKind::And);
        let or = pick(GateKind::Or);
        let maj3 = maj3_form();
        assert!(check_truth_table(GateKind::Maj3, &maj3));
        audit.push(GateAudit { kind: GateKind::Maj3, source: "MAJ3", printed_form_passes: true });
        Installed { and, or, maj3, audit }
    })
}

/// Which printed form backs each gate kind.
pub fn gate_audit() -> Vec<GateAudit> {
    installed().audit.clone()
}

/// Validated penalty over `(y, x...)` for `kind`.
pub fn installed_form(kind: GateKind) -> QuboModel {
    let i = installed();
    match kind {
        GateKind::And => i.and.clone(),
        GateKind::Or => i.or.clone(),
        GateKind::Maj3 => i.maj3.clone(),
    }
}

/// Adds `weight * H_kind(output, inputs)`.
pub fn add_gate_penalty(
    b: &mut QuboBuilder,
    kind: GateKind,
    output: usize,
    inputs: &[usize],
    weight: f64,
) -> Result<()> {
    if inputs.len() != kind.arity() {
        return Err(CompileError::Arity {
            kind: kind.name(),
            expected: kind.arity().to_string(),
            got: inputs.len(),
        });
    }
    let form = installed_form(kind);
    let mut vars = vec![output];
    vars.extend_from_slice(inputs);
    for (k, &c) in form.linear().iter().enumerate() {
        b.add_linear(vars[k], weight * c);
    }
    for (&(i, j), &c) in form.quadratic() {
        b.add_quadratic(vars[i], vars[j], weight * c);
    }
    b.add_offset(weight * form.offset());
    Ok(())
}

/// The penalty alone, on `max(output, inputs) + 1` variables.
pub fn gate_penalty(kind: GateKind, output: usize, inputs: &[usize]) -> Result<QuboModel> {
    let n = inputs.iter().copied().chain([output]).max().unwrap_or(0) + 1;
    let mut b = QuboBuilder::new(n);
    add_gate_penalty(&mut b, kind, output, inputs, 1.0)?;
    Ok(b.try_build()?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    pub kind: GateKind,
    pub output: usize,
    pub inputs: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasicEvent {
    pub event: usize,
    #[serde(default = "unit")]
    pub weight: f64,
}

fn unit() -> f64 {
    1.0
}

/// Event 0 is the top event. Every event that is not basic is the output of
/// exactly one gate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaultTree {
    pub num_events: usize,
    pub gates: Vec<Gate>,
    pub basic: Vec<BasicEvent>,
}

impl FaultTree {
    pub fn from_json(s: &str) -> Result<Self> {
        let t: Self = serde_json::from_str(s)?;
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.num_events;
        if n < 2 {
            return Err(CompileError::InvalidInput(
                "need a top event and at least one basic event".into(),
            ));
        }
        let mut role = vec![0u8; n];
        for b in &self.basic {
            if b.event == 0 || b.event >= n {
                return Err(CompileError::InvalidInput(format!(
                    "basic event {} out of range",
                    b.event
                )));
            }
            if !(b.weight.is_finite() && b.weight >= 0.0) {
                return Err(CompileError::InvalidInput(format!(
                    "weight of event {} must be non-negative",
                    b.event
                )));
            }
            role[b.event] += 1;
        }
        for g in &self.gates {
            if g.output >= n || g.inputs.iter().any(|&i| i >= n) {
                return Err(CompileError::InvalidInput(
                    "gate refers to an unknown event".into(),
                ));
            }
            match g.kind {
                GateKind::Maj3 if g.inputs.len() != 3 => {
                    return Err(CompileError::Arity {
                        kind: "MAJ3",
                        expected: "3".into(),
                        got: g.inputs.len(),
                    })
                }
                GateKind::And | GateKind::Or if g.inputs.len() < 2 => {
                    return Err(CompileError::Arity {
                        kind: g.kind.name(),
                        expected: ">= 2".into(),
                        got: g.inputs.len(),
                    })
                }
                _ => {}
            }
            let mut ins = g.inputs.clone();
            ins.sort_unstable();
            ins.dedup();
            if ins.len() != g.inputs.len() {
                return Err(CompileError::InvalidInput(format!(
                    "gate for event {} repeats an input",
                    g.output
                )));
            }
            role[g.output] += 1;
        }
        if let Some(e) = role.iter().position(|&r| r != 1) {
            return Err(CompileError::InvalidInput(format!(
                "event {e} must be either basic or the output of exactly one gate"
            )));
        }
        self.topological_order().map(|_| ())
    }

    /// Gate indices with inputs before outputs.
    pub fn topological_order(&self) -> Result<Vec<usize>> {
        let mut by_output = vec![None; self.num_events];
        for (k, g) in self.gates.iter().enumerate() {
            by_output[g.output] = Some(k);
        }
        // 0 unvisited, 1 on stack, 2 done
        let mut state = vec![0u8; self.gates.len()];
        let mut order = Vec::with_capacity(self.gates.len());
        fn visit(
            k: usize,
            t: &FaultTree,
            by_output: &[Option<usize>],
            state: &mut [u8],
            order: &mut Vec<usize>,
        ) -> Result<()> {
            match state[k] {
                2 => return Ok(()),
                1 => return Err(CompileError::Cyclic(t.gates[k].output)),
                _ => {}
            }
            state[k] = 1;
            for &i in &t.gates[k].inputs {
                if let Some(g) = by_output[i] {
                    visit(g, t, by_output, state, order)?;
                }
            }
            state[k] = 2;
            order.push(k);
            Ok(())
        }
        for k in 0..self.gates.len() {
            visit(k, self, &by_output, &mut state, &mut order)?;
        }
        Ok(order)
    }

    /// Event values implied by the set of failed basic events.
    pub fn propagate(&self, failed: &[usize]) -> Result<Vec<bool>> {
        let mut v = vec![false; self.num_events];
        for &e in failed {
            v[e] = true;
        }
        for k in self.topological_order()? {
            let g = &self.gates[k];
            let xs: Vec<bool> = g.inputs.iter().map(|&i| v[i]).collect();
            v[g.output] = g.kind.eval(&xs);
        }
        Ok(v)
    }

    pub fn total_weight(&self) -> f64 {
        self.basic.iter().map(|b| b.weight).sum()
    }

    /// Two-input gate count after cascading wide AND/OR gates.
    pub fn num_gate_terms(&self) -> usize {
        self.gates
            .iter()
            .map(|g| {
                if g.kind == GateKind::Maj3 {
                    1
                } else {
                    g.inputs.len() - 1
                }
            })
            .sum()
    }

    pub fn num_ancillas(&self) -> usize {
        self.gates
            .iter()
            .map(|g| {
                if g.kind == GateKind::Maj3 {
                    0
                } else {
                    g.inputs.len() - 2
                }
            })
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaultTreeModel {
    pub model: QuboModel,
    /// Events occupy `0..num_events`; cascade ancillas follow.
    pub num_events: usize,
    pub a: f64,
    pub b: f64,
}

/// `(A, B) = (3 max(N, sum w) + 1, 3 M A + 1)`.
pub fn default_penalties(t: &FaultTree) -> (f64, f64) {
    let n = (t.num_events - 1) as f64;
    let a = 3.0 * n.max(t.total_weight()) + 1.0;
    (a, 3.0 * t.num_gate_terms() as f64 * a + 1.0)
}

pub fn faulttree_compile(t: &FaultTree, a: Option<f64>, b: Option<f64>) -> Result<FaultTreeModel> {
    t.validate()?;
    let (da, _) = default_penalties(t);
    let a = a.unwrap_or(da);
    let m = t.num_gate_terms() as f64;
    let b = b.unwrap_or(3.0 * m * a + 1.0);
    if !(a > 0.0 && b > 0.0) {
        return Err(CompileError::InvalidParameter(
            "penalties must be positive".into(),
        ));
    }
    let n = (t.num_events - 1) as f64;
    if a <= 3.0 * n.max(t.total_weight()) {
        log::warn!(
            "gate penalty {a} is at or below 3 max(N, sum w); the ground state may break gates"
        );
    }
    if b <= 3.0 * m * a {
        log::warn!(
            "top penalty {b} is at or below 3 M A; the ground state may leave the top event off"
        );
    }
    let mut q = QuboBuilder::new(t.num_events + t.num_ancillas());
    let mut next = t.num_events;
    for g in &t.gates {
        if g.kind == GateKind::Maj3 {
            add_gate_penalty(&mut q, g.kind, g.output, &g.inputs, a)?;
            continue;
        }
        let mut acc = g.inputs[0];
        for (k, &x) in g.inputs[1..].iter().enumerate() {
            let out = if k + 2 == g.inputs.len() {
                g.output
            } else {
                next += 1;
                next - 1
            };
            add_gate_penalty(&mut q, g.kind, out, &[acc, x], a)?;
            acc = out;
        }
    }
    q.add_offset(b).add_linear(0, -b);
    for be in &t.basic {
        q.add_linear(be.event, be.weight);
    }
    Ok(FaultTreeModel {
        model: q.try_build()?,
        num_events: t.num_events,
        a,
        b,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutDecode {
    /// Basic events set in the assignment, ascending.
    pub cut: Vec<usize>,
    pub weight: f64,
    pub top: bool,
    /// The basic set actually triggers the top event.
    pub triggers_top: bool,
}

pub fn decode_cut(t: &FaultTree, a: &Assignment) -> Result<CutDecode> {
    if a.len() < t.num_events {
        return Err(CompileError::InvalidInput(format!(
            "{} values for {} events",
            a.len(),
            t.num_events
        )));
    }
    let bits = a.bits();
    let mut cut: Vec<usize> = t
        .basic
        .iter()
        .filter(|b| bits[b.event] == 1)
        .map(|b| b.event)
        .collect();
    cut.sort_unstable();
    let weight = t
        .basic
        .iter()
        .filter(|b| bits[b.event] == 1)
        .map(|b| b.weight)
        .sum();
    let triggers_top = t.propagate(&cut)?[0];
    Ok(CutDecode {
        cut,
        weight,
        top: bits[0] == 1,
        triggers_top,
    })
}

/// Random DAG with `num_basic` basic events (ids `1..=num_basic`) and
/// `num_gates` gates, the last of which drives the top event. Intermediate
/// events may feed several gates. Weights are 1, 2 or 3.
pub fn random_fault_tree(num_basic: usize, num_gates: usize, seed: u64) -> Result<FaultTree> {
    if num_basic < 2 || num_gates == 0 {
        return Err(CompileError::InvalidParameter(
            "need at least two basic events and one gate".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pool: Vec<usize> = (1..=num_basic).collect();
    let mut gates = Vec::with_capacity(num_gates);
    let mut next = num_basic + 1;
    for g in 0..num_gates {
        let max_arity = pool.len().min(4);
        let arity = rng.gen_range(2..=max_arity);
        let kind = match (arity, rng.gen_range(0..3)) {
            (3, 2) => GateKind::Maj3,
            (_, 0) => GateKind::And,
            (_, 1) => GateKind::Or,
            _ => {
                if rng.gen_bool(0.5) {
                    GateKind::And
                } else {
                    GateKind::Or
                }
            }
        };
        // favour recent events so the graph gets depth
        let mut inputs: Vec<usize> = Vec::with_capacity(arity);
        if pool.len() > num_basic {
            inputs.push(*pool.last().unwrap());
        }
        let rest: Vec<usize> = pool
            .iter()
            .copied()
            .filter(|e| !inputs.contains(e))
            .collect();
        for k in sample(&mut rng, rest.len(), arity - inputs.len()) {
            inputs.push(rest[k]);
        }
        let output = if g + 1 == num_gates { 0 } else { next };
        if output != 0 {
            next += 1;
            pool.push(output);
        }
        gates.push(Gate {
            kind,
            output,
            inputs,
        });
    }
    let basic = (1..=num_basic)
        .map(|e| BasicEvent {
            event: e,
            weight: rng.gen_range(1..=3) as f64,
        })
        .collect();
    let t = FaultTree {
        num_events: next,
        gates,
        basic,
    };
    t.validate()?;
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use forge_core::solvers::brute_force;

    fn single(kind: GateKind) -> FaultTree {
        FaultTree {
            num_events: 3,
            gates: vec![Gate {
                kind,
                output: 0,
                inputs: vec![1, 2],
            }],
            basic: vec![
                BasicEvent {
                    event: 1,
                    weight: 1.0,
                },
                BasicEvent {
                    event: 2,
                    weight: 1.0,
                },
            ],
        }
    }

    #[test]
    fn printed_labels_are_swapped() {
        assert!(check_truth_table(GateKind::Or, &printed_and_form()));
        assert!(check_truth_table(GateKind::And, &printed_or_form()));
        assert!(!check_truth_table(GateKind::And, &printed_and_form()));
        let audit = gate_audit();
        assert_eq!(audit[0].source, "OR");
        assert!(!audit[0].printed_form_passes);
    }

    #[test]
    fn gate_rows() {
        let maj = gate_penalty(GateKind::Maj3, 0, &[1, 2, 3]).unwrap();
        assert_eq!(maj.energy_bits(&[1, 1, 1, 0]), 0.0);
        assert_eq!(maj.energy_bits(&[0, 1, 1, 0]), 1.0);
        let and = gate_penalty(GateKind::And, 0, &[1, 2]).unwrap();
        assert!(and.energy_bits(&[1, 1, 0]) >= 1.0);
        let or = gate_penalty(GateKind::Or, 0, &[1, 2]).unwrap();
        assert_eq!(or.energy_bits(&[1, 1, 0]), 0.0);
        assert!(gate_penalty(GateKind::Maj3, 0, &[1, 2]).is_err());
    }

    #[test]
    fn single_gates() {
        let r = brute_force(
            &faulttree_compile(&single(GateKind::And), None, None)
                .unwrap()
                .model,
        )
        .unwrap();
        assert_eq!(r.best_energy, 2.0);
        let r = brute_force(
            &faulttree_compile(&single(GateKind::Or), None, None)
                .unwrap()
                .model,
        )
        .unwrap();
        assert_eq!(r.best_energy, 1.0);
    }

    #[test]
    fn wide_gates_cascade() {
        let t = FaultTree {
            num_events: 5,
            gates: vec![Gate {
                kind: GateKind::And,
                output: 0,
                inputs: vec![1, 2, 3, 4],
            }],
            basic: (1..5)
                .map(|e| BasicEvent {
                    event: e,
                    weight: 1.0,
                })
                .collect(),
        };
        let m = faulttree_compile(&t, None, None).unwrap();
        assert_eq!(m.model.num_vars(), 7);
        let r = brute_force(&m.model).unwrap();
        assert_eq!(r.best_energy, 4.0);
    }

    #[test]
    fn cycles_are_rejected() {
        let t = FaultTree {
            num_events: 4,
            gates: vec![
                Gate {
                    kind: GateKind::Or,
                    output: 0,
                    inputs: vec![1, 2],
                },
                Gate {
                    kind: GateKind::And,
                    output: 2,
                    inputs: vec![0, 3],
                },
            ],
            basic: vec![
                BasicEvent {
                    event: 1,
                    weight: 1.0,
                },
                BasicEvent {
                    event: 3,
                    weight: 1.0,
                },
            ],
        };
        assert!(matches!(t.validate(), Err(CompileError::Cyclic(_))));
    }

    #[test]
    fn random_trees_are_valid_and_seeded() {
        for seed in 0..20 {
            let t = random_fault_tree(6, 4, seed).unwrap();
            assert_eq!(t, random_fault_tree(6, 4, seed).unwrap());
            assert_eq!(t.gates.last().unwrap().output, 0);
        }
    }
}
