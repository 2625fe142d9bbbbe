//! JSON problem files.
//!
//! ```json
//! { "vars": 3, "linear": {"0": 1.0}, "quadratic": {"0,2": -0.5}, "offset": 0.0, "form": "qubo" }
//! ```
//!
//! For `"form": "ising"` the `linear` map holds the fields `h_i` and
//! `quadratic` holds the couplings `J_ij`.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::assignment::{Assignment, Form};
use crate::error::{ForgeError, Result};
use crate::model::{IsingBuilder, IsingModel, QuadraticModel, QuboBuilder, QuboModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemForm {
    Qubo,
    Ising,
}

#[derive(Debug, Serialize, Deserialize)]
struct ProblemFile {
    vars: usize,
    #[serde(default)]
    linear: BTreeMap<String, f64>,
    #[serde(default)]
    quadratic: BTreeMap<String, f64>,
    #[serde(default)]
    offset: f64,
    form: ProblemForm,
}

/// A model read from disk in either form.
#[derive(Debug, Clone, PartialEq)]
pub enum Problem {
    Qubo(QuboModel),
    Ising(IsingModel),
}

impl Problem {
    pub fn form(&self) -> ProblemForm {
        match self {
            Problem::Qubo(_) => ProblemForm::Qubo,
            Problem::Ising(_) => ProblemForm::Ising,
        }
    }

    pub fn num_vars(&self) -> usize {
        match self {
            Problem::Qubo(q) => q.num_vars(),
            Problem::Ising(m) => m.num_spins(),
        }
    }

    pub fn assignment_form(&self) -> Form {
        match self {
            Problem::Qubo(_) => Form::Bit,
            Problem::Ising(_) => Form::Spin,
        }
    }

    pub fn energy(&self, a: &Assignment) -> Result<f64> {
        match self {
            Problem::Qubo(q) => q.energy(a),
            Problem::Ising(m) => m.energy(a),
        }
    }

    pub fn to_ising(&self) -> IsingModel {
        match self {
            Problem::Qubo(q) => q.to_ising(),
            Problem::Ising(m) => m.clone(),
        }
    }

    pub fn to_qubo(&self) -> QuboModel {
        match self {
            Problem::Qubo(q) => q.clone(),
            Problem::Ising(m) => m.to_qubo(),
        }
    }

    /// The other representation of the same cost function.
    pub fn converted(&self) -> Problem {
        match self {
            Problem::Qubo(q) => Problem::Ising(q.to_ising()),
            Problem::Ising(m) => Problem::Qubo(m.to_qubo()),
        }
    }
}

fn parse_index(key: &str, vars: usize) -> Result<usize> {
    let i: usize = key
        .trim()
        .parse()
        .map_err(|_| ForgeError::Format(format!("bad variable index {key:?}")))?;
    if i >= vars {
        return Err(ForgeError::IndexOutOfRange {
            index: i,
            num_vars: vars,
        });
    }
    Ok(i)
}

fn parse_pair(key: &str, vars: usize) -> Result<(usize, usize)> {
    let (a, b) = key
        .split_once(',')
        .ok_or_else(|| ForgeError::Format(format!("bad pair key {key:?}, expected \"i,j\"")))?;
    let (i, j) = (parse_index(a, vars)?, parse_index(b, vars)?);
    Ok((i, j))
}

pub fn parse_problem(text: &str) -> Result<Problem> {
    let f: ProblemFile = serde_json::from_str(text)?;
    let n = f.vars;
    match f.form {
        ProblemForm::Qubo => {
            let mut b = QuboBuilder::new(n);
            for (k, &c) in &f.linear {
                b.add_linear(parse_index(k, n)?, c);
            }
            for (k, &c) in &f.quadratic {
                let (i, j) = parse_pair(k, n)?;
                b.add_quadratic(i, j, c);
            }
            b.add_offset(f.offset);
            Ok(Problem::Qubo(b.try_build()?))
        }
        ProblemForm::Ising => {
            let mut b = IsingBuilder::new(n);
            for (k, &c) in &f.linear {
                b.add_field(parse_index(k, n)?, c);
            }
            for (k, &c) in &f.quadratic {
                let (i, j) = parse_pair(k, n)?;
                if i == j {
                    return Err(ForgeError::Format(format!(
                        "self-coupling {key:?}",
                        key = k
                    )));
                }
                b.add_coupling(i, j, c);
            }
            b.add_offset(f.offset);
            Ok(Problem::Ising(b.try_build()?))
        }
    }
}

pub fn read_problem(path: &Path) -> Result<Problem> {
    parse_problem(&std::fs::read_to_string(path)?)
}

pub fn problem_to_json(p: &Problem) -> String {
    let (vars, linear, quadratic, offset, form) = match p {
        Problem::Qubo(q) => (
            q.num_vars(),
            q.linear().to_vec(),
            q.quadratic()
                .iter()
                .map(|(&k, &v)| (k, v))
                .collect::<Vec<_>>(),
            q.offset(),
            ProblemForm::Qubo,
        ),
        Problem::Ising(m) => (
            m.num_spins(),
            m.h().to_vec(),
            m.couplings()
                .iter()
                .map(|(&k, &v)| (k, v))
                .collect::<Vec<_>>(),
            m.offset(),
            ProblemForm::Ising,
        ),
    };
    let file = ProblemFile {
        vars,
        linear: linear
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0.0)
            .map(|(i, &c)| (i.to_string(), c))
            .collect(),
        quadratic: quadratic
            .iter()
            .map(|&((i, j), c)| (format!("{i},{j}"), c))
            .collect(),
        offset,
        form,
    };
    serde_json::to_string_pretty(&file).expect("problem serialization")
}

/// Parses an assignment string such as `0110`, `0,1,1,0` or `+1 -1 -1`.
pub fn parse_assignment(text: &str, form: Form) -> Result<Assignment> {
    let t = text.trim();
    let tokens: Vec<&str> = if t.contains(',') || t.contains(char::is_whitespace) {
        t.split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .collect()
    } else if form == Form::Bit {
        t.split("").filter(|s| !s.is_empty()).collect()
    } else {
        vec![t]
    };
    match form {
        Form::Bit => {
            let bits = tokens
                .iter()
                .map(|s| {
                    s.parse::<u8>()
                        .map_err(|_| ForgeError::Format(format!("bad bit {s:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            Assignment::from_bits(&bits)
        }
        Form::Spin => {
            let spins = tokens
                .iter()
                .map(|s| {
                    s.trim_start_matches('+')
                        .parse::<i8>()
                        .map_err(|_| ForgeError::Format(format!("bad spin {s:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            Assignment::from_spins(&spins)
        }
    }
}

pub fn format_assignment(a: &Assignment) -> String {
    match a.form() {
        Form::Bit => a.bits().iter().map(|b| char::from(b'0' + b)).collect(),
        Form::Spin => a
            .values()
            .iter()
            .map(|&s| if s > 0 { "+1" } else { "-1" })
            .collect::<Vec<_>>()
            .join(","),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_qubo() {
        let p = parse_problem(
            r#"{"vars":3,"linear":{"0":1.0},"quadratic":{"2,0":-0.5},"offset":0.25,"form":"qubo"}"#,
        )
        .unwrap();
        let Problem::Qubo(q) = &p else { panic!() };
        assert_eq!(q.coefficient(0, 2), -0.5);
        assert_eq!(q.offset(), 0.25);
        let back = parse_problem(&problem_to_json(&p)).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn rejects_out_of_range() {
        let e = parse_problem(r#"{"vars":2,"quadratic":{"0,2":1},"form":"ising"}"#);
        assert!(matches!(e, Err(ForgeError::IndexOutOfRange { .. })));
        assert!(parse_problem(r#"{"vars":2,"form":"spin"}"#).is_err());
    }

    #[test]
    fn assignment_strings() {
        assert_eq!(
            parse_assignment("0110", Form::Bit).unwrap().bits(),
            vec![0, 1, 1, 0]
        );
        assert_eq!(
            parse_assignment("+1,-1", Form::Spin).unwrap().spins(),
            vec![1, -1]
        );
        let a = Assignment::from_spins(&[1, -1]).unwrap();
        assert_eq!(format_assignment(&a), "+1,-1");
    }
}
