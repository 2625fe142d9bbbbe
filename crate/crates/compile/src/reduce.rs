//! Substituting known values into a QUBO, and a default exact solver.

use forge_core::solvers::exact_minimum;
use forge_core::{Assignment, QuadraticModel, QuboBuilder, QuboModel};

use crate::error::{CompileError, Result};

/// Exact ground state of a bit-form model (brute force or branch and bound).
pub fn exact_solver(m: &QuboModel) -> forge_core::Result<Assignment> {
    Ok(exact_minimum(m)?.best_assignment)
}

/// A partial assignment over the variables of a model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixedVariables {
    values: Vec<Option<u8>>,
}

impl FixedVariables {
    pub fn new(num_vars: usize) -> Self {
        Self {
            values: vec![None; num_vars],
        }
    }

    pub fn from_values(values: Vec<Option<u8>>) -> Self {
        Self { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, i: usize) -> Option<u8> {
        self.values[i]
    }

    pub fn values(&self) -> &[Option<u8>] {
        &self.values
    }

    pub fn num_fixed(&self) -> usize {
        self.values.iter().filter(|v| v.is_some()).count()
    }

    /// Indices of the free variables, in order. Position `k` in the reduced
    /// model is variable `free()[k]` of the full one.
    pub fn free(&self) -> Vec<usize> {
        (0..self.values.len())
            .filter(|&i| self.values[i].is_none())
            .collect()
    }

    /// Fixes `i` to `v`. Returns `Ok(true)` if this changed anything and an
    /// error if `i` was already fixed to the other value.
    pub fn fix(&mut self, i: usize, v: u8) -> Result<bool> {
        match self.values[i] {
            None => {
                self.values[i] = Some(v);
                Ok(true)
            }
            Some(w) if w == v => Ok(false),
            Some(_) => Err(CompileError::Unsatisfiable(format!(
                "variable {i} forced to both 0 and 1"
            ))),
        }
    }

    /// The model restricted to the free variables. Energies agree with the
    /// full model on every completion of the fixed values.
    pub fn reduce(&self, m: &QuboModel) -> Result<QuboModel> {
        if m.num_vars() != self.values.len() {
            return Err(CompileError::InvalidInput(format!(
                "model has {} variables but {} are described",
                m.num_vars(),
                self.values.len()
            )));
        }
        let mut pos = vec![usize::MAX; self.values.len()];
        for (k, i) in self.free().into_iter().enumerate() {
            pos[i] = k;
        }
        let mut b = QuboBuilder::new(self.values.len() - self.num_fixed());
        b.add_offset(m.offset());
        for (i, &a) in m.linear().iter().enumerate() {
            match self.values[i] {
                Some(v) => {
                    b.add_offset(a * v as f64);
                }
                None => {
                    b.add_linear(pos[i], a);
                }
            }
        }
        for (&(i, j), &q) in m.quadratic() {
            match (self.values[i], self.values[j]) {
                (Some(vi), Some(vj)) => {
                    b.add_offset(q * (vi * vj) as f64);
                }
                (Some(vi), None) => {
                    b.add_linear(pos[j], q * vi as f64);
                }
                (None, Some(vj)) => {
                    b.add_linear(pos[i], q * vj as f64);
                }
                (None, None) => {
                    b.add_quadratic(pos[i], pos[j], q);
                }
            }
        }
        Ok(b.build())
    }

    /// Full bit vector from an assignment of the free variables.
    pub fn expand(&self, reduced: &Assignment) -> Result<Assignment> {
        let free = self.free();
        if reduced.len() != free.len() {
            return Err(CompileError::InvalidInput(format!(
                "reduced assignment has {} values, expected {}",
                reduced.len(),
                free.len()
            )));
        }
        let rb = reduced.bits();
        let mut bits: Vec<u8> = self.values.iter().map(|v| v.unwrap_or(0)).collect();
        for (k, &i) in free.iter().enumerate() {
            bits[i] = rb[k];
        }
        Ok(Assignment::from_bits(&bits)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduction_preserves_energy() {
        let mut b = QuboBuilder::new(4);
        b.add_linear(0, 1.5)
            .add_linear(3, -2.0)
            .add_quadratic(0, 1, 3.0)
            .add_quadratic(1, 2, -1.0);
        b.add_quadratic(2, 3, 0.5).add_offset(0.25);
        let m = b.build();
        let fixed = FixedVariables::from_values(vec![Some(1), None, Some(0), None]);
        let r = fixed.reduce(&m).unwrap();
        assert_eq!(r.num_vars(), 2);
        for idx in 0..4 {
            let ra = Assignment::from_index(idx, 2, forge_core::Form::Bit);
            let full = fixed.expand(&ra).unwrap();
            assert_eq!(r.energy(&ra).unwrap(), m.energy(&full).unwrap());
        }
    }

    #[test]
    fn conflicting_fix_is_reported() {
        let mut f = FixedVariables::new(2);
        assert!(f.fix(0, 1).unwrap());
        assert!(!f.fix(0, 1).unwrap());
        assert!(f.fix(0, 0).is_err());
    }
}
