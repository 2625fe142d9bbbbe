//! QUBO and Ising cost functions.
//!
//! A QUBO model is `E(z) = sum_i a_i z_i + sum_{i<j} b_ij z_i z_j + c` over
//! bits. An Ising model uses the sign convention of the annealing hardware,
//! `E(s) = -sum_i h_i s_i + sum_{i<j} J_ij s_i s_j + c` over spins. The two
//! are interchangeable through `s = 1 - 2z`.
//!
//! Models are immutable once built. Use [`QuboBuilder`] / [`IsingBuilder`]
//! to accumulate terms; duplicate terms are summed and exact zeros dropped.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::assignment::{Assignment, Form};
use crate::error::{ForgeError, Result};

/// Common read interface over both model forms.
pub trait QuadraticModel {
    fn num_vars(&self) -> usize;
    fn form(&self) -> Form;
    /// Energy of `a`, which must match the model's length and form.
    fn energy(&self, a: &Assignment) -> Result<f64>;
    /// The same cost function in spin form.
    fn as_ising(&self) -> IsingModel;
    /// The same cost function in bit form.
    fn as_qubo(&self) -> QuboModel;
    /// Sum of absolute coefficients, used to scale tolerances.
    fn coefficient_scale(&self) -> f64;
}

fn order_pair(i: usize, j: usize) -> (usize, usize) {
    if i < j {
        (i, j)
    } else {
        (j, i)
    }
}

fn check_finite(c: f64) -> Result<()> {
    if c.is_finite() {
        Ok(())
    } else {
        Err(ForgeError::NonFinite(c))
    }
}

fn check_assignment(a: &Assignment, n: usize, form: Form) -> Result<()> {
    if a.len() != n {
        return Err(ForgeError::LengthMismatch {
            expected: n,
            got: a.len(),
        });
    }
    if a.form() != form {
        return Err(ForgeError::FormMismatch {
            expected: form.name(),
            got: a.form().name(),
        });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuboModel {
    num_vars: usize,
    linear: Vec<f64>,
    quadratic: BTreeMap<(usize, usize), f64>,
    offset: f64,
}

impl QuboModel {
    pub fn zero(num_vars: usize) -> Self {
        Self {
            num_vars,
            linear: vec![0.0; num_vars],
            quadratic: BTreeMap::new(),
            offset: 0.0,
        }
    }

    pub fn linear(&self) -> &[f64] {
        &self.linear
    }

    pub fn quadratic(&self) -> &BTreeMap<(usize, usize), f64> {
        &self.quadratic
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// Coefficient of `z_i z_j`, zero when absent. `i == j` returns the linear term.
    pub fn coefficient(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return self.linear[i];
        }
        self.quadratic
            .get(&order_pair(i, j))
            .copied()
            .unwrap_or(0.0)
    }

    /// Evaluates the cost on a raw bit slice without validation beyond length.
    pub fn energy_bits(&self, z: &[u8]) -> f64 {
        debug_assert_eq!(z.len(), self.num_vars);
        let mut e = self.offset;
        for (i, &a) in self.linear.iter().enumerate() {
            if z[i] == 1 {
                e += a;
            }
        }
        for (&(i, j), &b) in &self.quadratic {
            if z[i] == 1 && z[j] == 1 {
                e += b;
            }
        }
        e
    }

    pub fn to_builder(&self) -> QuboBuilder {
        QuboBuilder {
            num_vars: self.num_vars,
            linear: self.linear.clone(),
            quadratic: self.quadratic.clone(),
            offset: self.offset,
        }
    }

    /// Substitution `z = (1 - s)/2`.
    pub fn to_ising(&self) -> IsingModel {
        let n = self.num_vars;
        let mut b = IsingBuilder::new(n);
        for (i, &a) in self.linear.iter().enumerate() {
            // a z = a/2 - (a/2) s
            b.add_field(i, a / 2.0);
            b.add_offset(a / 2.0);
        }
        for (&(i, j), &q) in &self.quadratic {
            // q z_i z_j = q/4 (1 - s_i - s_j + s_i s_j)
            b.add_coupling(i, j, q / 4.0);
            b.add_field(i, q / 4.0);
            b.add_field(j, q / 4.0);
            b.add_offset(q / 4.0);
        }
        b.add_offset(self.offset);
        b.build()
    }

    /// Relabels variable `i` as `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> QuboModel {
        let mut b = QuboBuilder::new(self.num_vars);
        for (i, &a) in self.linear.iter().enumerate() {
            b.add_linear(perm[i], a);
        }
        for (&(i, j), &q) in &self.quadratic {
            b.add_quadratic(perm[i], perm[j], q);
        }
        b.add_offset(self.offset);
        b.build()
    }

    /// Multiplies every coefficient, including the offset, by `factor`.
    pub fn scaled(&self, factor: f64) -> QuboModel {
        let mut m = self.clone();
        m.linear.iter_mut().for_each(|a| *a *= factor);
        m.quadratic.values_mut().for_each(|q| *q *= factor);
        m.offset *= factor;
        m.to_builder().build()
    }

    pub fn with_offset(&self, offset: f64) -> QuboModel {
        let mut m = self.clone();
        m.offset = offset;
        m
    }

    /// Sum of two models over the same variables.
    pub fn plus(&self, other: &QuboModel) -> QuboModel {
        assert_eq!(self.num_vars, other.num_vars);
        let mut b = self.to_builder();
        b.add_model(other);
        b.build()
    }
}

impl QuadraticModel for QuboModel {
    fn num_vars(&self) -> usize {
        self.num_vars
    }

    fn form(&self) -> Form {
        Form::Bit
    }

    fn energy(&self, a: &Assignment) -> Result<f64> {
        check_assignment(a, self.num_vars, Form::Bit)?;
        Ok(self.energy_bits(&a.bits()))
    }

    fn as_ising(&self) -> IsingModel {
        self.to_ising()
    }

    fn as_qubo(&self) -> QuboModel {
        self.clone()
    }

    fn coefficient_scale(&self) -> f64 {
        self.linear.iter().map(|a| a.abs()).sum::<f64>()
            + self.quadratic.values().map(|q| q.abs()).sum::<f64>()
            + self.offset.abs()
    }
}

#[derive(Debug, Clone)]
pub struct QuboBuilder {
    num_vars: usize,
    linear: Vec<f64>,
    quadratic: BTreeMap<(usize, usize), f64>,
    offset: f64,
}

impl QuboBuilder {
    pub fn new(num_vars: usize) -> Self {
        Self {
            num_vars,
            linear: vec![0.0; num_vars],
            quadratic: BTreeMap::new(),
            offset: 0.0,
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    /// Adds a fresh variable and returns its index.
    pub fn add_variable(&mut self) -> usize {
        self.linear.push(0.0);
        self.num_vars += 1;
        self.num_vars - 1
    }

    pub fn add_linear(&mut self, i: usize, c: f64) -> &mut Self {
        assert!(i < self.num_vars, "variable {i} out of range");
        self.linear[i] += c;
        self
    }

    /// Adds `c z_i z_j`; for `i == j` this is the linear term since `z^2 = z`.
    pub fn add_quadratic(&mut self, i: usize, j: usize, c: f64) -> &mut Self {
        assert!(
            i < self.num_vars && j < self.num_vars,
            "variable ({i},{j}) out of range"
        );
        if i == j {
            self.linear[i] += c;
        } else {
            *self.quadratic.entry(order_pair(i, j)).or_insert(0.0) += c;
        }
        self
    }

    pub fn add_offset(&mut self, c: f64) -> &mut Self {
        self.offset += c;
        self
    }

    pub fn add_model(&mut self, m: &QuboModel) -> &mut Self {
        for (i, &a) in m.linear.iter().enumerate() {
            self.add_linear(i, a);
        }
        for (&(i, j), &q) in &m.quadratic {
            self.add_quadratic(i, j, q);
        }
        self.add_offset(m.offset)
    }

    /// Adds `weight * (sum_k c_k z_k + constant)^2`.
    pub fn add_squared_linear(
        &mut self,
        terms: &[(usize, f64)],
        constant: f64,
        weight: f64,
    ) -> &mut Self {
        self.add_offset(weight * constant * constant);
        for (a, &(i, ci)) in terms.iter().enumerate() {
            // z^2 = z
            self.add_linear(i, weight * (ci * ci + 2.0 * ci * constant));
            for &(j, cj) in &terms[a + 1..] {
                self.add_quadratic(i, j, weight * 2.0 * ci * cj);
            }
        }
        self
    }

    pub fn build(self) -> QuboModel {
        let quadratic = self
            .quadratic
            .into_iter()
            .filter(|&(_, c)| c != 0.0)
            .collect();
        QuboModel {
            num_vars: self.num_vars,
            linear: self.linear,
            quadratic,
            offset: self.offset,
        }
    }

    /// Like [`build`](Self::build) but rejects non-finite coefficients.
    pub fn try_build(self) -> Result<QuboModel> {
        check_finite(self.offset)?;
        for &c in self.linear.iter().chain(self.quadratic.values()) {
            check_finite(c)?;
        }
        Ok(self.build())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsingModel {
    num_spins: usize,
    h: Vec<f64>,
    couplings: BTreeMap<(usize, usize), f64>,
    offset: f64,
}

impl IsingModel {
    pub fn zero(num_spins: usize) -> Self {
        Self {
            num_spins,
            h: vec![0.0; num_spins],
            couplings: BTreeMap::new(),
            offset: 0.0,
        }
    }

    pub fn num_spins(&self) -> usize {
        self.num_spins
    }

    pub fn h(&self) -> &[f64] {
        &self.h
    }

    pub fn couplings(&self) -> &BTreeMap<(usize, usize), f64> {
        &self.couplings
    }

    pub fn coupling(&self, i: usize, j: usize) -> f64 {
        self.couplings
            .get(&order_pair(i, j))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.couplings.keys().copied()
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn energy_spins(&self, s: &[i8]) -> f64 {
        debug_assert_eq!(s.len(), self.num_spins);
        let mut e = self.offset;
        for (i, &h) in self.h.iter().enumerate() {
            e -= h * s[i] as f64;
        }
        for (&(i, j), &jij) in &self.couplings {
            e += jij * (s[i] * s[j]) as f64;
        }
        e
    }

    pub fn to_builder(&self) -> IsingBuilder {
        IsingBuilder {
            num_spins: self.num_spins,
            h: self.h.clone(),
            couplings: self.couplings.clone(),
            offset: self.offset,
        }
    }

    /// Substitution `s = 1 - 2z`.
    pub fn to_qubo(&self) -> QuboModel {
        let mut b = QuboBuilder::new(self.num_spins);
        for (i, &h) in self.h.iter().enumerate() {
            // -h s = -h + 2h z
            b.add_linear(i, 2.0 * h);
            b.add_offset(-h);
        }
        for (&(i, j), &jij) in &self.couplings {
            // J s_i s_j = J (1 - 2z_i - 2z_j + 4 z_i z_j)
            b.add_quadratic(i, j, 4.0 * jij);
            b.add_linear(i, -2.0 * jij);
            b.add_linear(j, -2.0 * jij);
            b.add_offset(jij);
        }
        b.add_offset(self.offset);
        b.build()
    }

    pub fn permuted(&self, perm: &[usize]) -> IsingModel {
        let mut b = IsingBuilder::new(self.num_spins);
        for (i, &h) in self.h.iter().enumerate() {
            b.add_field(perm[i], h);
        }
        for (&(i, j), &c) in &self.couplings {
            b.add_coupling(perm[i], perm[j], c);
        }
        b.add_offset(self.offset);
        b.build()
    }

    pub fn scaled(&self, factor: f64) -> IsingModel {
        let mut m = self.clone();
        m.h.iter_mut().for_each(|h| *h *= factor);
        m.couplings.values_mut().for_each(|c| *c *= factor);
        m.offset *= factor;
        m.to_builder().build()
    }

    pub fn with_offset(&self, offset: f64) -> IsingModel {
        let mut m = self.clone();
        m.offset = offset;
        m
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        self.h
            .iter()
            .chain(self.couplings.values())
            .fold(0.0f64, |m, c| m.max(c.abs()))
    }
}

impl QuadraticModel for IsingModel {
    fn num_vars(&self) -> usize {
        self.num_spins
    }

    fn form(&self) -> Form {
        Form::Spin
    }

    fn energy(&self, a: &Assignment) -> Result<f64> {
        check_assignment(a, self.num_spins, Form::Spin)?;
        Ok(self.energy_spins(a.values()))
    }

    fn as_ising(&self) -> IsingModel {
        self.clone()
    }

    fn as_qubo(&self) -> QuboModel {
        self.to_qubo()
    }

    fn coefficient_scale(&self) -> f64 {
        self.h.iter().map(|a| a.abs()).sum::<f64>()
            + self.couplings.values().map(|q| q.abs()).sum::<f64>()
            + self.offset.abs()
    }
}

#[derive(Debug, Clone)]
pub struct IsingBuilder {
    num_spins: usize,
    h: Vec<f64>,
    couplings: BTreeMap<(usize, usize), f64>,
    offset: f64,
}

impl IsingBuilder {
    pub fn new(num_spins: usize) -> Self {
        Self {
            num_spins,
            h: vec![0.0; num_spins],
            couplings: BTreeMap::new(),
            offset: 0.0,
        }
    }

    pub fn add_field(&mut self, i: usize, h: f64) -> &mut Self {
        assert!(i < self.num_spins, "spin {i} out of range");
        self.h[i] += h;
        self
    }

    /// Adds `c s_i s_j`. Self-couplings are constants (`s^2 = 1`) and land in
    /// the offset.
    pub fn add_coupling(&mut self, i: usize, j: usize, c: f64) -> &mut Self {
        assert!(
            i < self.num_spins && j < self.num_spins,
            "spin ({i},{j}) out of range"
        );
        if i == j {
            self.offset += c;
        } else {
            *self.couplings.entry(order_pair(i, j)).or_insert(0.0) += c;
        }
        self
    }

    pub fn add_offset(&mut self, c: f64) -> &mut Self {
        self.offset += c;
        self
    }

    pub fn build(self) -> IsingModel {
        let couplings = self
            .couplings
            .into_iter()
            .filter(|&(_, c)| c != 0.0)
            .collect();
        IsingModel {
            num_spins: self.num_spins,
            h: self.h,
            couplings,
            offset: self.offset,
        }
    }

    pub fn try_build(self) -> Result<IsingModel> {
        check_finite(self.offset)?;
        for &c in self.h.iter().chain(self.couplings.values()) {
            check_finite(c)?;
        }
        Ok(self.build())
    }
}

/// Converts a QUBO to Ising form.
pub fn qubo_to_ising(q: &QuboModel) -> IsingModel {
    q.to_ising()
}

/// Converts an Ising model to QUBO form.
pub fn ising_to_qubo(m: &IsingModel) -> QuboModel {
    m.to_qubo()
}

/// Energy of either model form; the assignment must match.
pub fn energy<M: QuadraticModel + ?Sized>(m: &M, a: &Assignment) -> Result<f64> {
    m.energy(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assignment::index_to_bits;

    fn all_bits(n: usize) -> impl Iterator<Item = Vec<u8>> {
        (0..1u64 << n).map(move |k| index_to_bits(k, n))
    }

    #[test]
    fn single_linear_qubo_converts() {
        let mut b = QuboBuilder::new(1);
        b.add_linear(0, 1.0);
        let ising = b.build().to_ising();
        assert_eq!(ising.h(), &[0.5]);
        assert_eq!(ising.offset(), 0.5);
        assert!(ising.couplings().is_empty());
    }

    #[test]
    fn product_qubo_matches_all_four_assignments() {
        let mut b = QuboBuilder::new(2);
        b.add_quadratic(0, 1, 1.0);
        let q = b.build();
        let ising = q.to_ising();
        assert_eq!(ising.coupling(0, 1), 0.25);
        assert_eq!(ising.h(), &[0.25, 0.25]);
        assert_eq!(ising.offset(), 0.25);
        for z in all_bits(2) {
            let s: Vec<i8> = z.iter().map(|&b| 1 - 2 * b as i8).collect();
            assert_eq!(ising.energy_spins(&s), q.energy_bits(&z));
        }
    }

    #[test]
    fn zero_qubo_is_zero_ising() {
        let ising = QuboModel::zero(3).to_ising();
        assert_eq!(ising, IsingModel::zero(3));
    }

    #[test]
    fn ising_energy_examples() {
        let mut b = IsingBuilder::new(1);
        b.add_field(0, 1.0);
        assert_eq!(b.build().energy_spins(&[1]), -1.0);

        let mut b = IsingBuilder::new(2);
        b.add_coupling(0, 1, -1.0);
        assert_eq!(b.build().energy_spins(&[1, 1]), -1.0);
    }

    #[test]
    fn energy_rejects_mismatches() {
        let q = QuboModel::zero(2);
        let short = Assignment::from_bits(&[0]).unwrap();
        assert!(matches!(
            q.energy(&short),
            Err(ForgeError::LengthMismatch { .. })
        ));
        let spins = Assignment::from_spins(&[1, 1]).unwrap();
        assert!(matches!(
            q.energy(&spins),
            Err(ForgeError::FormMismatch { .. })
        ));
    }

    #[test]
    fn builder_drops_cancelled_terms() {
        let mut b = QuboBuilder::new(3);
        b.add_quadratic(2, 0, 1.5)
            .add_quadratic(0, 2, -1.5)
            .add_quadratic(1, 2, 1.0);
        let q = b.build();
        assert_eq!(q.quadratic().len(), 1);
        assert!(q.quadratic().contains_key(&(1, 2)));
    }

    #[test]
    fn squared_linear_penalty() {
        // (z0 + z1 - 1)^2 is 0 on one-hot rows and 1 otherwise
        let mut b = QuboBuilder::new(2);
        b.add_squared_linear(&[(0, 1.0), (1, 1.0)], -1.0, 1.0);
        let q = b.build();
        let expected = [1.0, 0.0, 0.0, 1.0];
        for (k, z) in all_bits(2).enumerate() {
            assert_eq!(q.energy_bits(&z), expected[k]);
        }
    }

    #[test]
    fn try_build_rejects_nan() {
        let mut b = QuboBuilder::new(1);
        b.add_linear(0, f64::NAN);
        assert!(b.try_build().is_err());
    }
}
