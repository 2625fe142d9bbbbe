//! Bit and spin configurations.
//!
//! Bits `z` and spins `s` are related by `s = 1 - 2z`, so the all-zero bit
//! string is the all-up spin configuration.

use serde::{Deserialize, Serialize};

use crate::error::{ForgeError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Form {
    /// Values in `{0, 1}`.
    Bit,
    /// Values in `{-1, +1}`.
    Spin,
}

impl Form {
    pub fn name(self) -> &'static str {
        match self {
            Form::Bit => "bit",
            Form::Spin => "spin",
        }
    }
}

#[inline]
pub fn bit_to_spin(z: u8) -> i8 {
    1 - 2 * z as i8
}

#[inline]
pub fn spin_to_bit(s: i8) -> u8 {
    ((1 - s) / 2) as u8
}

/// A configuration of binary variables tagged with its form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Assignment {
    values: Vec<i8>,
    form: Form,
}

impl Assignment {
    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        for (i, &b) in bits.iter().enumerate() {
            if b > 1 {
                return Err(ForgeError::InvalidValue {
                    index: i,
                    value: b as i8,
                    form: "bit",
                });
            }
        }
        Ok(Self {
            values: bits.iter().map(|&b| b as i8).collect(),
            form: Form::Bit,
        })
    }

    pub fn from_spins(spins: &[i8]) -> Result<Self> {
        for (i, &s) in spins.iter().enumerate() {
            if s != 1 && s != -1 {
                return Err(ForgeError::InvalidValue {
                    index: i,
                    value: s,
                    form: "spin",
                });
            }
        }
        Ok(Self {
            values: spins.to_vec(),
            form: Form::Spin,
        })
    }

    /// Builds the configuration whose lexicographic bit-string rank is `index`;
    /// variable 0 is the most significant bit.
    pub fn from_index(index: u64, len: usize, form: Form) -> Self {
        let bits = index_to_bits(index, len);
        match form {
            Form::Bit => Self {
                values: bits.iter().map(|&b| b as i8).collect(),
                form,
            },
            Form::Spin => Self {
                values: bits.iter().map(|&b| bit_to_spin(b)).collect(),
                form,
            },
        }
    }

    pub fn zeros(len: usize, form: Form) -> Self {
        Self::from_index(0, len, form)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn form(&self) -> Form {
        self.form
    }

    pub fn values(&self) -> &[i8] {
        &self.values
    }

    pub fn bits(&self) -> Vec<u8> {
        match self.form {
            Form::Bit => self.values.iter().map(|&v| v as u8).collect(),
            Form::Spin => self.values.iter().map(|&s| spin_to_bit(s)).collect(),
        }
    }

    pub fn spins(&self) -> Vec<i8> {
        match self.form {
            Form::Bit => self.values.iter().map(|&v| bit_to_spin(v as u8)).collect(),
            Form::Spin => self.values.clone(),
        }
    }

    pub fn to_form(&self, form: Form) -> Self {
        match form {
            Form::Bit => Self {
                values: self.bits().into_iter().map(|b| b as i8).collect(),
                form,
            },
            Form::Spin => Self {
                values: self.spins(),
                form,
            },
        }
    }

    /// Lexicographic rank of the bit string (variable 0 most significant).
    /// Only meaningful for at most 64 variables.
    pub fn index(&self) -> u64 {
        bits_to_index(&self.bits())
    }
}

pub fn index_to_bits(index: u64, len: usize) -> Vec<u8> {
    (0..len)
        .map(|i| ((index >> (len - 1 - i)) & 1) as u8)
        .collect()
}

pub fn bits_to_index(bits: &[u8]) -> u64 {
    bits.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spin_bit_correspondence() {
        assert_eq!(bit_to_spin(0), 1);
        assert_eq!(bit_to_spin(1), -1);
        assert_eq!(spin_to_bit(1), 0);
        assert_eq!(spin_to_bit(-1), 1);
    }

    #[test]
    fn rejects_out_of_range_values() {
        assert!(Assignment::from_bits(&[0, 2]).is_err());
        assert!(Assignment::from_spins(&[1, 0]).is_err());
    }

    #[test]
    fn index_is_lexicographic() {
        let a = Assignment::from_bits(&[1, 0, 1]).unwrap();
        assert_eq!(a.index(), 5);
        assert_eq!(Assignment::from_index(5, 3, Form::Bit), a);
        assert_eq!(
            Assignment::from_index(5, 3, Form::Spin).spins(),
            vec![-1, 1, -1]
        );
    }

    #[test]
    fn form_round_trip() {
        let a = Assignment::from_spins(&[1, -1, -1, 1]).unwrap();
        assert_eq!(a.to_form(Form::Bit).bits(), vec![0, 1, 1, 0]);
        assert_eq!(a.to_form(Form::Bit).to_form(Form::Spin), a);
    }
}
