use std::fmt;

use crate::error::{Error, Result};

/// Value convention of a [`BitString`].
///
/// `Spin` strings hold `±1` (MaxCut, Ising, SK); `Binary` strings hold
/// `0/1` (independent sets). Both map onto the same computational basis:
/// spin `−1` and bit `1` are the qubit state `|1⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Convention {
    Spin,
    Binary,
}

impl Convention {
    pub fn name(self) -> &'static str {
        match self {
            Convention::Spin => "spin (±1)",
            Convention::Binary => "binary (0/1)",
        }
    }
}

/// A classical assignment to the vertices of a graph, tagged with its
/// convention.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitString {
    convention: Convention,
    values: Vec<i8>,
}

impl BitString {
    pub fn spins(values: Vec<i8>) -> Result<Self> {
        if let Some(v) = values.iter().find(|&&v| v != 1 && v != -1) {
            return Err(Error::InvalidArgument(format!("spin value {v} is not ±1")));
        }
        Ok(Self {
            convention: Convention::Spin,
            values,
        })
    }

    pub fn binary(values: Vec<u8>) -> Result<Self> {
        if let Some(v) = values.iter().find(|&&v| v > 1) {
            return Err(Error::InvalidArgument(format!("bit value {v} is not 0/1")));
        }
        Ok(Self {
            convention: Convention::Binary,
            values: values.into_iter().map(|v| v as i8).collect(),
        })
    }

    /// String whose vertex `i` is the qubit `n − 1 − i` of basis index
    /// `index` (vertex 0 is the most significant bit).
    pub fn from_index(n: usize, index: usize, convention: Convention) -> Self {
        let values = (0..n)
            .map(|i| {
                let one = (index >> (n - 1 - i)) & 1 == 1;
                match (convention, one) {
                    (Convention::Spin, false) => 1,
                    (Convention::Spin, true) => -1,
                    (Convention::Binary, b) => b as i8,
                }
            })
            .collect();
        Self { convention, values }
    }

    pub fn all_up(n: usize) -> Self {
        Self::from_index(n, 0, Convention::Spin)
    }

    pub fn index(&self) -> usize {
        let n = self.values.len();
        (0..n).fold(0, |acc, i| acc | (usize::from(self.is_one(i)) << (n - 1 - i)))
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Raw values: `±1` for spin strings, `0/1` for binary strings.
    pub fn values(&self) -> &[i8] {
        &self.values
    }

    /// Whether vertex `i` is in the qubit state `|1⟩`.
    pub fn is_one(&self, i: usize) -> bool {
        match self.convention {
            Convention::Spin => self.values[i] == -1,
            Convention::Binary => self.values[i] == 1,
        }
    }

    pub fn bits(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len()).map(|i| self.is_one(i))
    }

    pub fn flipped(&self, i: usize) -> Self {
        let mut out = self.clone();
        out.values[i] = match self.convention {
            Convention::Spin => -self.values[i],
            Convention::Binary => 1 - self.values[i],
        };
        out
    }

    pub fn complement(&self) -> Self {
        (0..self.len()).fold(self.clone(), |mut s, i| {
            s.values[i] = match s.convention {
                Convention::Spin => -s.values[i],
                Convention::Binary => 1 - s.values[i],
            };
            s
        })
    }

    pub fn count_ones(&self) -> usize {
        self.bits().filter(|&b| b).count()
    }

    /// Parses `"+-+"` (spin) or `"010"` (binary).
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        if text.chars().all(|c| c == '+' || c == '-') {
            Self::spins(text.chars().map(|c| if c == '+' { 1 } else { -1 }).collect())
        } else if text.chars().all(|c| c == '0' || c == '1') {
            Self::binary(text.bytes().map(|c| c - b'0').collect())
        } else {
            Err(Error::InvalidArgument(format!(
                "'{text}' is neither a +/- nor a 0/1 string"
            )))
        }
    }

    pub(crate) fn ensure(&self, n: usize, convention: Convention) -> Result<()> {
        if self.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                found: self.len(),
            });
        }
        if self.convention != convention {
            return Err(Error::ConventionMismatch {
                expected: convention.name(),
                found: self.convention.name(),
            });
        }
        Ok(())
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &v in &self.values {
            let c = match (self.convention, v) {
                (Convention::Spin, 1) => '+',
                (Convention::Spin, _) => '-',
                (Convention::Binary, 0) => '0',
                (Convention::Binary, _) => '1',
            };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}
