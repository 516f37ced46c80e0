use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One tensor factor of a composite Hilbert space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Factor {
    pub dimension: usize,
    /// 1-based party label.
    pub party: usize,
    /// 1-based copy label.
    pub copy: usize,
    /// Distinguishes several factors of one party within one copy. For a
    /// network state this is the vertex at the other end of the edge.
    #[serde(default)]
    pub slot: usize,
}

impl Factor {
    pub fn new(dimension: usize, party: usize) -> Self {
        Self {
            dimension,
            party,
            copy: 1,
            slot: 0,
        }
    }

    pub fn qubit(party: usize) -> Self {
        Self::new(2, party)
    }

    pub fn with_copy(self, copy: usize) -> Self {
        Self { copy, ..self }
    }

    pub fn with_slot(self, slot: usize) -> Self {
        Self { slot, ..self }
    }
}

/// Ordered list of tensor factors. Factor 0 is the most significant index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubsystemLayout {
    factors: Vec<Factor>,
}

impl SubsystemLayout {
    pub fn new(factors: Vec<Factor>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidLayout("no factors".into()));
        }
        for f in &factors {
            if f.dimension < 2 {
                return Err(Error::InvalidLayout(format!(
                    "factor dimension {} < 2",
                    f.dimension
                )));
            }
            if f.party == 0 || f.copy == 0 {
                return Err(Error::InvalidLayout(
                    "party and copy labels are 1-based".into(),
                ));
            }
        }
        Ok(Self { factors })
    }

    /// One qubit per party, parties `1..=n`.
    pub fn qubits(n: usize) -> Self {
        Self {
            factors: (1..=n).map(Factor::qubit).collect(),
        }
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.factors.iter().map(|f| f.dimension).collect()
    }

    pub fn total_dimension(&self) -> usize {
        self.factors.iter().map(|f| f.dimension).product()
    }

    /// Largest party label present.
    pub fn party_count(&self) -> usize {
        self.factors.iter().map(|f| f.party).max().unwrap_or(0)
    }

    pub fn copy_count(&self) -> usize {
        self.factors.iter().map(|f| f.copy).max().unwrap_or(0)
    }

    /// Indices of the factors held by `party`.
    pub fn factors_of_party(&self, party: usize) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| self.factors[i].party == party)
            .collect()
    }

    /// Layout keeping only the listed factors, in the given order.
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        let mut factors = Vec::with_capacity(indices.len());
        for &i in indices {
            factors.push(*self.factors.get(i).ok_or(Error::FactorOutOfRange {
                index: i,
                count: self.len(),
            })?);
        }
        Self::new(factors)
    }

    /// Factors of `self` followed by factors of `other`.
    pub fn concat(&self, other: &SubsystemLayout) -> Self {
        let mut factors = self.factors.clone();
        factors.extend_from_slice(&other.factors);
        Self { factors }
    }

    pub fn relabel_copies(&self, copy: usize) -> Self {
        Self {
            factors: self.factors.iter().map(|f| f.with_copy(copy)).collect(),
        }
    }

    pub(crate) fn check_index(&self, i: usize) -> Result<()> {
        if i < self.len() {
            Ok(())
        } else {
            Err(Error::FactorOutOfRange {
                index: i,
                count: self.len(),
            })
        }
    }
}
