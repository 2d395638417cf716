//! Graded vector spaces and degree statistics.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Anything with a finite set of occupied degrees.
pub trait DegreeSupport {
    /// Degrees carrying a nonzero component, in increasing order.
    fn support(&self) -> Vec<i64>;

    fn maxdeg(&self) -> Result<i64> {
        self.support()
            .last()
            .copied()
            .ok_or_else(|| Error::invalid("maxdeg of the zero object is undefined"))
    }

    fn mindeg(&self) -> Result<i64> {
        self.support()
            .first()
            .copied()
            .ok_or_else(|| Error::invalid("mindeg of the zero object is undefined"))
    }
}

/// A finite-dimensional graded vector space with a labeled basis in each degree.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradedVectorSpace {
    components: BTreeMap<i64, Vec<String>>,
}

impl GradedVectorSpace {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a labeled basis vector in `degree`. Labels must be unique within a degree.
    pub fn push(&mut self, degree: i64, label: impl Into<String>) -> Result<()> {
        let label = label.into();
        let comp = self.components.entry(degree).or_default();
        if comp.contains(&label) {
            return Err(Error::invalid(format!(
                "duplicate label `{label}` in degree {degree}"
            )));
        }
        comp.push(label);
        Ok(())
    }

    /// `dim` anonymous basis vectors `prefix#0, prefix#1, ...` in `degree`.
    pub fn push_block(&mut self, degree: i64, dim: usize, prefix: &str) {
        if dim == 0 {
            return;
        }
        let comp = self.components.entry(degree).or_default();
        let start = comp.len();
        comp.extend((start..start + dim).map(|i| format!("{prefix}#{i}")));
    }

    pub fn dim_in(&self, degree: i64) -> usize {
        self.components.get(&degree).map_or(0, Vec::len)
    }

    pub fn dim(&self) -> usize {
        self.components.values().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn labels_in(&self, degree: i64) -> &[String] {
        self.components.get(&degree).map_or(&[], Vec::as_slice)
    }

    /// Degree → dimension table.
    pub fn dims(&self) -> BTreeMap<i64, usize> {
        self.components
            .iter()
            .map(|(d, l)| (*d, l.len()))
            .collect()
    }

    /// `M⟨i⟩` with `M⟨i⟩^q = M^{q+i}`.
    pub fn shifted(&self, i: i64) -> Self {
        GradedVectorSpace {
            components: self
                .components
                .iter()
                .map(|(d, l)| (d - i, l.clone()))
                .collect(),
        }
    }
}

impl DegreeSupport for GradedVectorSpace {
    fn support(&self) -> Vec<i64> {
        self.components
            .iter()
            .filter(|(_, l)| !l.is_empty())
            .map(|(d, _)| *d)
            .collect()
    }
}
