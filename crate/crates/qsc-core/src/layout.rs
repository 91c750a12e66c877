//! Labeled tensor factor bookkeeping.
//!
//! A `SystemLayout` is an ordered list of named subsystems with their
//! dimensions. Flat indices are row-major in layout order: the first label is
//! the most significant digit.

use crate::error::{CoreError, Result};
use serde::{Deserialize, Serialize};

/// Desk-scale guard: larger requests are an error, never an approximation.
pub const MAX_TOTAL_DIM: usize = 4096;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemLayout {
    labels: Vec<String>,
    dims: Vec<usize>,
}

impl SystemLayout {
    pub fn new<S: Into<String>>(parts: Vec<(S, usize)>) -> Result<Self> {
        let mut labels = Vec::with_capacity(parts.len());
        let mut dims = Vec::with_capacity(parts.len());
        for (l, d) in parts {
            let l = l.into();
            if d == 0 {
                return Err(CoreError::DimensionMismatch(format!(
                    "label `{l}` has dimension 0"
                )));
            }
            if labels.contains(&l) {
                return Err(CoreError::DuplicateLabel(l));
            }
            labels.push(l);
            dims.push(d);
        }
        let layout = SystemLayout { labels, dims };
        let total = layout.total_dim();
        if total > MAX_TOTAL_DIM {
            return Err(CoreError::DimensionLimit(total));
        }
        Ok(layout)
    }

    pub fn single(label: &str, dim: usize) -> Result<Self> {
        Self::new(vec![(label, dim)])
    }

    pub fn empty() -> Self {
        SystemLayout { labels: vec![], dims: vec![] }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn contains(&self, label: &str) -> bool {
        self.position(label).is_some()
    }

    pub fn dim_of(&self, label: &str) -> Result<usize> {
        self.position(label)
            .map(|i| self.dims[i])
            .ok_or_else(|| CoreError::UnknownLabel(label.to_string()))
    }

    /// Concatenation; fails on label collision or dimension overflow.
    pub fn concat(&self, other: &SystemLayout) -> Result<SystemLayout> {
        let mut parts: Vec<(String, usize)> = self
            .labels
            .iter()
            .cloned()
            .zip(self.dims.iter().copied())
            .collect();
        parts.extend(other.labels.iter().cloned().zip(other.dims.iter().copied()));
        SystemLayout::new(parts)
    }

    /// Sub-layout of the given labels, kept in this layout's order.
    pub fn restricted_to(&self, keep: &[String]) -> Result<SystemLayout> {
        for l in keep {
            if !self.contains(l) {
                return Err(CoreError::UnknownLabel(l.clone()));
            }
        }
        let parts: Vec<(String, usize)> = self
            .labels
            .iter()
            .zip(&self.dims)
            .filter(|(l, _)| keep.contains(l))
            .map(|(l, d)| (l.clone(), *d))
            .collect();
        SystemLayout::new(parts)
    }

    /// Row-major strides in layout order.
    pub fn strides(&self) -> Vec<usize> {
        let n = self.labels.len();
        let mut s = vec![1usize; n];
        for i in (0..n.saturating_sub(1)).rev() {
            s[i] = s[i + 1] * self.dims[i + 1];
        }
        s
    }

    /// Decompose a flat index into per-subsystem digits.
    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0usize; self.labels.len()];
        for i in (0..self.labels.len()).rev() {
            out[i] = index % self.dims[i];
            index /= self.dims[i];
        }
        out
    }

    /// Recompose per-subsystem digits into a flat index.
    pub fn flatten(&self, digits: &[usize]) -> usize {
        debug_assert_eq!(digits.len(), self.labels.len());
        let mut idx = 0usize;
        for (i, &d) in digits.iter().enumerate() {
            debug_assert!(d < self.dims[i]);
            idx = idx * self.dims[i] + d;
        }
        idx
    }

    /// Table mapping flat indices of `self` to flat indices of `target`,
    /// where `target` holds the same labels in a different order.
    pub fn permutation_to(&self, target: &SystemLayout) -> Result<Vec<usize>> {
        if self.len() != target.len() {
            return Err(CoreError::DimensionMismatch(
                "layouts have different label counts".into(),
            ));
        }
        let mut positions = Vec::with_capacity(target.len());
        for (l, d) in target.labels.iter().zip(&target.dims) {
            let p = self
                .position(l)
                .ok_or_else(|| CoreError::UnknownLabel(l.clone()))?;
            if self.dims[p] != *d {
                return Err(CoreError::DimensionMismatch(format!(
                    "label `{l}` has dim {} vs {}",
                    self.dims[p], d
                )));
            }
            positions.push(p);
        }
        let total = self.total_dim();
        let mut table = vec![0usize; total];
        for idx in 0..total {
            let digits = self.digits(idx);
            let mut tdigits = Vec::with_capacity(target.len());
            for &p in &positions {
                tdigits.push(digits[p]);
            }
            table[idx] = target.flatten(&tdigits);
        }
        Ok(table)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digits_roundtrip() {
        let l = SystemLayout::new(vec![("A", 2), ("B", 3), ("C", 2)]).unwrap();
        for i in 0..l.total_dim() {
            assert_eq!(l.flatten(&l.digits(i)), i);
        }
    }

    #[test]
    fn rejects_duplicates_and_overflow() {
        assert!(SystemLayout::new(vec![("A", 2), ("A", 2)]).is_err());
        assert!(SystemLayout::new(vec![("A", 4096), ("B", 2)]).is_err());
    }

    #[test]
    fn permutation_table() {
        let l = SystemLayout::new(vec![("A", 2), ("B", 3)]).unwrap();
        let t = SystemLayout::new(vec![("B", 3), ("A", 2)]).unwrap();
        let table = l.permutation_to(&t).unwrap();
        // index (a,b) = a*3+b maps to (b,a) = b*2+a
        for a in 0..2 {
            for b in 0..3 {
                assert_eq!(table[a * 3 + b], b * 2 + a);
            }
        }
    }
}
