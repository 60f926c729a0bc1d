//! Sparse exact storage for real symmetric tensors.
//!
//! A symmetric tensor of order `p` over dimension `N` is determined by its
//! values on ascending multi-indices, so only those are stored. Lookups sort
//! the requested index; absent indices read as zero.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::combinatorics::{for_each_distinct_permutation, sorted_multi_indices};
use crate::error::{Error, Result};
use crate::rational::Rational;

/// Exact symmetric tensor with sparse canonical-index storage.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymmetricTensor {
    order: usize,
    dimension: u32,
    entries: BTreeMap<Vec<u32>, Rational>,
}

impl SymmetricTensor {
    /// The zero tensor of the given shape.
    pub fn zero(order: usize, dimension: u32) -> Self {
        SymmetricTensor { order, dimension, entries: BTreeMap::new() }
    }

    /// Builds a tensor from `(multi-index, value)` pairs. Indices may come in
    /// any component order; each is canonicalized by sorting. Two entries
    /// canonicalizing to the same index are rejected rather than summed, and
    /// zero values are dropped.
    pub fn from_entries<I>(order: usize, dimension: u32, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, Rational)>,
    {
        let mut tensor = SymmetricTensor::zero(order, dimension);
        for (index, value) in entries {
            let key = tensor.canonical_index(&index)?;
            if value.is_zero() {
                continue;
            }
            if tensor.entries.insert(key.clone(), value).is_some() {
                return Err(Error::InvalidInput(format!(
                    "duplicate entry for index {key:?} after sorting"
                )));
            }
        }
        Ok(tensor)
    }

    /// Symmetrizes an arbitrary dense array: the result at a multi-index is
    /// the average of `source` over all arrangements of that index. Symmetric
    /// input is reproduced exactly, and the operation is idempotent.
    pub fn from_dense_symmetrization<F>(order: usize, dimension: u32, mut source: F) -> Self
    where
        F: FnMut(&[u32]) -> Rational,
    {
        let mut entries = BTreeMap::new();
        for index in sorted_multi_indices(dimension, order) {
            let mut sum = Rational::zero();
            let mut arrangements = 0u64;
            for_each_distinct_permutation(&index, |perm| {
                sum += source(perm);
                arrangements += 1;
            });
            let value = sum / Rational::from_integer(arrangements.into());
            if !value.is_zero() {
                entries.insert(index, value);
            }
        }
        SymmetricTensor { order, dimension, entries }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dimension(&self) -> u32 {
        self.dimension
    }

    /// Number of stored (canonical, nonzero) entries.
    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    /// Value at `index`, in any component order; zero if absent.
    pub fn get(&self, index: &[u32]) -> Result<Rational> {
        let key = self.canonical_index(index)?;
        Ok(self.entries.get(&key).cloned().unwrap_or_else(Rational::zero))
    }

    /// Stored entries as `(ascending index, nonzero value)` pairs in
    /// lexicographic index order.
    pub fn entries(&self) -> impl Iterator<Item = (&[u32], &Rational)> {
        self.entries.iter().map(|(k, v)| (k.as_slice(), v))
    }

    /// The tensor scaled entrywise by `factor`.
    pub fn scaled(&self, factor: &Rational) -> Self {
        if factor.is_zero() {
            return SymmetricTensor::zero(self.order, self.dimension);
        }
        let entries = self
            .entries
            .iter()
            .map(|(k, v)| (k.clone(), v * factor))
            .collect();
        SymmetricTensor { order: self.order, dimension: self.dimension, entries }
    }

    /// Returns a copy with the entry at `index` (canonicalized) replaced by
    /// `value`; a zero value removes the entry.
    pub fn with_entry(&self, index: &[u32], value: Rational) -> Result<Self> {
        let key = self.canonical_index(index)?;
        let mut tensor = self.clone();
        if value.is_zero() {
            tensor.entries.remove(&key);
        } else {
            tensor.entries.insert(key, value);
        }
        Ok(tensor)
    }

    /// Exact trace of the k-th matrix power. Defined only for order-2 tensors;
    /// `k = 0` yields the dimension (trace of the identity).
    pub fn matrix_power_trace(&self, k: usize) -> Result<Rational> {
        if self.order != 2 {
            return Err(Error::NotAMatrix { order: self.order });
        }
        let n = self.dimension as usize;
        if k == 0 {
            return Ok(Rational::from_integer(self.dimension.into()));
        }
        let base = self.dense_matrix();
        let mut power = base.clone();
        for _ in 1..k {
            power = mat_mul(&power, &base);
        }
        let mut trace = Rational::zero();
        for (i, row) in power.iter().enumerate().take(n) {
            trace += &row[i];
        }
        Ok(trace)
    }

    fn dense_matrix(&self) -> Vec<Vec<Rational>> {
        let n = self.dimension as usize;
        let mut m = vec![vec![Rational::zero(); n]; n];
        for (index, value) in &self.entries {
            let (i, j) = (index[0] as usize - 1, index[1] as usize - 1);
            m[i][j] = value.clone();
            m[j][i] = value.clone();
        }
        m
    }

    fn canonical_index(&self, index: &[u32]) -> Result<Vec<u32>> {
        if index.len() != self.order {
            return Err(Error::IndexLength { expected: self.order, got: index.len() });
        }
        for &component in index {
            if component == 0 || component > self.dimension {
                return Err(Error::IndexOutOfRange { component, dimension: self.dimension });
            }
        }
        let mut key = index.to_vec();
        key.sort_unstable();
        Ok(key)
    }
}

fn mat_mul(a: &[Vec<Rational>], b: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let n = a.len();
    let mut out = vec![vec![Rational::zero(); n]; n];
    for i in 0..n {
        for (k, aik) in a[i].iter().enumerate() {
            if aik.is_zero() {
                continue;
            }
            for j in 0..n {
                if !b[k][j].is_zero() {
                    out[i][j] += aik * &b[k][j];
                }
            }
        }
    }
    out
}
