//! Tuples of order-d complex tensors and their flattenings.

use num_complex::Complex64;

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

/// A tuple `(A_1, ..., A_m)` of tensors of shape `n_1 × ... × n_d`.
///
/// Entries are stored row-major with the tuple index slowest, then axis 1,
/// and so on, so the last axis varies fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorTuple {
    m: usize,
    shape: Vec<usize>,
    data: Vec<Complex64>,
}

impl TensorTuple {
    pub fn new(m: usize, shape: Vec<usize>, data: Vec<Complex64>) -> Result<Self> {
        if m == 0 || shape.is_empty() || shape.contains(&0) {
            return Err(Error::Shape(format!(
                "tensor tuple needs m ≥ 1 and positive dimensions, got m = {m}, shape {shape:?}"
            )));
        }
        let expected = m * shape.iter().product::<usize>();
        if data.len() != expected {
            return Err(Error::Shape(format!(
                "expected {expected} entries for m = {m}, shape {shape:?}, got {}",
                data.len()
            )));
        }
        Ok(Self { m, shape, data })
    }

    pub fn zeros(m: usize, shape: Vec<usize>) -> Result<Self> {
        let len = m * shape.iter().product::<usize>();
        Self::new(m, shape, vec![Complex64::new(0.0, 0.0); len])
    }

    /// Single tensor `v_1 ⊗ ... ⊗ v_d`.
    pub fn product_state(factors: &[Vec<Complex64>]) -> Result<Self> {
        let shape: Vec<usize> = factors.iter().map(Vec::len).collect();
        let mut t = Self::zeros(1, shape.clone())?;
        for idx in 0..t.data.len() {
            let multi = t.multi_index(idx);
            t.data[idx] = multi.1.iter().zip(factors).map(|(&j, f)| f[j]).product();
        }
        Ok(t)
    }

    /// 0/1 tensor with ones on the given support (single tensor).
    pub fn from_support(shape: Vec<usize>, support: &[Vec<usize>]) -> Result<Self> {
        let mut t = Self::zeros(1, shape)?;
        for s in support {
            let idx = t.linear_index(0, s)?;
            t.data[idx] = Complex64::new(1.0, 0.0);
        }
        Ok(t)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn order(&self) -> usize {
        self.shape.len()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn tensor_len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn linear_index(&self, tuple: usize, idx: &[usize]) -> Result<usize> {
        if tuple >= self.m
            || idx.len() != self.shape.len()
            || idx.iter().zip(&self.shape).any(|(&i, &n)| i >= n)
        {
            return Err(Error::Shape(format!(
                "index {idx:?} out of range for shape {:?}",
                self.shape
            )));
        }
        let mut lin = tuple;
        for (&i, &n) in idx.iter().zip(&self.shape) {
            lin = lin * n + i;
        }
        Ok(lin)
    }

    /// Inverse of [`linear_index`](Self::linear_index).
    pub fn multi_index(&self, mut lin: usize) -> (usize, Vec<usize>) {
        let mut idx = vec![0; self.shape.len()];
        for (slot, &n) in idx.iter_mut().zip(&self.shape).rev() {
            *slot = lin % n;
            lin /= n;
        }
        (lin, idx)
    }

    pub fn get(&self, tuple: usize, idx: &[usize]) -> Complex64 {
        self.data[self.linear_index(tuple, idx).expect("index in range")]
    }

    pub fn norm_sq(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn scale_real(&self, s: f64) -> Self {
        Self {
            m: self.m,
            shape: self.shape.clone(),
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    /// Support tuples `(j_1..j_d)` over which some tensor in the tuple is nonzero.
    pub fn support(&self, tol: f64) -> Vec<Vec<usize>> {
        let per = self.tensor_len();
        let mut seen = vec![false; per];
        for (lin, z) in self.data.iter().enumerate() {
            if z.norm() > tol {
                seen[lin % per] = true;
            }
        }
        seen.iter()
            .enumerate()
            .filter(|(_, &s)| s)
            .map(|(lin, _)| self.multi_index(lin).1)
            .collect()
    }

    /// Flattening along `axis` (0-indexed): an `n_axis × (m · ∏_{j≠axis} n_j)` matrix.
    ///
    /// Column order is lexicographic in (tuple index, remaining axes in order).
    pub fn flatten(&self, axis: usize) -> ComplexMatrix {
        assert!(axis < self.order(), "axis {axis} out of range");
        let n_axis = self.shape[axis];
        let inner: usize = self.shape[axis + 1..].iter().product();
        let outer = self.data.len() / (n_axis * inner);
        let cols = outer * inner;
        let mut out = ComplexMatrix::zeros(n_axis, cols);
        for o in 0..outer {
            for r in 0..n_axis {
                let base = (o * n_axis + r) * inner;
                for i in 0..inner {
                    out[(r, o * inner + i)] = self.data[base + i];
                }
            }
        }
        out
    }

    /// Inverse of [`flatten`](Self::flatten) for the same shape.
    pub fn unflatten(&self, axis: usize, mat: &ComplexMatrix) -> Self {
        let n_axis = self.shape[axis];
        let inner: usize = self.shape[axis + 1..].iter().product();
        let outer = self.data.len() / (n_axis * inner);
        assert_eq!(
            (mat.rows(), mat.cols()),
            (n_axis, outer * inner),
            "flattening shape mismatch"
        );
        let mut data = self.data.clone();
        for o in 0..outer {
            for r in 0..n_axis {
                let base = (o * n_axis + r) * inner;
                for i in 0..inner {
                    data[base + i] = mat[(r, o * inner + i)];
                }
            }
        }
        Self {
            m: self.m,
            shape: self.shape.clone(),
            data,
        }
    }

    /// Applies `g` on `axis`: `flatten(g·A, axis) = g · flatten(A, axis)`.
    pub fn apply_axis(&self, axis: usize, g: &ComplexMatrix) -> Self {
        let flat = self.flatten(axis);
        self.unflatten(axis, &(g * &flat))
    }

    /// Applies `g_1 ⊗ ... ⊗ g_d` to every tensor in the tuple.
    pub fn apply_local(&self, gs: &[ComplexMatrix]) -> Self {
        gs.iter()
            .enumerate()
            .fold(self.clone(), |acc, (axis, g)| acc.apply_axis(axis, g))
    }
}
