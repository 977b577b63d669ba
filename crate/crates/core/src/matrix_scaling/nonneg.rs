use crate::error::{Error, Result};
use crate::numerics::rational::{from_f64, max_bit_length, to_f64, Rational};
use num_traits::{Signed, Zero};

/// Square non-negative matrix with an exact view and a float view.
#[derive(Debug, Clone, PartialEq)]
pub struct NonNegMatrix {
    exact: Vec<Vec<Rational>>,
    float: Vec<Vec<f64>>,
}

impl NonNegMatrix {
    pub fn from_rationals(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::Shape("matrix must be non-empty".into()));
        }
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Shape(format!("expected a square {n}x{n} matrix")));
        }
        for (i, row) in rows.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                if v.is_negative() {
                    return Err(Error::InvalidEntry(format!(
                        "entry ({}, {}) = {v} is negative",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        let float = rows
            .iter()
            .map(|r| r.iter().map(to_f64).collect())
            .collect();
        Ok(Self { exact: rows, float })
    }

    /// Exact rationalization of double entries.
    pub fn from_f64_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let exact = rows
            .iter()
            .map(|r| r.iter().map(|&x| from_f64(x)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Self::from_rationals(exact)
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Result<Self> {
        Self::from_rationals(
            rows.iter()
                .map(|r| {
                    r.iter()
                        .map(|&x| Rational::from_integer(x.into()))
                        .collect()
                })
                .collect(),
        )
    }

    pub fn identity(n: usize) -> Self {
        Self::from_i64_rows(
            &(0..n)
                .map(|i| (0..n).map(|j| (i == j) as i64).collect())
                .collect::<Vec<_>>(),
        )
        .expect("identity is valid")
    }

    pub fn n(&self) -> usize {
        self.exact.len()
    }

    pub fn exact_rows(&self) -> &[Vec<Rational>] {
        &self.exact
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.float
    }

    /// Maximum bit length of numerators and denominators.
    pub fn bit_complexity(&self) -> u64 {
        max_bit_length(self.exact.iter().flatten())
    }

    pub fn is_positive_at(&self, i: usize, j: usize) -> bool {
        !self.exact[i][j].is_zero()
    }

    /// Nonzero positions `(i, j)`.
    pub fn support(&self) -> Vec<(usize, usize)> {
        let n = self.n();
        (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|&(i, j)| self.is_positive_at(i, j))
            .collect()
    }

    pub fn row_sums(&self) -> Vec<f64> {
        row_sums(&self.float)
    }

    pub fn col_sums(&self) -> Vec<f64> {
        col_sums(&self.float)
    }
}

pub(crate) fn row_sums(a: &[Vec<f64>]) -> Vec<f64> {
    a.iter().map(|r| r.iter().sum()).collect()
}

pub(crate) fn col_sums(a: &[Vec<f64>]) -> Vec<f64> {
    let n = a.first().map_or(0, Vec::len);
    (0..n).map(|j| a.iter().map(|r| r[j]).sum()).collect()
}

/// `Σ (r_i − 1)² + Σ (c_j − 1)²` for float rows.
pub fn ds_rows(a: &[Vec<f64>]) -> f64 {
    let dev = |s: Vec<f64>| s.iter().map(|x| (x - 1.0) * (x - 1.0)).sum::<f64>();
    dev(row_sums(a)) + dev(col_sums(a))
}

/// Distance to doubly stochastic.
pub fn ds(a: &NonNegMatrix) -> f64 {
    ds_rows(a.rows())
}
