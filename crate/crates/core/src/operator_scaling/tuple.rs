use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::rational::{bit_length, from_f64};
use crate::numerics::{ComplexMatrix, HermitianPsd};

/// Tuple `(A_1, …, A_m)` of `n × n` complex matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixTuple {
    mats: Vec<ComplexMatrix>,
    bit_complexity: Option<u64>,
}

impl MatrixTuple {
    pub fn new(mats: Vec<ComplexMatrix>) -> Result<Self> {
        let Some(first) = mats.first() else {
            return Err(Error::Shape(
                "tuple must contain at least one matrix".into(),
            ));
        };
        let n = first.rows();
        if n == 0 || mats.iter().any(|a| a.rows() != n || a.cols() != n) {
            return Err(Error::Shape(format!("all matrices must be {n}x{n}")));
        }
        if mats
            .iter()
            .flat_map(|a| a.as_slice())
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::InvalidEntry("non-finite matrix entry".into()));
        }
        Ok(Self {
            mats,
            bit_complexity: None,
        })
    }

    pub fn from_real(mats: &[Vec<Vec<f64>>]) -> Result<Self> {
        Self::new(
            mats.iter()
                .map(|rows| ComplexMatrix::from_real_rows(rows))
                .collect::<Result<Vec<_>>>()?,
        )
    }

    /// Records the bit complexity of exactly-specified input entries.
    pub fn with_bit_complexity(mut self, b: u64) -> Self {
        self.bit_complexity = Some(b);
        self
    }

    pub fn m(&self) -> usize {
        self.mats.len()
    }

    pub fn n(&self) -> usize {
        self.mats[0].rows()
    }

    pub fn matrices(&self) -> &[ComplexMatrix] {
        &self.mats
    }

    /// Bit complexity of the entries: the recorded value, or the exact
    /// rationalization of every real and imaginary part.
    pub fn bit_complexity(&self) -> u64 {
        self.bit_complexity.unwrap_or_else(|| {
            self.mats
                .iter()
                .flat_map(|a| a.as_slice())
                .flat_map(|z| [z.re, z.im])
                .filter_map(|x| from_f64(x).ok())
                .map(|r| bit_length(&r))
                .max()
                .unwrap_or(1)
                .max(1)
        })
    }

    /// `Σ A_i A_i†`.
    pub fn left_gram(&self) -> ComplexMatrix {
        sum_gram(&self.mats, true)
    }

    /// `Σ A_i† A_i`.
    pub fn right_gram(&self) -> ComplexMatrix {
        sum_gram(&self.mats, false)
    }

    pub fn norm_sq(&self) -> f64 {
        self.mats.iter().map(ComplexMatrix::frobenius_norm_sq).sum()
    }

    /// `(B, C)·A = (B A_i C)_i`.
    pub fn act(&self, b: &ComplexMatrix, c: &ComplexMatrix) -> Self {
        Self {
            mats: self.mats.iter().map(|a| &(b * a) * c).collect(),
            bit_complexity: None,
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        Self {
            mats: self.mats.iter().map(|a| a.scale_real(s)).collect(),
            bit_complexity: None,
        }
    }

    /// Kraus map `T_A(X) = Σ A_i X A_i†`.
    pub fn kraus_map(&self, x: &ComplexMatrix) -> ComplexMatrix {
        self.mats
            .iter()
            .map(|a| &(a * x) * &a.adjoint())
            .reduce(|s, t| &s + &t)
            .expect("non-empty tuple")
    }

    /// Dual map `T_A*(X) = Σ A_i† X A_i`.
    pub fn kraus_dual(&self, x: &ComplexMatrix) -> ComplexMatrix {
        self.mats
            .iter()
            .map(|a| &(&a.adjoint() * x) * a)
            .reduce(|s, t| &s + &t)
            .expect("non-empty tuple")
    }
}

pub(crate) fn sum_gram(mats: &[ComplexMatrix], left: bool) -> ComplexMatrix {
    let n = mats[0].rows();
    let mut acc = ComplexMatrix::zeros(n, n);
    for a in mats {
        let g = if left { a.gram_left() } else { a.gram_right() };
        acc = &acc + &g;
    }
    acc.symmetrize()
}

pub(crate) fn psd(m: ComplexMatrix) -> HermitianPsd {
    HermitianPsd::from_trusted(m)
}

/// `‖Σ A_i A_i† − I‖_F² + ‖Σ A_i† A_i − I‖_F²`.
pub fn ds_op(a: &MatrixTuple) -> f64 {
    let id = ComplexMatrix::identity(a.n());
    (&a.left_gram() - &id).frobenius_norm_sq() + (&a.right_gram() - &id).frobenius_norm_sq()
}

/// `E_{ij}` as a complex matrix (0-based indices).
pub fn unit_matrix(n: usize, i: usize, j: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(n, n);
    m[(i, j)] = Complex64::new(1.0, 0.0);
    m
}
