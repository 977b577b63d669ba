use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::rational::{bit_length, from_f64, ser, to_f64};
use crate::numerics::{ComplexMatrix, Rational};

/// Brascamp-Lieb datum: real maps `B_i : ℝⁿ → ℝ^{n_i}` and exponents `p_i ≥ 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BLDatum {
    pub n: usize,
    pub maps: Vec<Vec<Vec<f64>>>,
    #[serde(serialize_with = "ser::vec")]
    pub p: Vec<Rational>,
}

impl BLDatum {
    pub fn new(n: usize, maps: Vec<Vec<Vec<f64>>>, p: Vec<Rational>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Shape("ambient dimension must be positive".into()));
        }
        if maps.len() != p.len() || maps.is_empty() {
            return Err(Error::Shape(format!(
                "{} maps but {} exponents",
                maps.len(),
                p.len()
            )));
        }
        for (i, b) in maps.iter().enumerate() {
            if b.is_empty() || b.iter().any(|row| row.len() != n) {
                return Err(Error::Shape(format!(
                    "map {} must have shape n_i × {n}",
                    i + 1
                )));
            }
            if b.iter().flatten().any(|x| !x.is_finite()) {
                return Err(Error::InvalidEntry(format!(
                    "map {} has a non-finite entry",
                    i + 1
                )));
            }
        }
        if let Some(i) = p.iter().position(|x| x.is_negative()) {
            return Err(Error::InvalidEntry(format!(
                "exponent p_{} is negative",
                i + 1
            )));
        }
        Ok(Self { n, maps, p })
    }

    pub fn m(&self) -> usize {
        self.maps.len()
    }

    /// Target dimension `n_i` of each map.
    pub fn dims(&self) -> Vec<usize> {
        self.maps.iter().map(Vec::len).collect()
    }

    pub fn p_f64(&self) -> Vec<f64> {
        self.p.iter().map(to_f64).collect()
    }

    pub(crate) fn matrix(&self, i: usize) -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&self.maps[i]).expect("validated shape")
    }

    pub(crate) fn matrices(&self) -> Vec<ComplexMatrix> {
        (0..self.m()).map(|i| self.matrix(i)).collect()
    }

    /// The datum restricted to the maps with `p_i > 0`, with their original indices.
    pub fn positive_part(&self) -> (Self, Vec<usize>) {
        let keep: Vec<usize> = (0..self.m()).filter(|&i| !self.p[i].is_zero()).collect();
        (
            Self {
                n: self.n,
                maps: keep.iter().map(|&i| self.maps[i].clone()).collect(),
                p: keep.iter().map(|&i| self.p[i].clone()).collect(),
            },
            keep,
        )
    }

    /// Maximum bit length over the exponents and the exact rationalization of the map entries.
    pub fn bit_complexity(&self) -> u64 {
        let maps = self
            .maps
            .iter()
            .flatten()
            .flatten()
            .filter_map(|&x| from_f64(x).ok())
            .map(|r| bit_length(&r));
        maps.chain(self.p.iter().map(bit_length))
            .max()
            .unwrap_or(1)
            .max(1)
    }

    /// `Σ p_i n_i`, exactly.
    pub fn weighted_dimension(&self) -> Rational {
        self.p
            .iter()
            .zip(self.dims())
            .map(|(p, d)| p * Rational::from_integer(d.into()))
            .sum()
    }
}

/// Distances of a datum from geometric position.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeometricityReport {
    /// `‖Σ p_i B_iᵀB_i − I_n‖_F`.
    pub isotropy_residual: f64,
    /// `‖B_i B_iᵀ − I_{n_i}‖_F` per map.
    pub projection_residuals: Vec<f64>,
    pub geometric: bool,
}

pub(crate) fn isotropy_matrix(maps: &[ComplexMatrix], p: &[f64], n: usize) -> ComplexMatrix {
    let mut acc = ComplexMatrix::zeros(n, n);
    for (b, &pi) in maps.iter().zip(p) {
        acc = &acc + &b.gram_right().scale_real(pi);
    }
    acc.symmetrize()
}

pub(crate) fn geometricity(
    maps: &[ComplexMatrix],
    p: &[f64],
    n: usize,
    tol: f64,
) -> GeometricityReport {
    let iso = (&isotropy_matrix(maps, p, n) - &ComplexMatrix::identity(n)).frobenius_norm();
    let proj: Vec<f64> = maps
        .iter()
        .map(|b| (&b.gram_left() - &ComplexMatrix::identity(b.rows())).frobenius_norm())
        .collect();
    GeometricityReport {
        geometric: iso <= tol && proj.iter().all(|&r| r <= tol),
        isotropy_residual: iso,
        projection_residuals: proj,
    }
}

/// Whether `Σ p_i B_iᵀB_i = I_n` and `B_i B_iᵀ = I_{n_i}` hold to within `tol`.
pub fn is_geometric(datum: &BLDatum, tol: f64) -> GeometricityReport {
    geometricity(&datum.matrices(), &datum.p_f64(), datum.n, tol)
}
