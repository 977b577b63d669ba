//! Moment maps: gradients of `g ↦ ‖g·v‖²` at the identity.
//!
//! Each map comes with the norm function along a one-parameter direction so
//! that the gradient can be checked against finite differences.

use crate::invariant_core::torus::{TorusVector, WeightSystem};
use crate::numerics::{expm_hermitian, ComplexMatrix};

/// `μ(v) = 2 Σ |v_j|² ω^(j)`.
pub fn torus_moment_map(ws: &WeightSystem, v: &TorusVector) -> Vec<f64> {
    let mut mu = vec![0.0; ws.n];
    for (w, z) in ws.omegas.iter().zip(&v.coefficients) {
        let mass = 2.0 * z.norm_sqr();
        for (m, &wk) in mu.iter_mut().zip(w) {
            *m += mass * wk as f64;
        }
    }
    mu
}

/// `‖exp(s·b)·v‖² = Σ |v_j|² exp(2s⟨b, ω_j⟩)`.
pub fn torus_norm_along(ws: &WeightSystem, v: &TorusVector, b: &[f64], s: f64) -> f64 {
    ws.omegas
        .iter()
        .zip(&v.coefficients)
        .map(|(w, z)| {
            let pairing: f64 = w.iter().zip(b).map(|(&wk, &bk)| wk as f64 * bk).sum();
            z.norm_sqr() * (2.0 * s * pairing).exp()
        })
        .sum()
}

/// Moment map of the determinant-one diagonal action on a non-negative matrix
/// viewed through `v_ij = √A_ij`: the pair `(2(r − avg), 2(c − avg))` with
/// `r`, `c` the row and column sums and `avg = ΣA / n`.
pub fn matrix_moment_map(a: &[Vec<f64>]) -> (Vec<f64>, Vec<f64>) {
    let n = a.len();
    let m = a.first().map_or(0, Vec::len);
    let rows: Vec<f64> = a.iter().map(|r| r.iter().sum()).collect();
    let cols: Vec<f64> = (0..m).map(|j| a.iter().map(|r| r[j]).sum()).collect();
    let total: f64 = rows.iter().sum();
    let row_avg = total / n as f64;
    let col_avg = total / m as f64;
    (
        rows.iter().map(|r| 2.0 * (r - row_avg)).collect(),
        cols.iter().map(|c| 2.0 * (c - col_avg)).collect(),
    )
}

/// `Σ_ij A_ij exp(2s(x_i + y_j))`.
pub fn matrix_norm_along(a: &[Vec<f64>], x: &[f64], y: &[f64], s: f64) -> f64 {
    a.iter()
        .zip(x)
        .map(|(row, &xi)| {
            row.iter()
                .zip(y)
                .map(|(&aij, &yj)| aij * (2.0 * s * (xi + yj)).exp())
                .sum::<f64>()
        })
        .sum()
}

/// Moment map of `(B, C)·A_i = B A_i Cᵀ` restricted to `SL_n × SL_n`:
/// `(2(ΣA_iA_i† − ‖A‖²/n I), 2((ΣA_i†A_i)ᵀ − ‖A‖²/n I))`.
///
/// The derivative of the squared norm along Hermitian traceless `(X, Y)` is
/// `tr(P₁X) + tr(P₂Y)`.
pub fn left_right_moment_map(mats: &[ComplexMatrix]) -> (ComplexMatrix, ComplexMatrix) {
    let n = mats[0].rows();
    let mut left = ComplexMatrix::zeros(n, n);
    let mut right = ComplexMatrix::zeros(n, n);
    for a in mats {
        left = &left + &a.gram_left();
        right = &right + &a.gram_right();
    }
    let norm_sq = left.trace().re;
    let shift = ComplexMatrix::identity(n).scale_real(norm_sq / n as f64);
    (
        (&left - &shift).scale_real(2.0),
        (&right.transpose() - &shift).scale_real(2.0),
    )
}

/// `Σ ‖exp(sX) A_i exp(sY)ᵀ‖²` for Hermitian `X`, `Y`.
pub fn left_right_norm_along(
    mats: &[ComplexMatrix],
    x: &ComplexMatrix,
    y: &ComplexMatrix,
    s: f64,
) -> f64 {
    let b = expm_hermitian(&x.scale_real(s));
    let c = expm_hermitian(&y.scale_real(s)).transpose();
    mats.iter()
        .map(|a| (&(&b * a) * &c).frobenius_norm_sq())
        .sum()
}
