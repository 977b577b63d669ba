//! Randomized zero test for `det(Σ D_i ⊗ A_i)`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::invariant_core::potential::{
    left_right_block, log_hadamard_ratio, sample_d_matrices, DEGENERACY_THRESHOLD,
};
use crate::numerics::ComplexMatrix;

use super::tuple::MatrixTuple;

/// Outcome of [`detpoly_oracle`].
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum DetPolyVerdict {
    /// `det(Σ D_i ⊗ A_i) ≠ 0` for the recorded `D`.
    Nonzero {
        d: Vec<ComplexMatrix>,
        hadamard_ratio: f64,
        trial: usize,
    },
    /// Every trial produced a numerically vanishing determinant.
    LikelyZero { trials: usize },
}

impl DetPolyVerdict {
    pub fn is_nonzero(&self) -> bool {
        matches!(self, Self::Nonzero { .. })
    }
}

/// Samples integer `k × k` matrices `D_i` with entries in `{−n², …, n²}` and
/// reports the first whose block matrix has Hadamard ratio
/// `|det M| / ∏‖col_j M‖` above `1e-10`.
///
/// Trial `t` draws from its own ChaCha stream, so results do not depend on
/// evaluation order.
pub fn detpoly_oracle(
    a: &MatrixTuple,
    k: usize,
    trials: usize,
    seed: u64,
) -> Result<DetPolyVerdict> {
    let n = a.n();
    if k == 0 || k > n.saturating_sub(1).max(1) {
        return Err(Error::PreconditionViolated(format!(
            "block size k = {k} must lie in 1..={}",
            n.saturating_sub(1).max(1)
        )));
    }
    if trials == 0 {
        return Err(Error::PreconditionViolated(
            "at least one trial is required".into(),
        ));
    }
    for trial in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(trial as u64);
        let d = sample_d_matrices(&mut rng, a.m(), k, n);
        let ratio = log_hadamard_ratio(&left_right_block(&d, a.matrices())).exp();
        if ratio.is_finite() && ratio > DEGENERACY_THRESHOLD {
            return Ok(DetPolyVerdict::Nonzero {
                d,
                hadamard_ratio: ratio,
                trial,
            });
        }
    }
    Ok(DetPolyVerdict::LikelyZero { trials })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator_scaling::tuple::unit_matrix;

    #[test]
    fn identity_tuple_is_nonzero() {
        let a = MatrixTuple::new(vec![ComplexMatrix::identity(3)]).unwrap();
        assert!(detpoly_oracle(&a, 1, 5, 7).unwrap().is_nonzero());
    }

    #[test]
    fn shrunk_tuple_is_zero() {
        let a = MatrixTuple::new(vec![
            unit_matrix(3, 0, 0),
            unit_matrix(3, 0, 1),
            unit_matrix(3, 1, 2),
        ])
        .unwrap();
        for k in 1..=2 {
            assert_eq!(
                detpoly_oracle(&a, k, 10, 3).unwrap(),
                DetPolyVerdict::LikelyZero { trials: 10 }
            );
        }
    }

    #[test]
    fn cross_product_needs_k_two() {
        let a = MatrixTuple::from_real(&[
            vec![
                vec![0.0, 0.0, 0.0],
                vec![0.0, 0.0, -1.0],
                vec![0.0, 1.0, 0.0],
            ],
            vec![
                vec![0.0, 0.0, 1.0],
                vec![0.0, 0.0, 0.0],
                vec![-1.0, 0.0, 0.0],
            ],
            vec![
                vec![0.0, -1.0, 0.0],
                vec![1.0, 0.0, 0.0],
                vec![0.0, 0.0, 0.0],
            ],
        ])
        .unwrap();
        assert!(!detpoly_oracle(&a, 1, 20, 1).unwrap().is_nonzero());
        assert!(detpoly_oracle(&a, 2, 20, 1).unwrap().is_nonzero());
    }

    #[test]
    fn rejects_bad_k() {
        let a = MatrixTuple::new(vec![ComplexMatrix::identity(3)]).unwrap();
        assert!(detpoly_oracle(&a, 3, 1, 0).is_err());
        assert!(detpoly_oracle(&a, 0, 1, 0).is_err());
    }
}
