//! Forster's radial isotropic position.

use num_traits::{One, Zero};
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::invariant_core::bounds::matrix_budget;
use crate::numerics::rational::{bit_length, from_f64};
use crate::numerics::{inv_sqrt_psd, ComplexMatrix, HermitianPsd, Rational};
use crate::report::ScalingOptions;

/// Above this many vectors, general position is checked on sampled subsets.
pub const EXACT_GENERAL_POSITION_LIMIT: usize = 12;
/// Number of sampled subsets when the exact check is skipped.
pub const SAMPLED_SUBSETS: usize = 500;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ForsterScaling {
    pub a: Vec<Vec<f64>>,
    /// `‖Σ (n/m) (A v_i)(A v_i)ᵀ / ‖A v_i‖² − I‖_F`.
    pub residual: f64,
    pub iterations: usize,
    pub budget: u64,
    pub converged: bool,
}

fn rational_det(mut m: Vec<Vec<Rational>>) -> Rational {
    let n = m.len();
    let mut det = Rational::one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return Rational::zero();
        };
        if piv != col {
            m.swap(piv, col);
            det = -det;
        }
        det *= &m[col][col];
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let f = &m[r][col] / &m[col][col];
            for k in col..n {
                let v = &f * &m[col][k];
                m[r][k] -= v;
            }
        }
    }
    det
}

fn combinations(m: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    if k > m {
        return out;
    }
    loop {
        out.push(cur.clone());
        let Some(i) = (0..k).rev().find(|&i| cur[i] < m - k + i) else {
            return out;
        };
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

fn subset_matrix(vectors: &[Vec<f64>], subset: &[usize]) -> ComplexMatrix {
    let rows: Vec<Vec<f64>> = subset.iter().map(|&i| vectors[i].clone()).collect();
    ComplexMatrix::from_real_rows(&rows).expect("equal lengths")
}

/// Returns a linearly dependent `n`-subset, if one is found.
///
/// Exact over the rationals for at most [`EXACT_GENERAL_POSITION_LIMIT`]
/// vectors; otherwise [`SAMPLED_SUBSETS`] seeded subsets are tested numerically.
pub fn general_position_violation(vectors: &[Vec<f64>], seed: u64) -> Result<Option<Vec<usize>>> {
    let m = vectors.len();
    let n = vectors.first().map_or(0, Vec::len);
    if m <= EXACT_GENERAL_POSITION_LIMIT {
        let exact: Vec<Vec<Rational>> = vectors
            .iter()
            .map(|v| v.iter().map(|&x| from_f64(x)).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?;
        return Ok(combinations(m, n)
            .into_iter()
            .find(|s| rational_det(s.iter().map(|&i| exact[i].clone()).collect()).is_zero()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..SAMPLED_SUBSETS {
        let mut s = sample(&mut rng, m, n).into_vec();
        s.sort_unstable();
        let mat = subset_matrix(vectors, &s);
        let scale: f64 = s
            .iter()
            .map(|&i| vectors[i].iter().map(|x| x * x).sum::<f64>().sqrt())
            .product();
        if mat.det().norm() <= 1e-12 * scale {
            return Ok(Some(s));
        }
    }
    Ok(None)
}

fn forster_matrix(vectors: &[ComplexMatrix], a: &ComplexMatrix, n: usize) -> ComplexMatrix {
    let m = vectors.len() as f64;
    let mut acc = ComplexMatrix::zeros(n, n);
    for v in vectors {
        let av = a * v;
        let norm = av.frobenius_norm_sq();
        acc = &acc + &av.gram_left().scale_real(n as f64 / (m * norm));
    }
    acc.symmetrize()
}

/// Finds `A` with `Σ (n/m) (A v_i)(A v_i)ᵀ / ‖A v_i‖² = I` to within `ε` by
/// iterating `A ← S^{-1/2} A`.
///
/// Requires `m ≥ n` vectors in general position; a dependent `n`-subset
/// raises [`Error::NotGeneralPosition`].
pub fn forster_scale(vectors: &[Vec<f64>], opts: &ScalingOptions) -> Result<ForsterScaling> {
    opts.validate()?;
    let m = vectors.len();
    let Some(n) = vectors.first().map(Vec::len) else {
        return Err(Error::Shape("no vectors given".into()));
    };
    if n == 0 || vectors.iter().any(|v| v.len() != n) {
        return Err(Error::Shape(
            "vectors must share a positive dimension".into(),
        ));
    }
    if m < n {
        return Err(Error::PreconditionViolated(format!(
            "need at least n = {n} vectors, got {m}"
        )));
    }
    if let Some(s) = general_position_violation(vectors, opts.seed)? {
        return Err(Error::NotGeneralPosition(s.iter().map(|i| i + 1).collect()));
    }
    let b = vectors
        .iter()
        .flatten()
        .filter_map(|&x| from_f64(x).ok())
        .map(|r| bit_length(&r))
        .max()
        .unwrap_or(1);
    let budget = opts
        .budget_override
        .unwrap_or_else(|| matrix_budget(n, b, opts.epsilon, opts.budget_constant));
    let cols: Vec<ComplexMatrix> = vectors
        .iter()
        .map(|v| {
            ComplexMatrix::from_real_rows(&v.iter().map(|&x| vec![x]).collect::<Vec<_>>())
                .expect("column")
        })
        .collect();
    let id = ComplexMatrix::identity(n);
    let mut a = id.clone();
    let mut s = forster_matrix(&cols, &a, n);
    let mut residual = (&s - &id).frobenius_norm();
    let mut iterations = 0;
    while residual > opts.epsilon && (iterations as u64) < budget {
        let h = inv_sqrt_psd(&HermitianPsd::from_trusted(s), None)?;
        a = &h * &a;
        // |det A| = 1
        let scale = (-a.log_abs_det() / n as f64).exp();
        a = a.scale_real(scale);
        iterations += 1;
        s = forster_matrix(&cols, &a, n);
        residual = (&s - &id).frobenius_norm();
    }
    Ok(ForsterScaling {
        a: (0..n)
            .map(|i| a.row(i).iter().map(|z| z.re).collect())
            .collect(),
        residual,
        iterations,
        budget,
        converged: residual <= opts.epsilon,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rational::rat;

    #[test]
    fn symmetric_configuration_is_fixed() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let vs = vec![vec![1.0, 0.0], vec![s, s], vec![0.0, 1.0], vec![-s, s]];
        let f = forster_scale(&vs, &ScalingOptions::new(1e-9)).unwrap();
        assert!(f.converged);
        assert!(f.residual <= 1e-9);
        assert_eq!(f.iterations, 0);
        assert_eq!(f.a, vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
    }

    #[test]
    fn dependent_pair_is_rejected() {
        let vs = vec![vec![1.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]];
        assert_eq!(
            forster_scale(&vs, &ScalingOptions::new(1e-6)),
            Err(Error::NotGeneralPosition(vec![1, 2]))
        );
    }

    #[test]
    fn skewed_configuration_converges() {
        let vs = vec![
            vec![1.0, 0.0],
            vec![1.0, 0.1],
            vec![1.0, 0.2],
            vec![0.0, 1.0],
            vec![1.0, -0.3],
        ];
        let f = forster_scale(&vs, &ScalingOptions::new(1e-8)).unwrap();
        assert!(f.converged && f.residual <= 1e-8);
    }

    #[test]
    fn exact_determinant() {
        let m = vec![vec![rat(2), rat(1)], vec![rat(4), rat(2)]];
        assert!(rational_det(m).is_zero());
        assert_eq!(
            rational_det(vec![vec![rat(0), rat(1)], vec![rat(1), rat(0)]]),
            rat(-1)
        );
        assert_eq!(combinations(4, 2).len(), 6);
    }
}
