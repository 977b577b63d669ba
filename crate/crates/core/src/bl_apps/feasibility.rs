//! Necessary conditions for finiteness of the Brascamp-Lieb constant.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::numerics::rational::ser;
use crate::numerics::{ComplexMatrix, Rational};

use super::datum::BLDatum;

/// Seed of the random subspaces used by [`bl_feasibility_check`].
pub const DEFAULT_BL_SEED: u64 = 0x5ca1_ab1e;
/// Number of random subspaces tested.
pub const RANDOM_SUBSPACES: usize = 100;
/// Sub-collections up to this size are always enumerated.
pub const MAX_SUBCOLLECTION: usize = 3;
/// With at most this many rows in total, every subset of rows is enumerated.
pub const EXHAUSTIVE_ROW_LIMIT: usize = 16;

// Singular values come from Gram eigenvalues, so noise sits near √ε_machine.
const RANK_TOL: f64 = 1e-7;

/// Outcome of [`bl_feasibility_check`].
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum BLFeasibility {
    /// `Σ p_i n_i ≠ n`.
    DimensionMismatch {
        n: usize,
        #[serde(serialize_with = "ser::one")]
        weighted: Rational,
    },
    /// `dim V > Σ p_i dim(B_i V)` for the subspace spanned by `basis`.
    SubspaceViolation {
        basis: Vec<Vec<f64>>,
        dim: usize,
        image_dims: Vec<usize>,
        #[serde(serialize_with = "ser::one")]
        weighted: Rational,
    },
    /// Every tested subspace satisfies the inequality; this does not prove feasibility.
    PassedNecessary { subspaces_tested: usize },
}

impl BLFeasibility {
    pub fn is_infeasible(&self) -> bool {
        !matches!(self, Self::PassedNecessary { .. })
    }

    pub fn reason(&self) -> String {
        match self {
            Self::DimensionMismatch { n, weighted } => {
                format!("n = {n} but Σ p_i n_i = {weighted}")
            }
            Self::SubspaceViolation { dim, weighted, .. } => {
                format!("a subspace of dimension {dim} has Σ p_i dim(B_i V) = {weighted}")
            }
            Self::PassedNecessary { subspaces_tested } => {
                format!("necessary conditions hold on {subspaces_tested} tested subspaces")
            }
        }
    }
}

fn subsets(len: usize, max_size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(
        start: usize,
        len: usize,
        max_size: usize,
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if !cur.is_empty() {
            out.push(cur.clone());
        }
        if cur.len() == max_size {
            return;
        }
        for i in start..len {
            cur.push(i);
            rec(i + 1, len, max_size, cur, out);
            cur.pop();
        }
    }
    rec(0, len, max_size, &mut cur, &mut out);
    out
}

fn stack_rows(rows: &[&[f64]], n: usize) -> ComplexMatrix {
    let owned: Vec<Vec<f64>> = rows.iter().map(|r| r.to_vec()).collect();
    if owned.is_empty() {
        return ComplexMatrix::zeros(0, n);
    }
    ComplexMatrix::from_real_rows(&owned).expect("rows share a length")
}

/// Kernels and row spaces of row sub-collections and map sub-collections,
/// the whole space, and seeded random subspaces.
fn candidate_subspaces(datum: &BLDatum, seed: u64) -> Vec<ComplexMatrix> {
    let n = datum.n;
    let mut out = vec![ComplexMatrix::identity(n)];
    let push_pair = |m: &ComplexMatrix, out: &mut Vec<ComplexMatrix>| {
        out.push(m.null_space(RANK_TOL));
        out.push(m.adjoint().column_space(RANK_TOL));
    };

    let rows: Vec<&[f64]> = datum.maps.iter().flatten().map(Vec::as_slice).collect();
    let row_sets = if rows.len() <= EXHAUSTIVE_ROW_LIMIT {
        subsets(rows.len(), rows.len())
    } else {
        subsets(rows.len(), MAX_SUBCOLLECTION)
    };
    for set in row_sets {
        let chosen: Vec<&[f64]> = set.iter().map(|&i| rows[i]).collect();
        push_pair(&stack_rows(&chosen, n), &mut out);
    }
    for set in subsets(datum.m(), MAX_SUBCOLLECTION) {
        let chosen: Vec<&[f64]> = set
            .iter()
            .flat_map(|&i| datum.maps[i].iter().map(Vec::as_slice))
            .collect();
        push_pair(&stack_rows(&chosen, n), &mut out);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for t in 0..RANDOM_SUBSPACES {
        let k = 1 + t % n;
        let basis: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..k).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        out.push(
            ComplexMatrix::from_real_rows(&basis)
                .expect("rectangular")
                .column_space(RANK_TOL),
        );
    }
    out.retain(|v| v.cols() > 0);
    out
}

/// Checks `n = Σ p_i n_i` exactly and `dim V ≤ Σ p_i dim(B_i V)` on
/// [`candidate_subspaces`], using [`DEFAULT_BL_SEED`] for the random part.
pub fn bl_feasibility_check(datum: &BLDatum) -> BLFeasibility {
    bl_feasibility_check_seeded(datum, DEFAULT_BL_SEED)
}

pub fn bl_feasibility_check_seeded(datum: &BLDatum, seed: u64) -> BLFeasibility {
    let weighted = datum.weighted_dimension();
    if weighted != Rational::from_integer(datum.n.into()) {
        return BLFeasibility::DimensionMismatch {
            n: datum.n,
            weighted,
        };
    }
    let maps = datum.matrices();
    let candidates = candidate_subspaces(datum, seed);
    let tested = candidates.len();
    for v in candidates {
        // `v` has orthonormal columns, so the image is measured against ‖B_i‖.
        let image_dims: Vec<usize> = maps
            .iter()
            .map(|b| (b * &v).rank_abs(RANK_TOL * b.frobenius_norm()))
            .collect();
        let rhs: Rational = image_dims
            .iter()
            .zip(&datum.p)
            .map(|(&d, p)| p * Rational::from_integer(d.into()))
            .sum();
        if Rational::from_integer(v.cols().into()) > rhs {
            let basis = (0..v.cols())
                .map(|j| v.column(j).iter().map(|z| z.re).collect())
                .collect();
            return BLFeasibility::SubspaceViolation {
                basis,
                dim: v.cols(),
                image_dims,
                weighted: rhs,
            };
        }
    }
    BLFeasibility::PassedNecessary {
        subspaces_tested: tested,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rational::{rat, rat_frac};

    #[test]
    fn dimension_condition_is_exact() {
        let d = BLDatum::new(
            2,
            vec![vec![vec![1.0, 0.0]], vec![vec![0.0, 1.0]]],
            vec![rat(2), rat_frac(1, 2)],
        )
        .unwrap();
        assert!(matches!(
            bl_feasibility_check(&d),
            BLFeasibility::DimensionMismatch { .. }
        ));
    }

    #[test]
    fn repeated_map_violates_subspace_condition() {
        let d = BLDatum::new(
            2,
            vec![vec![vec![1.0, 0.0]], vec![vec![1.0, 0.0]]],
            vec![rat(1), rat(1)],
        )
        .unwrap();
        match bl_feasibility_check(&d) {
            BLFeasibility::SubspaceViolation {
                dim, image_dims, ..
            } => {
                assert_eq!(dim, 1);
                assert_eq!(image_dims, vec![0, 0]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn geometric_data_pass() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let d = BLDatum::new(
            2,
            vec![vec![vec![s, s]], vec![vec![s, -s]]],
            vec![rat(1), rat(1)],
        )
        .unwrap();
        assert!(matches!(
            bl_feasibility_check(&d),
            BLFeasibility::PassedNecessary { .. }
        ));
    }

    #[test]
    fn subset_enumeration() {
        assert_eq!(subsets(4, 2).len(), 4 + 6);
        assert_eq!(subsets(3, 3).len(), 7);
    }
}
