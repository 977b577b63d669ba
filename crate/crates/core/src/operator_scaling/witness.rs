//! Shrunk subspaces and the scaling-based rank-nondecreasing test.

use serde::Serialize;

use crate::error::Result;
use crate::invariant_core::template::ScalingAdapter;
use crate::numerics::{hermitian_eigen, ComplexMatrix};
use crate::report::{ScalingOptions, ScalingReport};

use super::gurvits::{gurvits_with, OperatorAdapter};
use super::tuple::{sum_gram, MatrixTuple};

/// Rank tolerance used when spanning `Σ A_i(V)`.
const SPAN_TOL: f64 = 1e-7;
/// Relative residual accepted by [`ShrunkSubspaceWitness::verify`].
pub const WITNESS_TOL: f64 = 1e-8;
/// Largest `n` for which all coordinate subspaces are tried.
const MAX_COORDINATE_SEARCH: usize = 12;

/// Subspaces `V`, `W` (orthonormal columns) with `A_i V ⊆ W` for all `i` and `dim W < dim V`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShrunkSubspaceWitness {
    pub v: ComplexMatrix,
    pub w: ComplexMatrix,
}

impl ShrunkSubspaceWitness {
    pub fn dim_v(&self) -> usize {
        self.v.cols()
    }

    pub fn dim_w(&self) -> usize {
        self.w.cols()
    }

    /// Spans `W = Σ A_i(V)` from a basis of `V` and keeps the pair if it shrinks.
    pub fn from_subspace(a: &MatrixTuple, v: &ComplexMatrix) -> Option<Self> {
        let v = v.column_space(SPAN_TOL);
        if v.cols() == 0 {
            return None;
        }
        let images: Vec<ComplexMatrix> = a.matrices().iter().map(|m| m * &v).collect();
        let refs: Vec<&ComplexMatrix> = images.iter().collect();
        let w = ComplexMatrix::hstack(&refs).ok()?.column_space(SPAN_TOL);
        let cand = Self { v, w };
        (cand.dim_w() < cand.dim_v() && cand.verify(a)).then_some(cand)
    }

    /// Checks `dim W < dim V`, full column rank of `V`, and
    /// `‖(I − P_W) A_i V‖ ≤ 1e-8 ‖A‖ ‖V‖` for every `i`.
    pub fn verify(&self, a: &MatrixTuple) -> bool {
        let n = a.n();
        if self.v.rows() != n || self.w.rows() != n || self.dim_w() >= self.dim_v() {
            return false;
        }
        if self.v.rank(SPAN_TOL) != self.dim_v() {
            return false;
        }
        let proj = if self.dim_w() == 0 {
            ComplexMatrix::zeros(n, n)
        } else {
            let g = self.w.gram_right();
            let Ok(ginv) = g.inverse() else { return false };
            &(&self.w * &ginv) * &self.w.adjoint()
        };
        let resid_op = &ComplexMatrix::identity(n) - &proj;
        let scale = a.norm_sq().sqrt() * self.v.frobenius_norm();
        a.matrices().iter().all(|m| {
            let r = &resid_op * &(m * &self.v);
            r.frobenius_norm() <= WITNESS_TOL * scale.max(f64::MIN_POSITIVE)
        })
    }
}

/// Witness read off a singular marginal: a common left kernel gives `V = ℂⁿ`,
/// a common right kernel gives `W = 0`.
pub(crate) fn trivial_witness(a: &MatrixTuple) -> Option<ShrunkSubspaceWitness> {
    let n = a.n();
    let refs: Vec<&ComplexMatrix> = a.matrices().iter().collect();
    let stacked = ComplexMatrix::vstack(&refs).ok()?;
    let kernel = stacked.null_space(SPAN_TOL);
    if kernel.cols() > 0 {
        if let Some(w) = ShrunkSubspaceWitness::from_subspace(a, &kernel) {
            return Some(w);
        }
    }
    ShrunkSubspaceWitness::from_subspace(a, &ComplexMatrix::identity(n))
}

fn coordinate_candidates(a: &MatrixTuple) -> Option<ShrunkSubspaceWitness> {
    let n = a.n();
    if n > MAX_COORDINATE_SEARCH {
        return None;
    }
    let mut masks: Vec<u32> = (1..(1u32 << n)).collect();
    masks.sort_by_key(|m| m.count_ones());
    masks.into_iter().find_map(|mask| {
        let cols: Vec<usize> = (0..n).filter(|j| mask >> j & 1 == 1).collect();
        let v = ComplexMatrix::identity(n).select_columns(&cols);
        ShrunkSubspaceWitness::from_subspace(a, &v)
    })
}

/// Spectral subspaces of the scaled right marginal, pulled back through `C̃`.
fn spectral_candidates(
    a: &MatrixTuple,
    adapter: &OperatorAdapter,
) -> Option<ShrunkSubspaceWitness> {
    let n = a.n();
    let rho = sum_gram(adapter.iterate(), false);
    let eig = hermitian_eigen(&rho);
    let (_, right) = adapter.raw_scalers();
    for k in 1..n {
        let bottom: Vec<usize> = (0..k).collect();
        let top: Vec<usize> = (n - k..n).collect();
        for cols in [top, bottom] {
            let v = right * &eig.vectors.select_columns(&cols);
            if let Some(w) = ShrunkSubspaceWitness::from_subspace(a, &v) {
                return Some(w);
            }
        }
    }
    None
}

/// Best-effort search for a shrunk subspace.
pub fn find_shrunk_subspace(
    a: &MatrixTuple,
    scaled: Option<&OperatorAdapter>,
) -> Option<ShrunkSubspaceWitness> {
    trivial_witness(a)
        .or_else(|| coordinate_candidates(a))
        .or_else(|| scaled.and_then(|s| spectral_candidates(a, s)))
}

/// Outcome of [`is_dim_nondecreasing`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankDecision {
    pub nondecreasing: bool,
    pub witness: Option<ShrunkSubspaceWitness>,
    pub report: ScalingReport,
}

/// Decides whether `dim Σ A_i(V) ≥ dim V` for all subspaces `V` by scaling a
/// left-normalized start to `ε = 1/(n+1)` within the theorem budget.
///
/// When scaling fails, a witness is searched among kernels, coordinate
/// subspaces and spectral subspaces of the final iterate; it may be absent.
pub fn is_dim_nondecreasing(a: &MatrixTuple, opts: &ScalingOptions) -> Result<RankDecision> {
    let n = a.n() as f64;
    let opts = ScalingOptions {
        epsilon: 1.0 / (n + 1.0),
        ..opts.clone()
    };
    let run = gurvits_with(a, &opts, OperatorAdapter::left_normalized(a))?;
    let nondecreasing = run.report.converged();
    let witness = if nondecreasing {
        None
    } else {
        let scaled = run
            .adapter
            .trivial_check()
            .is_none()
            .then_some(&run.adapter);
        find_shrunk_subspace(a, scaled)
    };
    Ok(RankDecision {
        nondecreasing,
        witness,
        report: run.report,
    })
}
