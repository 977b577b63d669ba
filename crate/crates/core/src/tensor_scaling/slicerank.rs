//! Consistency probe between slice-rank decompositions and the null cone.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::invariant_core::template::ScalingAdapter;
use crate::numerics::{ComplexMatrix, TensorTuple};
use crate::report::{ScalingOptions, Status};

use super::deficiency::{deficiency_check, DeficiencyCertificate, DeficiencyVerdict};
use super::scale::{tensor_scale, TensorAdapter};

/// Largest reconstruction error accepted for a decomposition.
pub const RECONSTRUCTION_TOL: f64 = 1e-10;

/// One slice `v ⊗_axis R`: `v` sits on `axis`, `R` is an order-`(d−1)`
/// tensor over the remaining axes in order, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SliceTerm {
    pub axis: usize,
    pub vector: Vec<Complex64>,
    pub rest: Vec<Complex64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SliceDecomposition {
    pub terms: Vec<SliceTerm>,
}

impl SliceDecomposition {
    /// `Σ_t v_t ⊗_{axis_t} R_t` for the given shape.
    pub fn reconstruct(&self, shape: &[usize]) -> Result<TensorTuple> {
        let mut out = TensorTuple::zeros(1, shape.to_vec())?;
        let total = out.tensor_len();
        let mut data = vec![Complex64::new(0.0, 0.0); total];
        for term in &self.terms {
            if term.axis >= shape.len() || term.vector.len() != shape[term.axis] {
                return Err(Error::Shape(format!(
                    "slice term on axis {} does not fit {shape:?}",
                    term.axis
                )));
            }
            if term.rest.len() * shape[term.axis] != total {
                return Err(Error::Shape(
                    "slice remainder has the wrong number of entries".into(),
                ));
            }
            for (lin, slot) in data.iter_mut().enumerate() {
                let (_, idx) = out.multi_index(lin);
                let mut rest_lin = 0;
                for (k, (&j, &n)) in idx.iter().zip(shape).enumerate() {
                    if k != term.axis {
                        rest_lin = rest_lin * n + j;
                    }
                }
                *slot += term.vector[idx[term.axis]] * term.rest[rest_lin];
            }
        }
        out = TensorTuple::new(1, shape.to_vec(), data)?;
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SliceRankEvidence {
    /// Some marginal is singular.
    TrivialCheck { reason: String },
    /// In the basis adapted to the decomposition the support is deficient.
    Deficiency {
        certificate: DeficiencyCertificate,
        bases: Vec<ComplexMatrix>,
    },
    /// Tensor scaling did not reach the target distance.
    ScalingFailed { final_ds: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum SliceRankVerdict {
    Consistent {
        evidence: SliceRankEvidence,
    },
    /// No null-cone evidence was found and scaling converged.
    Inconsistent {
        final_ds: f64,
    },
}

impl SliceRankVerdict {
    pub fn is_consistent(&self) -> bool {
        matches!(self, Self::Consistent { .. })
    }
}

/// Unitary whose leading columns span the given vectors.
fn adapted_basis(n: usize, vectors: &[&Vec<Complex64>]) -> ComplexMatrix {
    if vectors.is_empty() {
        return ComplexMatrix::identity(n);
    }
    let u = ComplexMatrix::from_fn(n, vectors.len(), |i, j| vectors[j][i]);
    let span = u.column_space(1e-9);
    let complement = span.adjoint().null_space(1e-9);
    ComplexMatrix::hstack(&[&span, &complement]).expect("same row count")
}

/// Checks that a slice decomposition with fewer than `n` terms is matched
/// by null-cone evidence for `A ∈ (ℂⁿ)^{⊗d}`.
///
/// The decomposition must reproduce `A` to within `1e-10`, otherwise
/// [`Error::BadWitness`] is returned.
pub fn slicerank_nullcone_probe(
    a: &TensorTuple,
    decomposition: &SliceDecomposition,
) -> Result<SliceRankVerdict> {
    if a.m() != 1 {
        return Err(Error::Shape("the probe takes a single tensor".into()));
    }
    let shape = a.shape().to_vec();
    let n = shape[0];
    if shape.iter().any(|&k| k != n) {
        return Err(Error::Shape(format!(
            "tensor must be cubical, got {shape:?}"
        )));
    }
    if decomposition.terms.len() >= n {
        return Err(Error::PreconditionViolated(format!(
            "decomposition has {} terms, need fewer than n = {n}",
            decomposition.terms.len()
        )));
    }
    let rebuilt = decomposition.reconstruct(&shape)?;
    let residual = a
        .as_slice()
        .iter()
        .zip(rebuilt.as_slice())
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt();
    if residual > RECONSTRUCTION_TOL {
        return Err(Error::BadWitness(residual));
    }

    let adapter = TensorAdapter::new(a);
    if let Some(reason) = adapter.trivial_check() {
        return Ok(SliceRankVerdict::Consistent {
            evidence: SliceRankEvidence::TrivialCheck { reason },
        });
    }

    let bases: Vec<ComplexMatrix> = (0..shape.len())
        .map(|axis| {
            let vs: Vec<&Vec<Complex64>> = decomposition
                .terms
                .iter()
                .filter(|t| t.axis == axis)
                .map(|t| &t.vector)
                .collect();
            adapted_basis(n, &vs)
        })
        .collect();
    let changed = a.apply_local(&bases.iter().map(ComplexMatrix::adjoint).collect::<Vec<_>>());
    let top = changed
        .as_slice()
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    let support = changed.support(1e-8 * top);
    if let DeficiencyVerdict::Deficient { certificate } = deficiency_check(&shape, &support)? {
        return Ok(SliceRankVerdict::Consistent {
            evidence: SliceRankEvidence::Deficiency { certificate, bases },
        });
    }

    let report = tensor_scale(a, &ScalingOptions::new(1e-6).without_potential())?;
    if report.status != Status::Converged {
        Ok(SliceRankVerdict::Consistent {
            evidence: SliceRankEvidence::ScalingFailed {
                final_ds: report.final_ds,
            },
        })
    } else {
        Ok(SliceRankVerdict::Inconsistent {
            final_ds: report.final_ds,
        })
    }
}
