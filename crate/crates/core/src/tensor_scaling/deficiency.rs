//! Exact deficiency certificates for tensor supports.

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::invariant_core::torus::{
    torus_nullcone, NullConeVerdict, TorusVector, TorusWitness, WeightSystem,
};
use crate::numerics::rational::{rat, ser, Rational};
use crate::numerics::TensorTuple;

/// Integers `a_{i,j}` with `Σ_j a_{i,j} = 0` on every axis and
/// `Σ_i a_{i,j_i} > 0` for every support tuple `(j_1, …, j_d)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeficiencyCertificate {
    #[serde(serialize_with = "ser::vec_vec")]
    pub a: Vec<Vec<Rational>>,
}

impl DeficiencyCertificate {
    pub fn shape(&self) -> Vec<usize> {
        self.a.iter().map(Vec::len).collect()
    }

    /// Exact check against a support.
    pub fn verify(&self, shape: &[usize], support: &[Vec<usize>]) -> bool {
        if self.shape() != shape {
            return false;
        }
        if self
            .a
            .iter()
            .any(|row| !row.iter().sum::<Rational>().is_zero())
        {
            return false;
        }
        support.iter().all(|s| {
            s.len() == shape.len()
                && s.iter().zip(shape).all(|(&j, &n)| j < n)
                && s.iter()
                    .zip(&self.a)
                    .map(|(&j, row)| &row[j])
                    .sum::<Rational>()
                    .is_positive()
        })
    }
}

/// Outcome of [`deficiency_check`].
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum DeficiencyVerdict {
    Deficient {
        certificate: DeficiencyCertificate,
    },
    /// The uniform point lies in the convex hull of the support weights.
    NotDeficient {
        witness: TorusWitness,
    },
}

impl DeficiencyVerdict {
    pub fn is_deficient(&self) -> bool {
        matches!(self, Self::Deficient { .. })
    }

    pub fn certificate(&self) -> Option<&DeficiencyCertificate> {
        match self {
            Self::Deficient { certificate } => Some(certificate),
            Self::NotDeficient { .. } => None,
        }
    }
}

/// Decides by exact linear programming whether the support is deficient.
pub fn deficiency_check(shape: &[usize], support: &[Vec<usize>]) -> Result<DeficiencyVerdict> {
    if shape.is_empty() || shape.contains(&0) {
        return Err(Error::Shape(format!("invalid tensor shape {shape:?}")));
    }
    let ws = WeightSystem::tensor_support(shape, support)?;
    match torus_nullcone(&ws, &TorusVector::full(ws.m()))? {
        NullConeVerdict::InNullCone { subgroup, .. } => Ok(DeficiencyVerdict::Deficient {
            certificate: DeficiencyCertificate {
                a: subgroup
                    .exponents
                    .iter()
                    .map(|row| row.iter().map(|&x| rat(x)).collect())
                    .collect(),
            },
        }),
        NullConeVerdict::NotInNullCone { witness } => {
            Ok(DeficiencyVerdict::NotDeficient { witness })
        }
    }
}

/// [`deficiency_check`] on the entries of `a` with modulus above `tol`.
pub fn tensor_deficiency(a: &TensorTuple, tol: f64) -> Result<DeficiencyVerdict> {
    deficiency_check(a.shape(), &a.support(tol))
}
