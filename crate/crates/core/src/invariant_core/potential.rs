//! Potential functions `Φ = |P|^{1/ℓ}` built from a fixed invariant polynomial `P`.

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{kron, ComplexMatrix};

/// Attempts made before a left-right witness is declared unavailable.
pub const WITNESS_ATTEMPTS: usize = 20;
/// Hadamard-normalized determinant below which a witness counts as degenerate.
pub const DEGENERACY_THRESHOLD: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PotentialKind {
    MatchingMonomial,
    LeftRightDeterminant,
    Disabled,
}

/// The fixed invariant defining the potential.
#[derive(Debug, Clone, PartialEq)]
pub enum PotentialWitness {
    /// `P(A) = ∏ A_{i,σ(i)}`.
    Matching(Vec<usize>),
    /// `P(A) = det(Σ D_i ⊗ A_i)` with `k × k` matrices `D_i`.
    LeftRight {
        k: usize,
        d: Vec<ComplexMatrix>,
    },
    Disabled,
}

impl PotentialWitness {
    pub fn kind(&self) -> PotentialKind {
        match self {
            PotentialWitness::Matching(_) => PotentialKind::MatchingMonomial,
            PotentialWitness::LeftRight { .. } => PotentialKind::LeftRightDeterminant,
            PotentialWitness::Disabled => PotentialKind::Disabled,
        }
    }
}

/// Instance on which a potential is evaluated.
#[derive(Debug, Clone, Copy)]
pub enum PotentialInstance<'a> {
    Matrix(&'a [Vec<f64>]),
    Tuple(&'a [ComplexMatrix]),
}

/// Witness plus the values recorded during a run.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialTracker {
    pub witness: PotentialWitness,
    pub values: Vec<f64>,
    pub note: Option<String>,
}

impl PotentialTracker {
    pub fn new(witness: PotentialWitness) -> Self {
        Self {
            witness,
            values: Vec::new(),
            note: None,
        }
    }

    pub fn disabled(note: impl Into<Option<String>>) -> Self {
        Self {
            witness: PotentialWitness::Disabled,
            values: Vec::new(),
            note: note.into(),
        }
    }

    pub fn kind(&self) -> PotentialKind {
        self.witness.kind()
    }

    pub fn is_enabled(&self) -> bool {
        self.kind() != PotentialKind::Disabled
    }
}

/// `ln Φ` for the matching monomial: `(1/n) Σ ln A_{i,σ(i)}`.
pub fn log_matching_monomial(sigma: &[usize], rows: &[Vec<f64>]) -> f64 {
    let n = rows.len() as f64;
    sigma
        .iter()
        .enumerate()
        .map(|(i, &j)| rows[i][j].ln())
        .sum::<f64>()
        / n
}

/// `Σ D_i ⊗ A_i`.
pub fn left_right_block(d: &[ComplexMatrix], mats: &[ComplexMatrix]) -> ComplexMatrix {
    let mut acc: Option<ComplexMatrix> = None;
    for (di, ai) in d.iter().zip(mats) {
        let term = kron(di, ai);
        acc = Some(match acc {
            None => term,
            Some(s) => &s + &term,
        });
    }
    acc.expect("at least one matrix")
}

/// `ln Φ` for the left-right determinant: `ln |det(Σ D_i ⊗ A_i)| / (n k)`.
pub fn log_left_right(k: usize, d: &[ComplexMatrix], mats: &[ComplexMatrix]) -> f64 {
    let n = mats[0].rows();
    left_right_block(d, mats).log_abs_det() / (n * k) as f64
}

/// `ln(|det M| / ∏_j ‖col_j(M)‖)`, which is ≤ 0 by Hadamard's inequality.
pub fn log_hadamard_ratio(m: &ComplexMatrix) -> f64 {
    let log_cols: f64 = (0..m.cols())
        .map(|j| {
            m.column(j)
                .iter()
                .map(|z| z.norm_sqr())
                .sum::<f64>()
                .sqrt()
                .ln()
        })
        .sum();
    m.log_abs_det() - log_cols
}

/// Samples `k × k` integer matrices with entries uniform in `{−n², …, n²}`.
pub fn sample_d_matrices<R: Rng>(rng: &mut R, m: usize, k: usize, n: usize) -> Vec<ComplexMatrix> {
    let bound = (n * n) as i64;
    (0..m)
        .map(|_| {
            ComplexMatrix::from_fn(k, k, |_, _| {
                Complex64::new(rng.gen_range(-bound..=bound) as f64, 0.0)
            })
        })
        .collect()
}

/// Whether `det(Σ D_i ⊗ A_i)` is numerically nonzero.
pub fn left_right_nondegenerate(d: &[ComplexMatrix], mats: &[ComplexMatrix]) -> bool {
    let ratio = log_hadamard_ratio(&left_right_block(d, mats));
    ratio.is_finite() && ratio > DEGENERACY_THRESHOLD.ln()
}

/// Samples a left-right witness, re-sampling up to [`WITNESS_ATTEMPTS`] times.
pub fn sample_left_right_tracker<R: Rng>(
    rng: &mut R,
    mats: &[ComplexMatrix],
    k: usize,
) -> PotentialTracker {
    let n = mats[0].rows();
    for _ in 0..WITNESS_ATTEMPTS {
        let d = sample_d_matrices(rng, mats.len(), k, n);
        if left_right_nondegenerate(&d, mats) {
            return PotentialTracker::new(PotentialWitness::LeftRight { k, d });
        }
    }
    PotentialTracker::disabled(Some(format!(
        "potential unavailable: no nondegenerate witness in {WITNESS_ATTEMPTS} attempts"
    )))
}

/// Evaluates `Φ` on an instance.
pub fn potential_eval(tracker: &PotentialTracker, instance: PotentialInstance<'_>) -> Result<f64> {
    let log_phi = match (&tracker.witness, instance) {
        (PotentialWitness::Matching(sigma), PotentialInstance::Matrix(rows)) => {
            if sigma.len() != rows.len() {
                return Err(Error::Shape(
                    "permutation length differs from matrix size".into(),
                ));
            }
            log_matching_monomial(sigma, rows)
        }
        (PotentialWitness::LeftRight { k, d }, PotentialInstance::Tuple(mats)) => {
            if d.len() != mats.len() || mats.is_empty() {
                return Err(Error::Shape("witness count differs from tuple size".into()));
            }
            log_left_right(*k, d, mats)
        }
        (PotentialWitness::Disabled, _) => {
            return Err(Error::PreconditionViolated(
                "potential tracking is disabled".into(),
            ))
        }
        _ => {
            return Err(Error::Shape(
                "potential witness does not match the instance type".into(),
            ))
        }
    };
    let phi = log_phi.exp();
    if phi > 0.0 && phi.is_finite() {
        Ok(phi)
    } else {
        Err(Error::WitnessDegenerate)
    }
}
