//! Operator Sinkhorn (Gurvits) scaling and its template adapter.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::invariant_core::bounds::{operator_budget, AnalysisBound};
use crate::invariant_core::potential::{
    log_left_right, sample_left_right_tracker, PotentialTracker, PotentialWitness,
};
use crate::invariant_core::template::{run_template, ScalingAdapter, StepRecord, TemplateStatus};
use crate::numerics::{inv_sqrt_psd, is_near_singular, ComplexMatrix};
use crate::report::{Certificate, Scalers, ScalingOptions, ScalingReport, Side, Status, TraceRow};

use super::tuple::{ds_op, psd, sum_gram, MatrixTuple};
use super::witness::trivial_witness;

/// Scalers whose condition number exceeds this abort the run.
pub const MAX_SCALER_CONDITION: f64 = 1e12;
/// Relative slack when re-checking a converged run from the input and its scalers.
pub const REPRODUCTION_SLACK: f64 = 1e-6;

/// Unit-norm iterate `Ã = B̃ A₀ C̃` with `A₀ = A / ‖A‖`.
#[derive(Debug, Clone)]
pub struct OperatorAdapter {
    mats: Vec<ComplexMatrix>,
    left: ComplexMatrix,
    right: ComplexMatrix,
    log_det_left: f64,
    log_det_right: f64,
    input_norm: f64,
}

impl OperatorAdapter {
    pub fn new(a: &MatrixTuple) -> Self {
        let n = a.n();
        let norm = a.norm_sq().sqrt();
        let s = if norm > 0.0 { 1.0 / norm } else { 1.0 };
        Self {
            mats: a.matrices().iter().map(|m| m.scale_real(s)).collect(),
            left: ComplexMatrix::identity(n),
            right: ComplexMatrix::identity(n),
            log_det_left: 0.0,
            log_det_right: 0.0,
            input_norm: norm,
        }
    }

    /// Left-normalized start: `Σ Ã Ã† = I/n`.
    pub fn left_normalized(a: &MatrixTuple) -> Self {
        let mut s = Self::new(a);
        if s.trivial_check().is_none() {
            // A near-singular left marginal leaves the start unnormalized; the run then aborts.
            let _ = s.apply(Side::Left);
            s.renormalize();
        }
        s
    }

    fn n(&self) -> usize {
        self.mats[0].rows()
    }

    pub fn iterate(&self) -> &[ComplexMatrix] {
        &self.mats
    }

    /// Public iterate `√n · Ã`, whose marginals approach the identity.
    pub fn public_iterate(&self) -> MatrixTuple {
        let s = (self.n() as f64).sqrt();
        MatrixTuple::new(self.mats.iter().map(|m| m.scale_real(s)).collect()).expect("valid tuple")
    }

    /// `(B, C)` with `B A_i C` equal to the public iterate.
    pub fn public_scalers(&self) -> (ComplexMatrix, ComplexMatrix) {
        let s = (self.n() as f64).sqrt() / self.input_norm;
        (self.left.scale_real(s), self.right.clone())
    }

    /// Accumulated scaling matrices of the unit-norm iterate.
    pub fn raw_scalers(&self) -> (&ComplexMatrix, &ComplexMatrix) {
        (&self.left, &self.right)
    }

    fn marginal(&self, side: Side) -> ComplexMatrix {
        sum_gram(&self.mats, side == Side::Left)
    }

    fn deviation(&self, side: Side) -> f64 {
        let n = self.n();
        let target = ComplexMatrix::identity(n).scale_real(1.0 / n as f64);
        (&self.marginal(side) - &target).frobenius_norm_sq()
    }

    fn apply(&mut self, side: Side) -> Result<StepRecord> {
        let n = self.n();
        let rho = psd(self.marginal(side).scale_real(n as f64));
        let eig = rho.eigen();
        let h = inv_sqrt_psd(&rho, None)?;
        let delta: f64 = eig.values.iter().map(|l| (l - 1.0) * (l - 1.0)).sum();
        let log_det_h = -0.5 * eig.values.iter().map(|l| l.ln()).sum::<f64>();
        if side == Side::Left {
            self.mats = self.mats.iter().map(|m| &h * m).collect();
            self.left = &h * &self.left;
            self.log_det_left += log_det_h;
        } else {
            self.mats = self.mats.iter().map(|m| m * &h).collect();
            self.right = &self.right * &h;
            self.log_det_right += log_det_h;
        }
        Ok(StepRecord {
            side,
            delta,
            log_det_h,
            n_prime: n,
        })
    }
}

impl ScalingAdapter for OperatorAdapter {
    fn trivial_check(&self) -> Option<String> {
        if is_near_singular(&psd(self.marginal(Side::Left))) {
            return Some("Σ A_i A_i† is singular".into());
        }
        if is_near_singular(&psd(self.marginal(Side::Right))) {
            return Some("Σ A_i† A_i is singular".into());
        }
        None
    }

    fn ds_tilde(&self) -> f64 {
        self.deviation(Side::Left) + self.deviation(Side::Right)
    }

    fn normalize(&mut self, eps_tilde: f64) -> Result<StepRecord> {
        if self.deviation(Side::Left) > eps_tilde / 2.0 {
            self.apply(Side::Left)
        } else {
            self.apply(Side::Right)
        }
    }

    fn renormalize(&mut self) {
        let norm = self.norm();
        if norm > 0.0 && norm != 1.0 {
            self.mats = self.mats.iter().map(|m| m.scale_real(1.0 / norm)).collect();
            self.left = self.left.scale_real(1.0 / norm);
            self.log_det_left -= self.n() as f64 * norm.ln();
        }
    }

    fn norm(&self) -> f64 {
        self.mats
            .iter()
            .map(ComplexMatrix::frobenius_norm_sq)
            .sum::<f64>()
            .sqrt()
    }

    fn log_potential(&self, witness: &PotentialWitness) -> Option<f64> {
        match witness {
            PotentialWitness::LeftRight { k, d } => Some(log_left_right(*k, d, &self.mats)),
            _ => None,
        }
    }

    fn log_capacity(&self) -> f64 {
        let n = self.n() as f64;
        2.0 * self.norm().ln() - 2.0 / n * (self.log_det_left + self.log_det_right)
    }

    fn health(&self) -> Option<String> {
        let cl = self.left.condition_number();
        let cr = self.right.condition_number();
        (cl.max(cr) > MAX_SCALER_CONDITION)
            .then(|| format!("scalers ill-conditioned: cond(B) = {cl:.3e}, cond(C) = {cr:.3e}"))
    }
}

pub(crate) struct GurvitsRun {
    pub report: ScalingReport,
    pub adapter: OperatorAdapter,
}

/// Left-right witness degree `k = max(1, n − 1)`.
pub fn witness_degree(n: usize) -> usize {
    n.saturating_sub(1).max(1)
}

pub(crate) fn gurvits_with(
    a: &MatrixTuple,
    opts: &ScalingOptions,
    mut adapter: OperatorAdapter,
) -> Result<GurvitsRun> {
    opts.validate()?;
    let n = a.n();
    let nf = n as f64;
    let b = a.bit_complexity();
    let eps_tilde = opts.epsilon / (nf * nf);
    let budget = opts
        .budget_override
        .unwrap_or_else(|| operator_budget(n, b, opts.epsilon, opts.budget_constant));
    let unified_budget =
        AnalysisBound::operator(n, 1, b, eps_tilde).unified_budget(opts.budget_constant);

    let trivial = adapter.trivial_check();
    let mut tracker = if opts.track_potential && trivial.is_none() {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        sample_left_right_tracker(&mut rng, adapter.iterate(), witness_degree(n))
    } else {
        PotentialTracker::disabled(None)
    };
    let template = run_template(&mut adapter, eps_tilde, budget, &mut tracker)?;
    let mut notes: Vec<String> = tracker.note.iter().cloned().collect();

    let n2 = nf * nf;
    let trace: Vec<TraceRow> = template
        .trace
        .iter()
        .map(|r| TraceRow {
            ds: r.ds * n2,
            ..r.clone()
        })
        .collect();
    let (mut status, certificate) = match &template.status {
        TemplateStatus::Converged => (Status::Converged, Certificate::None),
        TemplateStatus::TrivialFailure(reason) => {
            notes.push(reason.clone());
            match trivial_witness(a) {
                Some(w) => (Status::NotScalable, Certificate::ShrunkSubspace(w)),
                None => (
                    Status::NotScalable,
                    Certificate::TrivialCheck {
                        reason: reason.clone(),
                    },
                ),
            }
        }
        TemplateStatus::BudgetExhausted => (Status::BudgetExhausted, Certificate::None),
        TemplateStatus::Aborted(reason) => {
            notes.push(reason.clone());
            (Status::BudgetExhausted, Certificate::None)
        }
    };
    let trivial_failure = matches!(template.status, TemplateStatus::TrivialFailure(_));
    let scalers = if trivial_failure {
        Scalers::None
    } else {
        let (left, right) = adapter.public_scalers();
        notes.push(format!(
            "cond(B) = {:.3e}, cond(C) = {:.3e}",
            left.condition_number(),
            right.condition_number()
        ));
        if status == Status::Converged {
            let reproduced = ds_op(&a.act(&left, &right));
            if !(reproduced <= opts.epsilon * (1.0 + REPRODUCTION_SLACK)) {
                status = Status::Undetermined;
                notes.push(format!(
                    "the returned scalers give ds = {reproduced:.3e} > ε; the iterate drifted through rounding"
                ));
            }
        }
        Scalers::Operator { left, right }
    };
    let final_ds = if trivial_failure {
        ds_op(a)
    } else {
        ds_op(&adapter.public_iterate())
    };
    let report = ScalingReport {
        status,
        scalers,
        iterations: template.iterations,
        epsilon: opts.epsilon,
        final_ds,
        trace: if trace.is_empty() {
            vec![TraceRow {
                iter: 0,
                ds: final_ds,
                potential: None,
                side: Side::Start,
                norm: a.norm_sq().sqrt(),
            }]
        } else {
            trace
        },
        certificate,
        bit_complexity: b,
        budget,
        unified_budget,
        capacity_estimate: (!template.log_capacity.is_empty())
            .then(|| template.min_log_capacity().exp()),
        potential_available: tracker.is_enabled(),
        notes,
    };
    Ok(GurvitsRun { report, adapter })
}

/// Alternating left/right normalization until `ds(B A C) ≤ ε`.
///
/// A singular marginal yields `NotScalable` with a shrunk-subspace witness;
/// running out of iterations yields `BudgetExhausted`.
pub fn gurvits_scale(a: &MatrixTuple, opts: &ScalingOptions) -> Result<ScalingReport> {
    Ok(gurvits_with(a, opts, OperatorAdapter::new(a))?.report)
}
