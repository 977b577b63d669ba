//! The common alternating-minimization loop shared by the scaling flavors.
//!
//! Adapters keep their iterate at unit norm and measure progress with ds̃,
//! the distance to the normalized stochastic form.

use crate::error::{Error, Result};
use crate::invariant_core::potential::{PotentialTracker, PotentialWitness};
use crate::report::{Side, TraceRow};

/// What one normalization step did.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub side: Side,
    /// `Σ (λ_i − 1)²` over the eigenvalues (or sums) of the normalized block, before the step.
    pub delta: f64,
    /// `ln det ĥ` of the normalizing map on that block.
    pub log_det_h: f64,
    /// Dimension of the normalized block.
    pub n_prime: usize,
}

/// A scaling problem as seen by [`run_template`].
pub trait ScalingAdapter {
    /// `Some(reason)` when the instance fails the flavor's trivial check.
    fn trivial_check(&self) -> Option<String>;
    /// Distance of the current unit-norm iterate to the normalized stochastic form.
    fn ds_tilde(&self) -> f64;
    /// Chooses and applies one normalization.
    fn normalize(&mut self, eps_tilde: f64) -> Result<StepRecord>;
    /// Rescales the iterate back to unit norm.
    fn renormalize(&mut self);
    /// Norm of the current iterate.
    fn norm(&self) -> f64;
    /// `ln Φ` of the current iterate for a witness matching this flavor.
    fn log_potential(&self, witness: &PotentialWitness) -> Option<f64>;
    /// `ln ‖g·v‖²` for the accumulated scaling `g` rescaled to determinant one.
    fn log_capacity(&self) -> f64;
    /// `Some(reason)` when the scalers have become too ill-conditioned to continue.
    fn health(&self) -> Option<String> {
        None
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TemplateStatus {
    Converged,
    TrivialFailure(String),
    BudgetExhausted,
    Aborted(String),
}

/// Outcome of [`run_template`]; trace distances are ds̃ values.
#[derive(Debug, Clone, PartialEq)]
pub struct TemplateRun {
    pub status: TemplateStatus,
    pub iterations: usize,
    pub trace: Vec<TraceRow>,
    pub steps: Vec<StepRecord>,
    /// `ln ‖g·v‖²` for each trace row.
    pub log_capacity: Vec<f64>,
}

impl TemplateRun {
    pub fn final_ds_tilde(&self) -> f64 {
        self.trace.last().map_or(f64::NAN, |r| r.ds)
    }

    pub fn min_log_capacity(&self) -> f64 {
        self.log_capacity
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }
}

fn potential_of<A: ScalingAdapter>(adapter: &A, tracker: &PotentialTracker) -> Option<f64> {
    if tracker.is_enabled() {
        adapter.log_potential(&tracker.witness).map(f64::exp)
    } else {
        None
    }
}

/// Runs normalization steps while `ds̃ > eps_tilde` and fewer than `budget` steps were taken.
///
/// Fails with [`Error::WitnessDegenerate`] if the tracker's potential is zero
/// on the starting iterate.
pub fn run_template<A: ScalingAdapter>(
    adapter: &mut A,
    eps_tilde: f64,
    budget: u64,
    tracker: &mut PotentialTracker,
) -> Result<TemplateRun> {
    let mut run = TemplateRun {
        status: TemplateStatus::BudgetExhausted,
        iterations: 0,
        trace: Vec::new(),
        steps: Vec::new(),
        log_capacity: Vec::new(),
    };
    if let Some(reason) = adapter.trivial_check() {
        run.status = TemplateStatus::TrivialFailure(reason);
        return Ok(run);
    }
    adapter.renormalize();

    let phi0 = potential_of(adapter, tracker);
    if tracker.is_enabled() {
        match phi0 {
            Some(p) if p > 0.0 && p.is_finite() => tracker.values.push(p),
            _ => return Err(Error::WitnessDegenerate),
        }
    }
    let mut ds = adapter.ds_tilde();
    run.log_capacity.push(adapter.log_capacity());
    run.trace.push(TraceRow {
        iter: 0,
        ds,
        potential: phi0,
        side: Side::Start,
        norm: adapter.norm(),
    });

    while ds > eps_tilde {
        if run.iterations as u64 >= budget {
            run.status = TemplateStatus::BudgetExhausted;
            return Ok(run);
        }
        let step = match adapter.normalize(eps_tilde) {
            Ok(s) => s,
            Err(e) => {
                run.status = TemplateStatus::Aborted(e.to_string());
                return Ok(run);
            }
        };
        adapter.renormalize();
        run.iterations += 1;
        ds = adapter.ds_tilde();
        let phi = potential_of(adapter, tracker);
        if let Some(p) = phi {
            tracker.values.push(p);
        }
        run.log_capacity.push(adapter.log_capacity());
        run.trace.push(TraceRow {
            iter: run.iterations,
            ds,
            potential: phi,
            side: step.side,
            norm: adapter.norm(),
        });
        run.steps.push(step);
        if ds <= eps_tilde {
            break;
        }
        if let Some(reason) = adapter.health() {
            run.status = TemplateStatus::Aborted(reason);
            return Ok(run);
        }
        if !ds.is_finite() {
            run.status = TemplateStatus::Aborted("non-finite distance".into());
            return Ok(run);
        }
    }
    run.status = TemplateStatus::Converged;
    Ok(run)
}
