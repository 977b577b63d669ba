//! Deterministic `eⁿ`-approximation of the permanent through Sinkhorn scaling.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::report::{Scalers, ScalingOptions, Status};

use super::nonneg::NonNegMatrix;
use super::sinkhorn::sinkhorn;

/// Interval `[lo, hi]` containing `perm(A)`, with the scaling run behind it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PermanentInterval {
    pub lo: f64,
    pub hi: f64,
    pub log_lo: f64,
    pub log_hi: f64,
    pub iterations: usize,
    pub final_ds: f64,
}

/// `ln(n! / nⁿ)`.
fn log_van_der_waerden(n: usize) -> f64 {
    (1..=n).map(|k| (k as f64).ln()).sum::<f64>() - n as f64 * (n as f64).ln()
}

/// Scales `A` to `ds(BAC) ≤ ε` and returns
/// `hi = (∏B∏C)⁻¹ e^{n√ε}`, `lo = (∏B∏C)⁻¹ (n!/nⁿ) e^{−n√ε}`.
///
/// `e^{±n√ε}` absorbs the distance of `BAC` from the doubly stochastic
/// matrix; with `ds ≤ ε` every row sum is within `√ε` of 1, so the upper
/// end is rigorous by `perm(D) ≤ ∏ row sums`.
pub fn permanent_approx(a: &NonNegMatrix, opts: &ScalingOptions) -> Result<PermanentInterval> {
    let report = sinkhorn(a, &opts.clone().without_potential())?;
    match report.status {
        Status::Converged => {}
        Status::NotScalable => {
            return Err(Error::NotScalable(
                "the support has no perfect matching, so perm(A) = 0".into(),
            ))
        }
        _ => {
            return Err(Error::NotScalable(format!(
                "scaling did not reach ds ≤ {} within {} iterations",
                opts.epsilon, report.budget
            )))
        }
    }
    let Scalers::Diagonal { row, col } = &report.scalers else {
        return Err(Error::Internal("converged run without scalers".into()));
    };
    let n = a.n();
    let log_scale: f64 = row.iter().chain(col).map(|x| x.ln()).sum();
    let slack = n as f64 * report.final_ds.max(0.0).sqrt().max(opts.epsilon.sqrt());
    let log_hi = -log_scale + slack;
    let log_lo = -log_scale + log_van_der_waerden(n) - slack;
    Ok(PermanentInterval {
        lo: log_lo.exp(),
        hi: log_hi.exp(),
        log_lo,
        log_hi,
        iterations: report.iterations,
        final_ds: report.final_ds,
    })
}
