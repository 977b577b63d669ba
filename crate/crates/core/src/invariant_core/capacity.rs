//! Trajectory upper bounds on the capacity `inf_g ‖g·v‖²`.

use serde::Serialize;

use crate::error::Result;
use crate::invariant_core::potential::PotentialTracker;
use crate::invariant_core::template::{run_template, ScalingAdapter};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CapacityEstimate {
    /// Smallest `‖g·v‖²` seen (an upper bound on the capacity).
    pub value: f64,
    /// Running minimum after each iteration, starting with the input.
    pub trajectory: Vec<f64>,
    /// Set when the trivial check already certifies capacity zero.
    pub trivially_zero: bool,
    pub iterations: usize,
}

/// Runs the template for up to `budget` steps (target ds̃ `eps_tilde`) and
/// records the normalized squared norms along the way.
pub fn capacity_estimate<A: ScalingAdapter>(
    adapter: &mut A,
    eps_tilde: f64,
    budget: u64,
) -> Result<CapacityEstimate> {
    if adapter.trivial_check().is_some() {
        return Ok(CapacityEstimate {
            value: 0.0,
            trajectory: vec![0.0],
            trivially_zero: true,
            iterations: 0,
        });
    }
    let mut tracker = PotentialTracker::disabled(None);
    let run = run_template(adapter, eps_tilde, budget, &mut tracker)?;
    let mut best = f64::INFINITY;
    let trajectory: Vec<f64> = run
        .log_capacity
        .iter()
        .map(|&l| {
            best = best.min(l.exp());
            best
        })
        .collect();
    Ok(CapacityEstimate {
        value: best,
        trajectory,
        trivially_zero: false,
        iterations: run.iterations,
    })
}
