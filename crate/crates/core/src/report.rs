//! Result types shared by every scaling flavor.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix_scaling::MatchingCertificate;
use crate::numerics::ComplexMatrix;
use crate::operator_scaling::ShrunkSubspaceWitness;
use crate::tensor_scaling::DeficiencyCertificate;

/// Default constant in the iteration budgets.
pub const DEFAULT_BUDGET_CONSTANT: f64 = 10.0;

/// Outcome class of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Converged,
    NotScalable,
    BudgetExhausted,
    Undetermined,
    Error,
}

impl Status {
    /// Process exit code associated with the status.
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Converged => 0,
            Status::NotScalable => 2,
            Status::BudgetExhausted | Status::Undetermined => 3,
            Status::Error => 1,
        }
    }
}

/// Which normalization an iteration applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    Start,
    Row,
    Column,
    Left,
    Right,
    Axis(usize),
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Side::Start => write!(f, "start"),
            Side::Row => write!(f, "row"),
            Side::Column => write!(f, "column"),
            Side::Left => write!(f, "left"),
            Side::Right => write!(f, "right"),
            Side::Axis(i) => write!(f, "axis{}", i + 1),
        }
    }
}

/// One row of the iteration trace; row 0 describes the input.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRow {
    pub iter: usize,
    pub ds: f64,
    pub potential: Option<f64>,
    pub side: Side,
    pub norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Scalers {
    None,
    /// Diagonal entries of `B` and `C` in `BAC`.
    Diagonal {
        row: Vec<f64>,
        col: Vec<f64>,
    },
    /// `(B, C)` acting as `A_i ↦ B A_i C`.
    Operator {
        left: ComplexMatrix,
        right: ComplexMatrix,
    },
    /// `(g_1, ..., g_d)` acting on each tensor axis.
    Local {
        factors: Vec<ComplexMatrix>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Certificate {
    None,
    Matching(MatchingCertificate),
    TrivialCheck { reason: String },
    Deficiency(DeficiencyCertificate),
    ShrunkSubspace(ShrunkSubspaceWitness),
}

/// Outcome of a scaling run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingReport {
    pub status: Status,
    pub scalers: Scalers,
    pub iterations: usize,
    pub epsilon: f64,
    pub final_ds: f64,
    pub trace: Vec<TraceRow>,
    pub certificate: Certificate,
    pub bit_complexity: u64,
    pub budget: u64,
    /// Budget from the potential-function analysis with the same constant.
    pub unified_budget: u64,
    /// Smallest normalized squared norm seen along the trajectory.
    pub capacity_estimate: Option<f64>,
    pub potential_available: bool,
    pub notes: Vec<String>,
}

impl ScalingReport {
    pub fn converged(&self) -> bool {
        self.status == Status::Converged
    }

    pub fn ds_trace(&self) -> Vec<f64> {
        self.trace.iter().map(|r| r.ds).collect()
    }

    pub fn potential_trace(&self) -> Vec<f64> {
        self.trace.iter().filter_map(|r| r.potential).collect()
    }
}

/// Run configuration shared by the scaling algorithms.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingOptions {
    pub epsilon: f64,
    pub budget_constant: f64,
    pub budget_override: Option<u64>,
    pub seed: u64,
    pub track_potential: bool,
}

impl Default for ScalingOptions {
    fn default() -> Self {
        Self {
            epsilon: 1e-6,
            budget_constant: DEFAULT_BUDGET_CONSTANT,
            budget_override: None,
            seed: 0,
            track_potential: true,
        }
    }
}

impl ScalingOptions {
    pub fn new(epsilon: f64) -> Self {
        Self {
            epsilon,
            ..Self::default()
        }
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget_override = Some(budget);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_budget_constant(mut self, c: f64) -> Self {
        self.budget_constant = c;
        self
    }

    pub fn without_potential(mut self) -> Self {
        self.track_potential = false;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::PreconditionViolated(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if !(self.budget_constant > 0.0 && self.budget_constant.is_finite()) {
            return Err(Error::PreconditionViolated(format!(
                "budget constant must be positive, got {}",
                self.budget_constant
            )));
        }
        Ok(())
    }
}
