//! Matrix, operator and tensor scaling by alternating minimization, with
//! exact null-cone certificates and the applications built on them:
//! permanent approximation, Brascamp-Lieb feasibility, Forster's radial
//! isotropic position and linear matroid intersection membership.

pub mod bl_apps;
pub mod error;
pub mod invariant_core;
pub mod matrix_scaling;
pub mod numerics;
pub mod operator_scaling;
pub mod report;
pub mod tensor_scaling;

pub use error::{Error, Result};
pub use report::{Certificate, Scalers, ScalingOptions, ScalingReport, Side, Status, TraceRow};
