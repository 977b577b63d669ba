//! Machinery shared by all scaling flavors: the template loop, potentials,
//! torus null-cone certificates, moment maps, capacity and iteration budgets.

pub mod bounds;
pub mod capacity;
pub mod moment;
pub mod potential;
pub mod template;
pub mod torus;

pub use bounds::{matrix_budget, operator_budget, robust_amgm_bound, tensor_budget, AnalysisBound};
pub use capacity::{capacity_estimate, CapacityEstimate};
pub use moment::{left_right_moment_map, matrix_moment_map, torus_moment_map};
pub use potential::{
    potential_eval, PotentialInstance, PotentialKind, PotentialTracker, PotentialWitness,
};
pub use template::{run_template, ScalingAdapter, StepRecord, TemplateRun, TemplateStatus};
pub use torus::{
    torus_nullcone, verify_subgroup, verify_torus_witness, NullConeVerdict, OneParamSubgroup,
    TorusFactor, TorusVector, TorusWitness, WeightSystem,
};
