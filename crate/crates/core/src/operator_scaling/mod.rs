//! Operator scaling of matrix tuples under the left-right action, the
//! rank-nondecreasing test with shrunk-subspace witnesses, and the
//! randomized determinant-polynomial oracle.

mod detpoly;
mod gurvits;
mod tuple;
mod witness;

pub use detpoly::{detpoly_oracle, DetPolyVerdict};
pub use gurvits::{gurvits_scale, witness_degree, OperatorAdapter, MAX_SCALER_CONDITION};
pub use tuple::{ds_op, unit_matrix, MatrixTuple};
pub use witness::{
    find_shrunk_subspace, is_dim_nondecreasing, RankDecision, ShrunkSubspaceWitness, WITNESS_TOL,
};
