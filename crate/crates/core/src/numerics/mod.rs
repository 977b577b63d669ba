//! Shared linear algebra: complex matrices, Hermitian eigensolver, tensor
//! flattenings, exact rationals, the exact simplex and the permanent oracle.

pub mod lp;
pub mod matrix;
pub mod permanent;
pub mod rational;
pub mod tensor;

pub use lp::{
    find_feasible_point, lp_strict_feasible, solve_standard_form, ConvexWitness, LpCertificate,
    LpOutcome, StrictFeasibility, StrictSystem,
};
pub use matrix::{
    expm_hermitian, hermitian_eigen, inv_sqrt_psd, is_near_singular, kron, ComplexMatrix,
    HermitianEigen, HermitianPsd,
};
pub use permanent::{permanent_exact, permanent_f64, permanent_rational};
pub use rational::{bit_length, parse_rational, Rational};
pub use tensor::TensorTuple;

/// Flattening of `a` along the 0-indexed `axis`.
pub fn flatten(a: &TensorTuple, axis: usize) -> ComplexMatrix {
    a.flatten(axis)
}
