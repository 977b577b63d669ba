//! Tensor scaling under products of special linear groups, exact support
//! deficiency certificates and the slice-rank consistency probe.

mod deficiency;
mod scale;
mod slicerank;

pub use deficiency::{
    deficiency_check, tensor_deficiency, DeficiencyCertificate, DeficiencyVerdict,
};
pub use scale::{
    ds_tensor, marginals, tensor_bit_complexity, tensor_scale, tensor_scale_with_bits,
    TensorAdapter, MAX_LOCAL_CONDITION,
};
pub use slicerank::{
    slicerank_nullcone_probe, SliceDecomposition, SliceRankEvidence, SliceRankVerdict, SliceTerm,
    RECONSTRUCTION_TOL,
};
