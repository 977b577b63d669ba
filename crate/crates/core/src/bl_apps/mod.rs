//! Brascamp-Lieb feasibility and scaling to geometric position, Forster's
//! radial isotropic position, and linear matroid intersection membership.

mod datum;
mod feasibility;
mod forster;
mod matroid;
mod scale;

pub use datum::{is_geometric, BLDatum, GeometricityReport};
pub use feasibility::{
    bl_feasibility_check, bl_feasibility_check_seeded, BLFeasibility, DEFAULT_BL_SEED,
    RANDOM_SUBSPACES,
};
pub use forster::{forster_scale, general_position_violation, ForsterScaling};
pub use matroid::{matroid_intersection_membership, MatroidMembership, MatroidPair, Membership};
pub use scale::{bl_scale, BLScaling, BLStatus};
