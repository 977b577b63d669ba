//! Sinkhorn scaling of non-negative matrices, matching-based scalability,
//! `(r, c)`-marginal scaling and the permanent approximation.

mod matching;
mod nonneg;
mod permanent;
mod sinkhorn;

pub use matching::{is_scalable, MatchingCertificate};
pub use nonneg::{ds, ds_rows, NonNegMatrix};
pub use permanent::{permanent_approx, PermanentInterval};
pub use sinkhorn::{sinkhorn, sinkhorn_decides_scalable, sinkhorn_rc, MatrixAdapter};
