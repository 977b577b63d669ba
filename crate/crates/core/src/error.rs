use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("matrix is near-singular: smallest eigenvalue {min_eigenvalue:e} below threshold {threshold:e}")]
    NearSingular { min_eigenvalue: f64, threshold: f64 },

    #[error("matrix is not Hermitian within tolerance (deviation {0:e})")]
    NotHermitian(f64),

    #[error("matrix is not positive semidefinite (eigenvalue {0:e})")]
    NotPositiveSemidefinite(f64),

    #[error("dimension {n} exceeds the supported maximum {max}")]
    DimensionTooLarge { n: usize, max: usize },

    #[error("problem size exceeds desk-scale limits: {0}")]
    SizeLimit(String),

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("invalid entry: {0}")]
    InvalidEntry(String),

    #[error("row and column marginals have different totals ({row_total} vs {col_total})")]
    MarginalMismatch { row_total: f64, col_total: f64 },

    #[error("target marginals must be strictly positive")]
    NonPositiveMarginal,

    #[error("not scalable: {0}")]
    NotScalable(String),

    #[error("potential witness evaluates to zero at the initial instance")]
    WitnessDegenerate,

    #[error("slice decomposition does not reconstruct the tensor (residual {0:e})")]
    BadWitness(f64),

    #[error("vectors are not in general position: subset {0:?} is linearly dependent")]
    NotGeneralPosition(Vec<usize>),

    #[error("internal invariant broken: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
