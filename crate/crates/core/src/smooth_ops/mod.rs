//! Finite sections of the algebra of rapidly decreasing matrices: graded
//! weighted norms `‖x‖_q = ‖D_q x D_q‖`, rank-one projections, orthonormal
//! families and their profiles.

mod norms;
mod operator;
mod profile;

pub use norms::{gram_schmidt_l2, GradedNormSystem, ProjectionFamily};
pub use operator::{rank_one, spectral_norm, CVector, FiniteOperator};
pub use profile::{block_householder_family, check_dominating_l2, envelope_slope, profile, DominatingReport, Family};

use crate::growth_dsl::DslError;

#[derive(Debug, thiserror::Error)]
pub enum SmoothError {
    #[error("grade {q} out of range (system has {grades} grades)")]
    GradeOutOfRange { q: usize, grades: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("operator has non-finite entries")]
    NonFinite,
    #[error("zero vector")]
    ZeroVector,
    #[error("vector {index} is numerically dependent on its predecessors (residual {residual:e})")]
    RankDeficient { index: usize, residual: f64 },
    #[error("empty family")]
    EmptyFamily,
    #[error("member {index} is not a self-adjoint projection (defect {defect:e})")]
    NotAProjection { index: usize, defect: f64 },
    #[error("members {i} and {j} are not orthogonal (‖P_i P_j‖ = {defect:e})")]
    NotOrthogonal { i: usize, j: usize, defect: f64 },
    #[error("profile is not column-monotone")]
    NotMonotone,
    #[error(transparent)]
    Dsl(#[from] DslError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
