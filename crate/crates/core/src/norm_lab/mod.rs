//! Finite-dimensional models of the norm constructions on short exact
//! sequences `0 → E → F → G → 0`: inf-convolution norms, exact extension
//! of a Hilbert norm from `E` to `F`, and dominating extensions.
//!
//! In finite dimensions every normed space is complete, so no completion
//! step is modelled.

mod lemmas;
mod model;
mod suite;

pub use lemmas::{
    dominating_extension, extend_hilbert_norm, extend_with, inf_convolution_norm, inf_convolution_with,
    quotient_norm, random_gram, random_model, verify_lemma35, DominatingExtensionReport, Lemma35Instance,
    Lemma35Report, LevelReport, DOMINATION_BOUND, SQRT3,
};
pub use model::{HilbertNorm, NormLadder, SubspaceModel};
pub(crate) use model::log_sum_exp;
pub use suite::{run_suite, SuiteConfig, SuiteReport};

#[derive(Debug, thiserror::Error)]
pub enum NormError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("Gram matrix is not symmetric (defect {0:e})")]
    NotSymmetric(f64),
    #[error("Gram matrix is not positive definite (smallest eigenvalue {0:e})")]
    NotPositiveDefinite(f64),
    #[error("singular Gram matrix")]
    SingularGram,
    #[error("subspace basis is not orthonormal (defect {0:e})")]
    NotOrthonormal(f64),
    #[error("degenerate subspace model")]
    DegenerateModel,
    #[error("‖·‖₁ does not dominate ‖·‖_E on E (deficit {deficit:e}) at {witness:?}")]
    PreconditionViolated { deficit: f64, witness: Vec<f64> },
    #[error("{check} violated (ratio {value}) at {vector:?}")]
    InequalityViolated { check: &'static str, value: f64, vector: Vec<f64> },
    #[error("ladder is not monotone at level {level}")]
    NotMonotone { level: usize },
    #[error("ladder is not log-convex at level {level}")]
    NotLogConvex { level: usize },
    #[error("ladder level {level} unavailable ({levels} levels)")]
    LevelOutOfRange { level: usize, levels: usize },
    #[error("unknown ladder weights '{0}' (expected \"j^k\")")]
    UnknownWeights(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl NormError {
    pub(crate) fn inequality(check: &'static str, value: f64, x: &nalgebra::DVector<f64>) -> Self {
        NormError::InequalityViolated { check, value, vector: x.iter().copied().collect() }
    }
}
