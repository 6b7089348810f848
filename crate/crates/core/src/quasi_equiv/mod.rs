//! Finite quasi-equivalence: a permutation and row scalars carrying one
//! norm profile onto another, found by bottleneck assignment.

mod assignment;
mod generators;
mod relation;

pub use assignment::{bottleneck, hopcroft_karp, hungarian};
pub use generators::{mityagin_pair, planted_pair, power_series_profile, random_orthonormal_family, Plant, PlantedPair};
pub use relation::{
    align, match_profiles, normalize_profile, pair_cost, row_separation, square_witness, verify_quasi_equivalence,
    MatchResult, MatchStatus, SquareWitnessReport, APPROXIMATE_LIMIT, EXACT_TOLERANCE,
};

use crate::growth_dsl::DslError;

#[derive(Debug, thiserror::Error)]
pub enum QuasiError {
    #[error("grid shapes differ: {left:?} vs {right:?}")]
    DimensionMismatch { left: (usize, usize), right: (usize, usize) },
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("scalar {index} is {value}; scalars must be positive")]
    NonPositiveScalar { index: usize, value: f64 },
    #[error("constant C = {0} must be positive and finite")]
    BadConstant(f64),
    #[error("instance needs n ≥ 1 and at least one grade")]
    EmptyInstance,
    #[error(transparent)]
    Dsl(#[from] DslError),
}
