//! Symbolic Köthe matrix families `a_{j,q} = exp(Σ_k c_k(q)·φ_k(j))` over a
//! growth-ordered basis, their DSL, and finite tabulations.

mod basis;
mod parser;
mod poly;
mod spec;
mod tabulated;

pub use basis::{BasisKind, GrowthBasisFunction, GrowthClass};
pub use parser::{parse_file, parse_spec};
pub use poly::{rational_to_f64, CoefficientPoly, GradePoint, Rational, Sign, SIGN_WINDOW};
pub use spec::KoetheMatrixSpec;
pub use tabulated::{Provenance, TabulatedMatrix};
pub(crate) use tabulated::check_bijection;

#[derive(Debug, thiserror::Error)]
pub enum DslError {
    #[error("syntax error at {line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("unknown growth class '{name}' at {line}:{col}")]
    UnknownClass { line: usize, col: usize, name: String },
    #[error("undeclared sequence '{name}' at {line}:{col}")]
    UndeclaredSequence { line: usize, col: usize, name: String },
    #[error("non-positive power exponent {0}")]
    NonPositiveExponent(String),
    #[error("duplicate basis function {0}")]
    DuplicateBasis(String),
    #[error("declared class inconsistent with basis function {0}")]
    InconsistentClass(String),
    #[error("no sequence named '{0}'")]
    UnknownSequence(String),
    #[error("missing sample value for sequence '{name}' at j = {j}")]
    MissingSample { name: String, j: u64 },
    #[error("sample {index} of {name} is {value}; samples must be finite and nonnegative")]
    BadSample { name: String, index: usize, value: f64 },
    #[error("row index j = {0} out of range (j ≥ 1)")]
    IndexOutOfRange(u64),
    #[error("expected exactly one matrix block, found {0}")]
    BlockCount(usize),
    #[error("empty input")]
    EmptyInput,
    #[error("row {row} has a different length than row 1")]
    RaggedGrid { row: usize },
    #[error("entry at row {row}, column {col} is {value}; entries must be positive and finite")]
    NonPositiveEntry { row: usize, col: usize, value: f64 },
    #[error("entry at row {row}, column {col} is not representable as a finite positive f64")]
    Unrepresentable { row: usize, col: usize },
    #[error("permutation is not a bijection")]
    NotABijection,
    #[error("scalar {index} is {value}; scalars must be positive")]
    NonPositiveScalar { index: usize, value: f64 },
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("cannot parse number '{0}'")]
    BadNumber(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
