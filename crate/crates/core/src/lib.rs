//! Decision procedures and finite-section numerics for Köthe matrices, the
//! algebra of rapidly decreasing matrices, and quasi-equivalence of bases.

pub mod growth_dsl;
pub mod matrix_calculus;
pub mod cli;
pub mod norm_lab;
pub mod quasi_equiv;
pub mod smooth_ops;
pub mod verdict;

pub use verdict::{AffineTemplate, Certificate, CertificateCode, ConstantBound, Evidence, State, Verdict, Witness};
