//! Tri-state decision procedures for relations between Köthe matrices, and
//! numeric probes that cross-check them on truncations.

mod classify;
mod kernel;
mod probe;
mod relations;

pub use classify::{classify, probe_classification, ClassVerdicts, ClassificationReport, ProbeCheck, ProbeReport};
pub use kernel::{bounded_above, summable, MergedBasis};
pub use probe::{
    consistency_check, ls_slope, probe_dn, probe_domination, probe_nuclearity, sweep_nuclearity, trend_slope, DnProbe,
    NuclearityProbe, NuclearitySweep, ProbeSignal, RatioProbe, DIVERGENCE_SLOPE,
};
pub use relations::{
    dominated_by, equivalent, has_continuous_norm_row, has_dn, is_algebra, is_nuclear, is_sqrt_closed, templates,
    verify_domination_template, MAX_OFFSET, MAX_P, MAX_SLOPE,
};

use crate::growth_dsl::DslError;
use crate::verdict::Certificate;

#[derive(Debug, thiserror::Error)]
pub enum CalculusError {
    #[error("combination has {combo} coefficients but the merged basis has {basis}")]
    UnmergedBasis { basis: usize, combo: usize },
    #[error("basis function {0} is declared with different classes")]
    Unmergeable(String),
    #[error("matrix {name} violates the Köthe axioms{}", .certificate.as_ref().map(|c| format!(" at q = {}, j = {:?}", c.q0, c.j)).unwrap_or_default())]
    NotKoethe { name: String, certificate: Option<Certificate> },
    #[error("grade {requested} outside a grid with {cols} columns")]
    RangeExceedsGrid { requested: usize, cols: usize },
    #[error("grids have different row counts ({left} vs {right})")]
    GridMismatch { left: usize, right: usize },
    #[error(transparent)]
    Dsl(#[from] DslError),
}
