use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::SmoothError;

pub type CVector = DVector<Complex64>;

/// An `N × N` complex matrix acting on the first `N` coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteOperator {
    entries: DMatrix<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct OperatorJson {
    dim: usize,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

impl FiniteOperator {
    pub fn new(entries: DMatrix<Complex64>) -> Result<Self, SmoothError> {
        if entries.nrows() != entries.ncols() {
            return Err(SmoothError::DimensionMismatch { expected: entries.nrows(), found: entries.ncols() });
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(SmoothError::NonFinite);
        }
        Ok(FiniteOperator { entries })
    }

    pub fn identity(dim: usize) -> Self {
        FiniteOperator { entries: DMatrix::identity(dim, dim) }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn adjoint(&self) -> Self {
        FiniteOperator { entries: self.entries.adjoint() }
    }

    pub fn compose(&self, other: &Self) -> Result<Self, SmoothError> {
        self.same_dim(other)?;
        Ok(FiniteOperator { entries: &self.entries * &other.entries })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, SmoothError> {
        self.same_dim(other)?;
        Ok(FiniteOperator { entries: &self.entries - &other.entries })
    }

    fn same_dim(&self, other: &Self) -> Result<(), SmoothError> {
        if self.dim() != other.dim() {
            return Err(SmoothError::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        Ok(())
    }

    /// Plain ℓ₂ operator norm.
    pub fn l2_norm(&self) -> f64 {
        spectral_norm(&self.entries)
    }

    pub fn from_json(text: &str) -> Result<Self, SmoothError> {
        let j: OperatorJson = serde_json::from_str(text)?;
        let n = j.dim;
        let shape_ok = |m: &Vec<Vec<f64>>| m.len() == n && m.iter().all(|r| r.len() == n);
        if !shape_ok(&j.re) || !shape_ok(&j.im) {
            return Err(SmoothError::DimensionMismatch { expected: n, found: j.re.len() });
        }
        Self::new(DMatrix::from_fn(n, n, |r, c| Complex64::new(j.re[r][c], j.im[r][c])))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let n = self.dim();
        let grab = |f: fn(&Complex64) -> f64| -> Vec<Vec<f64>> {
            (0..n).map(|r| (0..n).map(|c| f(&self.entries[(r, c)])).collect()).collect()
        };
        serde_json::to_value(OperatorJson { dim: n, re: grab(|z| z.re), im: grab(|z| z.im) })
            .expect("plain numeric arrays serialize")
    }
}

/// `ξ ↦ ⟨ξ, f⟩ f`, i.e. the matrix `f f*`.
pub fn rank_one(f: &CVector) -> Result<FiniteOperator, SmoothError> {
    if f.iter().all(|z| *z == Complex64::new(0.0, 0.0)) {
        return Err(SmoothError::ZeroVector);
    }
    FiniteOperator::new(f * f.adjoint())
}

/// Dimension up to which the full SVD is used; above it, power iteration
/// on `M*M`.
const SVD_LIMIT: usize = 96;

/// Largest singular value, deterministic for a given input.
pub fn spectral_norm(m: &DMatrix<Complex64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    if m.nrows().max(m.ncols()) <= SVD_LIMIT {
        return m.singular_values().max();
    }
    power_iteration(m)
}

fn power_iteration(m: &DMatrix<Complex64>) -> f64 {
    let n = m.ncols();
    let mut v = DVector::from_fn(n, |i, _| Complex64::new(1.0 + i as f64 / n as f64, 0.0));
    v /= Complex64::from(v.norm());
    let mut sigma = 0.0;
    for _ in 0..20_000 {
        let mv = m * &v;
        let next_sigma = mv.norm();
        let w = m.ad_mul(&mv);
        let wn = w.norm();
        if wn == 0.0 {
            return next_sigma;
        }
        v = w / Complex64::from(wn);
        if (next_sigma - sigma).abs() <= 1e-15 * next_sigma {
            return next_sigma;
        }
        sigma = next_sigma;
    }
    sigma
}
