use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::NormError;

/// `‖x‖² = xᵀ·gram·x` with a symmetric positive-definite Gram matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct HilbertNorm {
    gram: DMatrix<f64>,
}

impl HilbertNorm {
    pub fn new(gram: DMatrix<f64>) -> Result<Self, NormError> {
        if !gram.is_square() {
            return Err(NormError::DimensionMismatch { expected: gram.nrows(), found: gram.ncols() });
        }
        let scale = gram.amax().max(f64::MIN_POSITIVE);
        let asym = (&gram - gram.transpose()).amax();
        if asym > 1e-10 * scale {
            return Err(NormError::NotSymmetric(asym));
        }
        let sym = (&gram + gram.transpose()) * 0.5;
        let min = SymmetricEigen::new(sym.clone()).eigenvalues.min();
        if gram.nrows() > 0 && min <= 1e-13 * scale {
            return Err(NormError::NotPositiveDefinite(min));
        }
        Ok(HilbertNorm { gram: sym })
    }

    /// Skips validation; for positive-semidefinite Grams of seminorms.
    pub(crate) fn new_unchecked(gram: DMatrix<f64>) -> Self {
        HilbertNorm { gram: (&gram + gram.transpose()) * 0.5 }
    }

    pub fn euclidean(dim: usize) -> Self {
        HilbertNorm { gram: DMatrix::identity(dim, dim) }
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    pub fn dim(&self) -> usize {
        self.gram.nrows()
    }

    pub fn norm_sq(&self, x: &DVector<f64>) -> f64 {
        (x.transpose() * &self.gram * x)[(0, 0)].max(0.0)
    }

    pub fn norm(&self, x: &DVector<f64>) -> f64 {
        self.norm_sq(x).sqrt()
    }

    /// Gram matrix of the restriction to `span(basis)` in basis coordinates.
    pub fn restrict(&self, basis: &DMatrix<f64>) -> DMatrix<f64> {
        basis.transpose() * &self.gram * basis
    }

    /// Relative parallelogram residual
    /// `|‖x+y‖² + ‖x−y‖² − 2‖x‖² − 2‖y‖²| / (‖x‖² + ‖y‖²)`.
    pub fn parallelogram_residual(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        let (nx, ny) = (self.norm_sq(x), self.norm_sq(y));
        let lhs = self.norm_sq(&(x + y)) + self.norm_sq(&(x - y));
        (lhs - 2.0 * nx - 2.0 * ny).abs() / (nx + ny).max(f64::MIN_POSITIVE)
    }
}

/// `E = span(U) ⊂ F = ℝ^N` with `U` orthonormal, and `q(x) = Cᵀx` onto
/// `G ≅ ℝ^{N−k}`, `C` an orthonormal basis of `E^⊥`.
#[derive(Clone, Debug, PartialEq)]
pub struct SubspaceModel {
    subspace: DMatrix<f64>,
    complement: DMatrix<f64>,
}

#[derive(Serialize, Deserialize)]
struct ModelJson {
    dim: usize,
    subspace: Vec<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ladder: Option<LadderJson>,
}

#[derive(Serialize, Deserialize)]
struct LadderJson {
    levels: usize,
    weights: String,
}

impl SubspaceModel {
    /// `subspace` is `N × k`, columns orthonormal to `1e−10`.
    pub fn new(subspace: DMatrix<f64>) -> Result<Self, NormError> {
        let (n, k) = subspace.shape();
        if k > n {
            return Err(NormError::DimensionMismatch { expected: n, found: k });
        }
        let defect = (subspace.transpose() * &subspace - DMatrix::identity(k, k)).amax();
        if defect > 1e-10 {
            return Err(NormError::NotOrthonormal(defect));
        }
        let proj = DMatrix::identity(n, n) - &subspace * subspace.transpose();
        let eig = SymmetricEigen::new(proj);
        let cols: Vec<DVector<f64>> = (0..n)
            .filter(|&i| eig.eigenvalues[i] > 0.5)
            .map(|i| eig.eigenvectors.column(i).into_owned())
            .collect();
        let complement = if cols.is_empty() { DMatrix::zeros(n, 0) } else { DMatrix::from_columns(&cols) };
        if complement.ncols() != n - k {
            return Err(NormError::DegenerateModel);
        }
        Ok(SubspaceModel { subspace, complement })
    }

    pub fn dim(&self) -> usize {
        self.subspace.nrows()
    }

    pub fn sub_dim(&self) -> usize {
        self.subspace.ncols()
    }

    pub fn quotient_dim(&self) -> usize {
        self.complement.ncols()
    }

    pub fn subspace(&self) -> &DMatrix<f64> {
        &self.subspace
    }

    pub fn complement(&self) -> &DMatrix<f64> {
        &self.complement
    }

    /// `j`: E-coordinates to ambient.
    pub fn include(&self, z: &DVector<f64>) -> DVector<f64> {
        &self.subspace * z
    }

    /// `q`: ambient to G-coordinates.
    pub fn quotient(&self, x: &DVector<f64>) -> DVector<f64> {
        self.complement.transpose() * x
    }

    /// Parses `{"dim": N, "subspace": [[...], ...], "ladder": {...}}`; the
    /// subspace is a list of `k` basis vectors of length `N`.
    pub fn from_json(text: &str) -> Result<(Self, Option<NormLadder>), NormError> {
        let m: ModelJson = serde_json::from_str(text)?;
        for v in &m.subspace {
            if v.len() != m.dim {
                return Err(NormError::DimensionMismatch { expected: m.dim, found: v.len() });
            }
        }
        let cols: Vec<DVector<f64>> = m.subspace.iter().map(|v| DVector::from_vec(v.clone())).collect();
        let u = if cols.is_empty() { DMatrix::zeros(m.dim, 0) } else { DMatrix::from_columns(&cols) };
        let ladder = match m.ladder {
            None => None,
            Some(l) if l.weights.replace(' ', "") == "j^k" => Some(NormLadder::power(l.levels)),
            Some(l) => return Err(NormError::UnknownWeights(l.weights)),
        };
        Ok((Self::new(u)?, ladder))
    }

    pub fn to_json(&self, ladder: Option<&NormLadder>) -> serde_json::Value {
        let subspace = self.subspace.column_iter().map(|c| c.iter().copied().collect()).collect();
        let ladder = ladder.map(|l| LadderJson { levels: l.levels(), weights: "j^k".into() });
        serde_json::to_value(ModelJson { dim: self.dim(), subspace, ladder }).expect("numeric arrays serialize")
    }
}

/// Diagonal ladder `‖x‖_k² = Σ_j x_j² w_k(j)²` on `ℝ^n`, `j = 1..=n`.
#[derive(Clone, Debug, PartialEq)]
pub enum NormLadder {
    /// `w_k(j) = j^k`, defined for every `k`; `levels` bounds the levels
    /// under test.
    Power { levels: usize },
    /// Explicit `ln w_k(j)` table, `table[k][j−1]`.
    Table { log_weights: Vec<Vec<f64>> },
}

impl NormLadder {
    pub fn power(levels: usize) -> Self {
        NormLadder::Power { levels }
    }

    /// Validates monotonicity `w_k ≤ w_{k+1}` and log-convexity
    /// `w_k² ≤ w_{k−1}·w_{k+1}` coordinatewise.
    pub fn from_weights(weights: Vec<Vec<f64>>) -> Result<Self, NormError> {
        let n = weights.first().map_or(0, Vec::len);
        if weights.iter().any(|w| w.len() != n) {
            return Err(NormError::DimensionMismatch { expected: n, found: 0 });
        }
        if weights.iter().flatten().any(|&w| !(w > 0.0 && w.is_finite())) {
            return Err(NormError::NotLogConvex { level: 0 });
        }
        let lw: Vec<Vec<f64>> = weights.iter().map(|w| w.iter().map(|x| x.ln()).collect()).collect();
        for k in 1..lw.len() {
            if (0..n).any(|j| lw[k][j] < lw[k - 1][j] - 1e-12) {
                return Err(NormError::NotMonotone { level: k });
            }
            if k + 1 < lw.len() && (0..n).any(|j| 2.0 * lw[k][j] > lw[k - 1][j] + lw[k + 1][j] + 1e-12) {
                return Err(NormError::NotLogConvex { level: k });
            }
        }
        Ok(NormLadder::Table { log_weights: lw })
    }

    /// Number of levels under test (`0..levels`).
    pub fn levels(&self) -> usize {
        match self {
            NormLadder::Power { levels } => *levels,
            NormLadder::Table { log_weights } => log_weights.len(),
        }
    }

    /// Whether level `k` can be evaluated.
    pub fn has_level(&self, k: usize) -> bool {
        match self {
            NormLadder::Power { .. } => true,
            NormLadder::Table { log_weights } => k < log_weights.len(),
        }
    }

    fn log_weight(&self, k: usize, j: usize) -> f64 {
        match self {
            NormLadder::Power { .. } => k as f64 * (j as f64).ln(),
            NormLadder::Table { log_weights } => log_weights[k][j - 1],
        }
    }

    /// `ln ‖x‖_k`, evaluated in log space so high levels do not overflow.
    pub fn log_norm(&self, x: &DVector<f64>, k: usize) -> Result<f64, NormError> {
        if !self.has_level(k) {
            return Err(NormError::LevelOutOfRange { level: k, levels: self.levels() });
        }
        if let NormLadder::Table { log_weights } = self {
            if log_weights[k].len() != x.len() {
                return Err(NormError::DimensionMismatch { expected: log_weights[k].len(), found: x.len() });
            }
        }
        let terms: Vec<f64> = x
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(i, v)| 2.0 * (v.abs().ln() + self.log_weight(k, i + 1)))
            .collect();
        Ok(0.5 * log_sum_exp(&terms))
    }

    pub fn norm(&self, x: &DVector<f64>, k: usize) -> Result<f64, NormError> {
        Ok(self.log_norm(x, k)?.exp())
    }
}

pub(crate) fn log_sum_exp(v: &[f64]) -> f64 {
    let m = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + v.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}
