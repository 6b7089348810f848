use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::growth_dsl::{check_bijection, TabulatedMatrix};

use super::assignment::{bottleneck, hungarian};
use super::QuasiError;

/// Distortion at or below which a match is `exact`.
pub const EXACT_TOLERANCE: f64 = 1e-9;
/// Distortion above which a match is reported `failed` (`C > e`).
pub const APPROXIMATE_LIMIT: f64 = 1.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatchStatus {
    Exact,
    Approximate,
    Failed,
}

/// `a_j ≈ λ_j b_{σ(j)}`. `sigma` is 0-based in memory and 1-based in JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatchResult {
    #[serde(with = "one_based")]
    pub sigma: Vec<usize>,
    pub log_lambda: Vec<f64>,
    pub distortion: f64,
    pub status: MatchStatus,
}

impl MatchResult {
    pub fn lambdas(&self) -> Vec<f64> {
        self.log_lambda.iter().map(|l| l.exp()).collect()
    }
}

mod one_based {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[usize], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|i| i + 1))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<usize>, D::Error> {
        let v = Vec::<usize>::deserialize(d)?;
        v.into_iter()
            .map(|i| i.checked_sub(1).ok_or_else(|| serde::de::Error::custom("sigma is 1-based")))
            .collect()
    }
}

fn same_shape(a: &TabulatedMatrix, b: &TabulatedMatrix) -> Result<(), QuasiError> {
    if (a.rows(), a.cols()) != (b.rows(), b.cols()) {
        return Err(QuasiError::DimensionMismatch { left: (a.rows(), a.cols()), right: (b.rows(), b.cols()) });
    }
    Ok(())
}

/// `(cost, log λ)` for rows `x`, `y`: half-range and midrange of `x_q − y_q`.
pub fn pair_cost(x: &[f64], y: &[f64]) -> (f64, f64) {
    let (lo, hi) = x.iter().zip(y).map(|(a, b)| a - b).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), d| {
        (lo.min(d), hi.max(d))
    });
    ((hi - lo) / 2.0, (hi + lo) / 2.0)
}

/// Smallest pair cost between distinct rows.
pub fn row_separation(tab: &TabulatedMatrix) -> f64 {
    (0..tab.rows())
        .into_par_iter()
        .map(|j| {
            ((j + 1)..tab.rows())
                .map(|k| pair_cost(tab.log_row(j), tab.log_row(k)).0)
                .fold(f64::INFINITY, f64::min)
        })
        .reduce(|| f64::INFINITY, f64::min)
}

/// Bottleneck assignment on the pair costs; among bottleneck-optimal
/// permutations the one of least total cost is returned.
pub fn match_profiles(a: &TabulatedMatrix, b: &TabulatedMatrix) -> Result<MatchResult, QuasiError> {
    same_shape(a, b)?;
    let n = a.rows();
    let pairs: Vec<Vec<(f64, f64)>> = (0..n)
        .into_par_iter()
        .map(|j| (0..n).map(|k| pair_cost(a.log_row(j), b.log_row(k))).collect())
        .collect();
    let cost: Vec<Vec<f64>> = pairs.iter().map(|r| r.iter().map(|p| p.0).collect()).collect();
    let (t, _) = bottleneck(&cost);
    let restricted: Vec<Vec<f64>> =
        cost.iter().map(|r| r.iter().map(|&c| if c <= t { c } else { f64::INFINITY }).collect()).collect();
    let sigma = hungarian(&restricted);
    let log_lambda: Vec<f64> = sigma.iter().enumerate().map(|(j, &k)| pairs[j][k].1).collect();
    let distortion = sigma.iter().enumerate().map(|(j, &k)| cost[j][k]).fold(0.0, f64::max);
    let status = if distortion <= EXACT_TOLERANCE {
        MatchStatus::Exact
    } else if distortion <= APPROXIMATE_LIMIT {
        MatchStatus::Approximate
    } else {
        MatchStatus::Failed
    };
    Ok(MatchResult { sigma, log_lambda, distortion, status })
}

/// Same-column check `a_{j,q}/C ≤ λ_j b_{σ(j),q} ≤ C a_{j,q}` for all `j, q`,
/// with `λ_j = exp(log_lambda[j])`. Shifted comparisons belong to
/// `matrix_calculus` on [`align`]ed grids.
pub fn verify_quasi_equivalence(
    a: &TabulatedMatrix,
    b: &TabulatedMatrix,
    sigma: &[usize],
    log_lambda: &[f64],
    c: f64,
) -> Result<bool, QuasiError> {
    same_shape(a, b)?;
    check_bijection(sigma, a.rows())?;
    if log_lambda.len() != a.rows() {
        return Err(QuasiError::LengthMismatch { expected: a.rows(), found: log_lambda.len() });
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(QuasiError::BadConstant(c));
    }
    let log_c = c.ln();
    Ok((0..a.rows()).all(|j| {
        a.log_row(j).iter().zip(b.log_row(sigma[j])).all(|(x, y)| {
            let dev = (x - log_lambda[j] - y).abs();
            dev <= log_c + 1e-12 * (1.0 + x.abs())
        })
    }))
}

/// `(λ_j b_{σ(j),q})`: row `j` aligned with row `j` of the other side.
pub fn align(b: &TabulatedMatrix, sigma: &[usize], log_lambda: &[f64]) -> Result<TabulatedMatrix, QuasiError> {
    Ok(b.permute(sigma)?.shift_log_rows(log_lambda)?)
}

/// Row `j` divided by `l2row[j]`.
pub fn normalize_profile(tab: &TabulatedMatrix, l2row: &[f64]) -> Result<TabulatedMatrix, QuasiError> {
    if l2row.len() != tab.rows() {
        return Err(QuasiError::LengthMismatch { expected: tab.rows(), found: l2row.len() });
    }
    let shifts = l2row
        .iter()
        .enumerate()
        .map(|(i, &l)| {
            if l > 0.0 && l.is_finite() {
                Ok(-l.ln())
            } else {
                Err(QuasiError::NonPositiveScalar { index: i + 1, value: l })
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(tab.shift_log_rows(&shifts)?)
}

#[derive(Clone, Debug, Serialize)]
pub struct SquareWitnessReport {
    pub min_entry: f64,
    /// Largest `log a_{j,q} − log a_{j,q}²` (`A ≺ A²` with `r = q`, `C = 1`).
    pub lower_excess: f64,
    /// Largest `2 log a_{j,q} − log a_{j,2q}` over `2q < Q`.
    pub upper_excess: f64,
    pub holds: bool,
}

/// Finite `A ∼ A²` with witnesses `r = q` and `r = 2q`, `C = 1`, up to a
/// relative rounding allowance `tol`.
pub fn square_witness(tab: &TabulatedMatrix, tol: f64) -> SquareWitnessReport {
    let mut rep = SquareWitnessReport {
        min_entry: f64::INFINITY,
        lower_excess: f64::NEG_INFINITY,
        upper_excess: f64::NEG_INFINITY,
        holds: true,
    };
    for j in 0..tab.rows() {
        let r = tab.log_row(j);
        for (q, &x) in r.iter().enumerate() {
            rep.min_entry = rep.min_entry.min(x.exp());
            rep.lower_excess = rep.lower_excess.max(-x);
            if 2 * q < r.len() {
                rep.upper_excess = rep.upper_excess.max(2.0 * x - r[2 * q]);
            }
        }
    }
    rep.holds = rep.lower_excess <= tol && rep.upper_excess <= tol;
    rep
}
