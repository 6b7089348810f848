use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::growth_dsl::{Provenance, TabulatedMatrix};
use crate::matrix_calculus::DIVERGENCE_SLOPE;
use crate::verdict::{AffineTemplate, ConstantBound, Verdict, Witness};

use super::norms::{GradedNormSystem, ProjectionFamily};
use super::operator::CVector;
use super::SmoothError;

pub enum Family<'a> {
    Vectors(&'a [CVector]),
    Projections(&'a ProjectionFamily),
}

/// Row `j`, column `q`: `|f_j|_q` (or `‖P_j‖_q`).
pub fn profile(family: Family<'_>, grades: usize) -> Result<TabulatedMatrix, SmoothError> {
    let rows: Vec<Vec<f64>> = match family {
        Family::Vectors(vs) => {
            let dim = vs.first().ok_or(SmoothError::EmptyFamily)?.len();
            let g = GradedNormSystem::new(dim, grades);
            vs.par_iter()
                .map(|v| (0..grades).map(|q| g.vector_norm(v, q)).collect::<Result<Vec<_>, _>>())
                .collect::<Result<_, _>>()?
        }
        Family::Projections(fam) => {
            let g = GradedNormSystem::new(fam.members()[0].dim(), grades);
            fam.members()
                .par_iter()
                .map(|p| (0..grades).map(|q| g.operator_norm(p, q)).collect::<Result<Vec<_>, _>>())
                .collect::<Result<_, _>>()?
        }
    };
    Ok(TabulatedMatrix::from_rows(rows, Provenance::OperatorProfile)?)
}

/// Columns of a seeded Householder reflection on each dyadic block
/// `[2^k, 2^{k+1})`, `k < blocks`; an orthonormal basis of `ℂ^N`,
/// `N = 2^blocks − 1`, ordered block by block.
pub fn block_householder_family(blocks: u32, seed: u64) -> Vec<CVector> {
    let n = (1usize << blocks) - 1;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    for k in 0..blocks {
        let size = 1usize << k;
        let start = size - 1;
        let v: Vec<Complex64> = (0..size)
            .map(|_| Complex64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)))
            .collect();
        let vv: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        let h = DMatrix::from_fn(size, size, |r, c| {
            let id = if r == c { 1.0 } else { 0.0 };
            Complex64::new(id, 0.0) - v[r] * v[c].conj() * (2.0 / vv)
        });
        for c in 0..size {
            let mut f = CVector::zeros(n);
            for r in 0..size {
                f[start + r] = h[(r, c)];
            }
            out.push(f);
        }
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct DominatingReport {
    pub verdict: Verdict,
    /// `(r, C)` per grade `q`: smallest `r` whose ratio envelope stops growing.
    pub per_q: Vec<Option<(usize, f64)>>,
    pub cauchy_schwarz_trials: usize,
    pub cauchy_schwarz_violations: usize,
}

const CS_TRIALS: usize = 100;

/// Growth of the running maximum across the top decade, per unit of
/// `ln j`: `(max_{j ≥ J/10} − max_{j < J/10}) / ln 10`. Unlike a fitted
/// slope it ignores bounded ratios that drift toward their supremum.
pub fn envelope_slope(log_values: &[f64]) -> f64 {
    let split = (log_values.len() / 10).max(1).min(log_values.len());
    let max = |v: &[f64]| v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (low, high) = log_values.split_at(split);
    if high.is_empty() {
        return 0.0;
    }
    (max(high) - max(low)).max(0.0) / 10f64.ln()
}

fn log_sum_exp(v: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = v.collect();
    let m = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + v.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// Coordinatewise certificate for `a_{j,q}² ≤ C·ℓ_j·a_{j,r}`, where `ℓ` is
/// the supplied ℓ₂ row or column 0, plus the Cauchy–Schwarz consequence
/// `|ξ|_q² ≤ C‖ξ‖|ξ|_r` on seeded random `ξ`. Proved when every
/// `q ≤ (Q−1)/2` is covered; a finite section never refutes.
pub fn check_dominating_l2(
    tab: &TabulatedMatrix,
    l2row: Option<&[f64]>,
    seed: u64,
) -> Result<DominatingReport, SmoothError> {
    if !tab.is_column_monotone() {
        return Err(SmoothError::NotMonotone);
    }
    let (n, cols) = (tab.rows(), tab.cols());
    let l0: Vec<f64> = match l2row {
        Some(l) if l.len() != n => return Err(SmoothError::DimensionMismatch { expected: n, found: l.len() }),
        Some(l) => l.iter().map(|x| x.ln()).collect(),
        None => tab.log_column(0),
    };
    let col: Vec<Vec<f64>> = (0..cols).map(|q| tab.log_column(q)).collect();
    let per_q: Vec<Option<(usize, f64)>> = (0..cols)
        .into_par_iter()
        .map(|q| {
            (0..cols).find_map(|r| {
                let lr: Vec<f64> = (0..n).map(|i| 2.0 * col[q][i] - l0[i] - col[r][i]).collect();
                (envelope_slope(&lr) <= DIVERGENCE_SLOPE)
                    .then(|| (r, lr.iter().copied().fold(f64::NEG_INFINITY, f64::max).exp()))
            })
        })
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violations = 0;
    for _ in 0..CS_TRIALS {
        let log_xi2: Vec<f64> = (0..n)
            .map(|_| {
                let z = Complex64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng));
                z.norm_sqr().ln()
            })
            .collect();
        let log_norm = |w: &[f64]| 0.5 * log_sum_exp(log_xi2.iter().zip(w).map(|(x, w)| x + 2.0 * w));
        for (q, hit) in per_q.iter().enumerate() {
            if let Some((r, c)) = hit {
                let lhs = 2.0 * log_norm(&col[q]);
                let rhs = c.ln() + log_norm(&l0) + log_norm(&col[*r]);
                if lhs > rhs + 1e-12 * rhs.abs().max(1.0) {
                    violations += 1;
                }
            }
        }
    }

    let needed = cols.saturating_sub(1) / 2;
    let covered = per_q.iter().take(needed + 1).all(Option::is_some);
    let verdict = if covered && violations == 0 {
        Verdict::proved(Witness { p: Some(0), r_template: fit_template(&per_q[..=needed]), constant: ConstantBound::Finite })
    } else if violations > 0 {
        Verdict::undecided(format!("{violations} Cauchy–Schwarz trials exceeded the certified constant"))
    } else {
        Verdict::undecided(format!("no non-diverging r within {cols} columns for some q ≤ {needed}"))
    };
    Ok(DominatingReport { verdict, per_q, cauchy_schwarz_trials: CS_TRIALS, cauchy_schwarz_violations: violations })
}

fn fit_template(per_q: &[Option<(usize, f64)>]) -> Option<AffineTemplate> {
    let rs: Vec<u64> = per_q.iter().map(|x| x.map(|(r, _)| r as u64)).collect::<Option<_>>()?;
    let b = *rs.first()?;
    let a = rs.get(1).map_or(Some(0), |r1| r1.checked_sub(b))?;
    let t = AffineTemplate { a, b };
    rs.iter().enumerate().all(|(q, &r)| t.apply(q as u64) == r).then_some(t)
}
