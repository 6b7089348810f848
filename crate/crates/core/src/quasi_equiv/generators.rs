//! Seeded instances. The planted pair is a surrogate for "two bases of the
//! same space"; it is not derived from any operator.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::growth_dsl::{Provenance, TabulatedMatrix};
use crate::smooth_ops::CVector;

use super::relation::row_separation;
use super::QuasiError;

/// Ground truth `a_j = λ_j b_{σ(j)}`, `σ` 0-based.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Plant {
    pub sigma: Vec<usize>,
    pub log_lambda: Vec<f64>,
    pub separation: f64,
}

#[derive(Clone, Debug)]
pub struct PlantedPair {
    pub a: TabulatedMatrix,
    pub b: TabulatedMatrix,
    pub plant: Plant,
}

/// Rows of `A` are cumulative sums of `Exp(1)` increments, so each row is
/// nondecreasing; `B` is `A` rescaled by `λ⁻¹` (log-uniform on `[−5, 5]`)
/// and shuffled.
pub fn planted_pair(n: usize, grades: usize, seed: u64) -> Result<PlantedPair, QuasiError> {
    if n == 0 || grades == 0 {
        return Err(QuasiError::EmptyInstance);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a_rows: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            let mut acc = 0.0;
            (0..grades)
                .map(|q| {
                    if q > 0 {
                        acc += <Exp1 as Distribution<f64>>::sample(&Exp1, &mut rng);
                    }
                    acc
                })
                .collect()
        })
        .collect();
    let mut sigma: Vec<usize> = (0..n).collect();
    sigma.shuffle(&mut rng);
    let log_lambda: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..=5.0)).collect();
    let mut b_rows = vec![Vec::new(); n];
    for j in 0..n {
        b_rows[sigma[j]] = a_rows[j].iter().map(|x| x - log_lambda[j]).collect();
    }
    let a = TabulatedMatrix::from_log_rows(a_rows, Provenance::ExternalFile)?;
    let b = TabulatedMatrix::from_log_rows(b_rows, Provenance::ExternalFile)?;
    let separation = row_separation(&a);
    Ok(PlantedPair { a, b, plant: Plant { sigma, log_lambda, separation } })
}

/// Haar-like orthonormal basis of `ℂ^n` from the QR factor of a complex
/// Gaussian matrix.
pub fn random_orthonormal_family(n: usize, seed: u64) -> Vec<CVector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g: DMatrix<Complex64> =
        DMatrix::from_fn(n, n, |_, _| Complex64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)));
    let q = g.qr().q();
    (0..n).map(|c| q.column(c).into_owned()).collect()
}

/// Row `j`: `log |f_j|_q` with `|ξ|_q² = Σ_i |ξ_i|² e^{2qα_i}`.
pub fn power_series_profile(vectors: &[CVector], alpha: &[f64], grades: usize) -> Result<TabulatedMatrix, QuasiError> {
    let rows = vectors
        .iter()
        .map(|v| {
            if v.len() != alpha.len() {
                return Err(QuasiError::LengthMismatch { expected: alpha.len(), found: v.len() });
            }
            Ok((0..grades)
                .map(|q| {
                    let terms: Vec<f64> = v
                        .iter()
                        .zip(alpha)
                        .filter(|(z, _)| z.norm_sqr() > 0.0)
                        .map(|(z, a)| z.norm_sqr().ln() + 2.0 * q as f64 * a)
                        .collect();
                    0.5 * crate::norm_lab::log_sum_exp(&terms)
                })
                .collect())
        })
        .collect::<Result<Vec<Vec<f64>>, _>>()?;
    Ok(TabulatedMatrix::from_log_rows(rows, Provenance::OperatorProfile)?)
}

/// Two orthonormal bases of the `n`-dimensional section of `Λ_∞(α_j = j)`:
/// the unit vectors, and a shuffled basis of seeded rotations on
/// neighbouring pairs `(e_{2i}, e_{2i+1})` with angles below
/// `e^{−(grades−1)}/2` and random phases. Returns both profiles.
pub fn mityagin_pair(n: usize, grades: usize, seed: u64) -> Result<(TabulatedMatrix, TabulatedMatrix), QuasiError> {
    if n == 0 || grades == 0 {
        return Err(QuasiError::EmptyInstance);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let alpha: Vec<f64> = (1..=n).map(|j| j as f64).collect();
    let unit = |i: usize| {
        let mut v = CVector::zeros(n);
        v[i] = Complex64::new(1.0, 0.0);
        v
    };
    let canonical: Vec<CVector> = (0..n).map(unit).collect();
    let cap = 0.5 * (-((grades - 1) as f64)).exp();
    let mut rotated = Vec::with_capacity(n);
    let mut i = 0;
    while i < n {
        if i + 1 == n {
            rotated.push(unit(i));
            break;
        }
        let theta: f64 = rng.random_range(0.0..cap);
        let phase = Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU));
        let (c, s) = (Complex64::from(theta.cos()), Complex64::from(theta.sin()));
        rotated.push(unit(i) * c + unit(i + 1) * (s * phase));
        rotated.push(unit(i) * (-s * phase.conj()) + unit(i + 1) * c);
        i += 2;
    }
    rotated.shuffle(&mut rng);
    Ok((power_series_profile(&canonical, &alpha, grades)?, power_series_profile(&rotated, &alpha, grades)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quasi_equiv::{match_profiles, verify_quasi_equivalence, MatchStatus};

    #[test]
    fn planted_pair_is_recovered() {
        let p = planted_pair(40, 8, 7).unwrap();
        assert!(p.a.is_column_monotone() && p.b.is_column_monotone());
        assert!(p.plant.separation > 1e-6);
        assert!(verify_quasi_equivalence(&p.a, &p.b, &p.plant.sigma, &p.plant.log_lambda, 1.0 + 1e-9).unwrap());
        let m = match_profiles(&p.a, &p.b).unwrap();
        assert_eq!(m.status, MatchStatus::Exact);
        assert_eq!(m.sigma, p.plant.sigma);
        for (x, y) in m.log_lambda.iter().zip(&p.plant.log_lambda) {
            assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn random_family_is_orthonormal() {
        let f = random_orthonormal_family(16, 2);
        for i in 0..16 {
            for j in 0..16 {
                let d = f[i].dotc(&f[j]).norm();
                assert!((d - if i == j { 1.0 } else { 0.0 }).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn mityagin_pair_matches_closely() {
        let (a, b) = mityagin_pair(33, 8, 4).unwrap();
        let m = match_profiles(&a, &b).unwrap();
        assert!(m.distortion <= 0.1, "{}", m.distortion);
        assert!(a.log_entry(32, 7) > 200.0);
    }
}
