use nalgebra::DMatrix;
use num_complex::Complex64;

use super::operator::{spectral_norm, CVector, FiniteOperator};
use super::SmoothError;

/// Weights `w_q(j) = j^q`, `j = 1..=dim`, `q < grades`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GradedNormSystem {
    pub dim: usize,
    pub grades: usize,
}

impl GradedNormSystem {
    pub fn new(dim: usize, grades: usize) -> Self {
        GradedNormSystem { dim, grades }
    }

    pub fn weight(&self, j: usize, q: usize) -> f64 {
        (j as f64).powi(q as i32)
    }

    fn check(&self, q: usize, dim: usize) -> Result<(), SmoothError> {
        if q >= self.grades {
            return Err(SmoothError::GradeOutOfRange { q, grades: self.grades });
        }
        if dim != self.dim {
            return Err(SmoothError::DimensionMismatch { expected: self.dim, found: dim });
        }
        Ok(())
    }

    /// `|ξ|_q = (Σ |ξ_j|² j^{2q})^{1/2}`.
    pub fn vector_norm(&self, xi: &CVector, q: usize) -> Result<f64, SmoothError> {
        self.check(q, xi.len())?;
        Ok(xi.iter().enumerate().map(|(i, z)| z.norm_sqr() * self.weight(i + 1, q).powi(2)).sum::<f64>().sqrt())
    }

    /// Largest singular value of `D_q x D_q`.
    pub fn operator_norm(&self, x: &FiniteOperator, q: usize) -> Result<f64, SmoothError> {
        self.check(q, x.dim())?;
        let n = x.dim();
        let w: Vec<f64> = (1..=n).map(|j| self.weight(j, q)).collect();
        let m = DMatrix::from_fn(n, n, |r, c| x.entries()[(r, c)] * (w[r] * w[c]));
        Ok(spectral_norm(&m))
    }
}

/// Orthonormalizes `vectors` in order (modified Gram–Schmidt with a
/// second pass).
pub fn gram_schmidt_l2(vectors: &[CVector]) -> Result<Vec<CVector>, SmoothError> {
    const PIVOT: f64 = 1e-10;
    let mut out: Vec<CVector> = Vec::with_capacity(vectors.len());
    for (k, v) in vectors.iter().enumerate() {
        if let Some(first) = out.first() {
            if first.len() != v.len() {
                return Err(SmoothError::DimensionMismatch { expected: first.len(), found: v.len() });
            }
        }
        let scale = v.norm();
        let mut w = v.clone();
        for _ in 0..2 {
            for u in &out {
                let c = u.dotc(&w);
                w -= u * c;
            }
        }
        let n = w.norm();
        if n <= PIVOT * scale.max(1.0) || n == 0.0 {
            return Err(SmoothError::RankDeficient { index: k, residual: n });
        }
        out.push(w / Complex64::from(n));
    }
    Ok(out)
}

/// Pairwise orthogonal self-adjoint projections, checked at construction.
#[derive(Clone, Debug)]
pub struct ProjectionFamily {
    members: Vec<FiniteOperator>,
    tolerance: f64,
}

impl ProjectionFamily {
    pub fn new(members: Vec<FiniteOperator>, tolerance: f64) -> Result<Self, SmoothError> {
        if members.is_empty() {
            return Err(SmoothError::EmptyFamily);
        }
        for (i, p) in members.iter().enumerate() {
            let idem = p.compose(p)?.sub(p)?.l2_norm();
            let sa = p.adjoint().sub(p)?.l2_norm();
            if idem.max(sa) > tolerance {
                return Err(SmoothError::NotAProjection { index: i, defect: idem.max(sa) });
            }
        }
        for i in 0..members.len() {
            for j in 0..members.len() {
                if i == j {
                    continue;
                }
                let d = members[i].compose(&members[j])?.l2_norm();
                if d > tolerance {
                    return Err(SmoothError::NotOrthogonal { i, j, defect: d });
                }
            }
        }
        Ok(ProjectionFamily { members, tolerance })
    }

    /// `(f_j ⊗ f_j)` for an orthonormal family.
    pub fn from_orthonormal(vectors: &[CVector], tolerance: f64) -> Result<Self, SmoothError> {
        let members = vectors.iter().map(super::rank_one).collect::<Result<Vec<_>, _>>()?;
        Self::new(members, tolerance)
    }

    pub fn members(&self) -> &[FiniteOperator] {
        &self.members
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::smooth_ops::rank_one;

    fn e(n: usize, j: usize) -> CVector {
        let mut v = CVector::zeros(n);
        v[j - 1] = Complex64::new(1.0, 0.0);
        v
    }

    #[test]
    fn norm_examples() {
        let g = GradedNormSystem::new(3, 4);
        assert_eq!(g.vector_norm(&e(3, 2), 1).unwrap(), 2.0);
        assert!((g.operator_norm(&FiniteOperator::identity(3), 1).unwrap() - 9.0).abs() < 1e-12);
        let p = rank_one(&e(3, 1)).unwrap();
        for q in 0..4 {
            assert!((g.operator_norm(&p, q).unwrap() - 1.0).abs() < 1e-12);
        }
        assert!((g.operator_norm(&rank_one(&e(3, 2)).unwrap(), 1).unwrap() - 4.0).abs() < 1e-12);
        assert!(matches!(g.vector_norm(&e(3, 1), 4), Err(SmoothError::GradeOutOfRange { .. })));
    }

    #[test]
    fn gram_schmidt_examples() {
        let one = Complex64::new(1.0, 0.0);
        let out = gram_schmidt_l2(&[e(3, 1), e(3, 1) + e(3, 2)]).unwrap();
        assert!((&out[1] - e(3, 2)).norm() < 1e-15);
        assert!((&out[0] - e(3, 1)).norm() < 1e-15);
        let dup = gram_schmidt_l2(&[e(3, 1), e(3, 1) * one]);
        assert!(matches!(dup, Err(SmoothError::RankDeficient { index: 1, .. })));
    }

    #[test]
    fn projection_family_checks() {
        let fam = ProjectionFamily::from_orthonormal(&[e(3, 1), e(3, 2)], 1e-10).unwrap();
        assert_eq!(fam.members().len(), 2);
        let overlap = ProjectionFamily::from_orthonormal(&[e(3, 1), e(3, 1)], 1e-10);
        assert!(matches!(overlap, Err(SmoothError::NotOrthogonal { .. })));
    }
}
