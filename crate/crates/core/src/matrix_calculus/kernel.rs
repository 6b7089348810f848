//! Sign-scan kernels over a merged growth basis.
//!
//! A combination `Σ_k d_k(q)·φ_k(j)` is analysed grade by grade: at each
//! `q` in the exhaustive window, and once for the whole tail, the fastest
//! class carrying a nonzero coefficient decides the behaviour in `j`.

use crate::growth_dsl::{
    BasisKind, CoefficientPoly, GradePoint, GrowthBasisFunction, GrowthClass, KoetheMatrixSpec, Rational, Sign,
};
use crate::verdict::{Certificate, CertificateCode, ConstantBound, Verdict, Witness};

use super::CalculusError;

/// Union of the bases of several specs, sorted slowest to fastest.
#[derive(Clone, Debug)]
pub struct MergedBasis {
    functions: Vec<GrowthBasisFunction>,
}

impl MergedBasis {
    pub fn of(specs: &[&KoetheMatrixSpec]) -> Result<Self, CalculusError> {
        let mut functions: Vec<GrowthBasisFunction> = Vec::new();
        for s in specs {
            for f in s.basis() {
                match functions.iter_mut().find(|g| g.same_function(f)) {
                    Some(g) => {
                        if g.class() != f.class() {
                            return Err(CalculusError::Unmergeable(f.label()));
                        }
                        if g.samples().is_none() && f.samples().is_some() {
                            *g = f.clone();
                        }
                    }
                    None => functions.push(f.clone()),
                }
            }
        }
        functions.sort_by(|a, b| a.canonical_cmp(b));
        Ok(MergedBasis { functions })
    }

    pub fn functions(&self) -> &[GrowthBasisFunction] {
        &self.functions
    }

    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }

    /// Coefficients of `spec` aligned with this basis.
    pub fn coefficients(&self, spec: &KoetheMatrixSpec) -> Vec<CoefficientPoly> {
        self.functions.iter().map(|f| spec.coefficient_of(f)).collect()
    }
}

fn check_aligned(basis: &[GrowthBasisFunction], combo: &[CoefficientPoly]) -> Result<(), CalculusError> {
    if basis.len() != combo.len() {
        return Err(CalculusError::UnmergedBasis { basis: basis.len(), combo: combo.len() });
    }
    Ok(())
}

/// Indices of the fastest class with a possibly nonzero coefficient.
/// `None` signs (unknown on the tail) count as possibly nonzero.
fn top_group(basis: &[GrowthBasisFunction], signs: &[Option<Sign>]) -> Option<(GrowthClass, Vec<usize>)> {
    let live = |i: &usize| signs[*i] != Some(Sign::Zero);
    let top = (0..basis.len()).filter(live).map(|i| basis[i].class().clone()).max()?;
    let group = (0..basis.len()).filter(live).filter(|&i| basis[i].class() == &top).collect();
    Some((top, group))
}

enum Growth {
    Bounded,
    Unbounded(usize),
    Unknown,
}

fn bounded_at(basis: &[GrowthBasisFunction], combo: &[CoefficientPoly], pt: GradePoint) -> Growth {
    let signs: Vec<Option<Sign>> = combo.iter().map(|c| c.sign_at(pt)).collect();
    let Some((class, group)) = top_group(basis, &signs) else {
        return Growth::Bounded;
    };
    if !class.is_unbounded() {
        return Growth::Bounded;
    }
    if group.iter().all(|&i| signs[i] == Some(Sign::Negative)) {
        Growth::Bounded
    } else if group.iter().all(|&i| signs[i] == Some(Sign::Positive)) {
        Growth::Unbounded(group[0])
    } else {
        Growth::Unknown
    }
}

/// Decides `sup_j Σ_k d_k(q)·φ_k(j) < ∞` for every `q ∈ ℕ₀`.
///
/// Proved when every grade is bounded; the constant is exact
/// (`C(q) = exp(d_1(q))`, `d_1` the coefficient on `1`) when every other
/// coefficient is nonpositive for all `q`. Refuted at the first grade whose
/// leading class carries only positive coefficients. Otherwise Undecided.
pub fn bounded_above(basis: &[GrowthBasisFunction], combo: &[CoefficientPoly]) -> Result<Verdict, CalculusError> {
    check_aligned(basis, combo)?;
    let mut unknown = false;
    for pt in GradePoint::all() {
        match bounded_at(basis, combo, pt) {
            Growth::Bounded => {}
            Growth::Unknown => unknown = true,
            Growth::Unbounded(i) => {
                return Ok(Verdict::refuted(Certificate {
                    q0: pt.representative(),
                    basis_index: Some(i),
                    basis: Some(basis[i].label()),
                    j: None,
                    code: CertificateCode::PositiveLeadingTerm,
                }))
            }
        }
    }
    if unknown {
        return Ok(Verdict::undecided("leading terms of mixed sign or incomparable growth"));
    }
    Ok(Verdict::proved(Witness { p: None, r_template: None, constant: constant_bound(basis, combo) }))
}

fn constant_bound(basis: &[GrowthBasisFunction], combo: &[CoefficientPoly]) -> ConstantBound {
    let mut log_c = CoefficientPoly::zero();
    for (f, c) in basis.iter().zip(combo) {
        if matches!(f.kind(), BasisKind::One) {
            log_c = c.clone();
        } else if c.nonpositive_everywhere() != Some(true) {
            return ConstantBound::Finite;
        }
    }
    ConstantBound::Exact { log_c }
}

enum Series {
    Summable,
    Divergent(usize, CertificateCode),
    Unknown,
}

fn summable_at(basis: &[GrowthBasisFunction], combo: &[CoefficientPoly], pt: GradePoint) -> Series {
    let signs: Vec<Option<Sign>> = combo.iter().map(|c| c.sign_at(pt)).collect();
    let Some((class, group)) = top_group(basis, &signs) else {
        return Series::Divergent(0, CertificateCode::NonVanishingTerms);
    };
    match class {
        GrowthClass::Bounded => Series::Divergent(group[0], CertificateCode::NonVanishingTerms),
        GrowthClass::Logarithmic
            if group.len() == 1 && matches!(basis[group[0]].kind(), BasisKind::LogJ) =>
        {
            let i = group[0];
            let shifted = &combo[i] + &CoefficientPoly::constant(Rational::from_integer(1));
            match shifted.sign_at(pt) {
                Some(Sign::Negative) => Series::Summable,
                Some(_) => Series::Divergent(i, CertificateCode::LogSeriesDivergence),
                None => Series::Unknown,
            }
        }
        GrowthClass::Logarithmic => {
            if group.iter().all(|&i| signs[i] == Some(Sign::Positive)) {
                Series::Divergent(group[0], CertificateCode::PositiveLeadingTerm)
            } else {
                Series::Unknown
            }
        }
        _ => {
            if group.iter().all(|&i| signs[i] == Some(Sign::Negative)) {
                Series::Summable
            } else if group.iter().all(|&i| signs[i] == Some(Sign::Positive)) {
                Series::Divergent(group[0], CertificateCode::PositiveLeadingTerm)
            } else {
                Series::Unknown
            }
        }
    }
}

/// Decides `Σ_j exp(Σ_k d_k(q)·φ_k(j)) < ∞` for every `q ∈ ℕ₀`.
///
/// Per grade: a negative leading term on a class faster than logarithmic
/// is summable; a lone `log j` leading term with coefficient `d` is
/// summable iff `d < −1`; a bounded or empty leading class diverges (terms
/// do not vanish); a positive leading term diverges.
pub fn summable(basis: &[GrowthBasisFunction], combo: &[CoefficientPoly]) -> Result<Verdict, CalculusError> {
    check_aligned(basis, combo)?;
    let mut unknown = false;
    for pt in GradePoint::all() {
        match summable_at(basis, combo, pt) {
            Series::Summable => {}
            Series::Unknown => unknown = true,
            Series::Divergent(i, code) => {
                return Ok(Verdict::refuted(Certificate {
                    q0: pt.representative(),
                    basis_index: basis.get(i).map(|_| i),
                    basis: basis.get(i).map(|f| f.label()),
                    j: None,
                    code,
                }))
            }
        }
    }
    if unknown {
        return Ok(Verdict::undecided("leading terms of mixed sign or incomparable growth"));
    }
    Ok(Verdict::proved(Witness { p: None, r_template: None, constant: ConstantBound::Finite }))
}
