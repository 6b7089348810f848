//! Domination, nuclearity, continuous norm and (DN) for symbolic Köthe
//! matrices.
//!
//! The existential grade `r` is searched over affine templates
//! `r = a·q + b` with `a ≤ 4`, `b ≤ 16`, slope-major, so the first hit is
//! the cheapest template.

use crate::growth_dsl::{CoefficientPoly, GrowthBasisFunction, KoetheMatrixSpec};
use crate::verdict::{AffineTemplate, Certificate, CertificateCode, ConstantBound, Verdict, Witness};

use super::kernel::{bounded_above, summable, MergedBasis};
use super::CalculusError;

pub const MAX_SLOPE: u64 = 4;
pub const MAX_OFFSET: u64 = 16;
/// Largest fixed grade `p` tried for (DN) and the continuous-norm row.
pub const MAX_P: u64 = 16;

/// All templates in search order: `a = 0..=4`, then `b = 0..=16`.
pub fn templates() -> impl Iterator<Item = AffineTemplate> {
    (0..=MAX_SLOPE).flat_map(|a| (0..=MAX_OFFSET).map(move |b| AffineTemplate { a, b }))
}

fn ensure_koethe(spec: &KoetheMatrixSpec) -> Result<(), CalculusError> {
    let v = spec.validate_koethe();
    if v.is_refuted() {
        return Err(CalculusError::NotKoethe { name: spec.name().to_string(), certificate: v.certificate });
    }
    Ok(())
}

fn compose_all(coeffs: &[CoefficientPoly], t: AffineTemplate) -> Vec<CoefficientPoly> {
    coeffs.iter().map(|c| c.compose_affine(t.a, t.b)).collect()
}

fn sub(lhs: &[CoefficientPoly], rhs: &[CoefficientPoly]) -> Vec<CoefficientPoly> {
    lhs.iter().zip(rhs).map(|(x, y)| x - y).collect()
}

/// A grade `q0` and an unbounded basis function on which `A` exceeds every
/// choice of `r`: `B`'s coefficient there is a constant `β < c^A(q0)`, and
/// every function not strictly slower has `c^B ≡ 0` and `c^A(q0) ≥ 0`.
fn grade_independent_excess(
    basis: &[GrowthBasisFunction],
    ca: &[CoefficientPoly],
    cb: &[CoefficientPoly],
) -> Option<Certificate> {
    for q0 in 0..=crate::growth_dsl::SIGN_WINDOW {
        for (i, f) in basis.iter().enumerate() {
            if !f.class().is_unbounded() || !cb[i].is_constant() {
                continue;
            }
            if ca[i].eval_at(q0) <= cb[i].constant_term() {
                continue;
            }
            let rest_ok = basis.iter().enumerate().all(|(k, g)| {
                k == i || g.class() < f.class() || (cb[k].is_zero() && ca[k].eval_at(q0) >= 0.into())
            });
            if rest_ok {
                return Some(Certificate {
                    q0,
                    basis_index: Some(i),
                    basis: Some(f.label()),
                    j: None,
                    code: CertificateCode::GradeIndependentExcess,
                });
            }
        }
    }
    None
}

/// `A ≺ B`: for every `q` there are `r` and `C` with `a_{j,q} ≤ C·b_{j,r}`.
pub fn dominated_by(a: &KoetheMatrixSpec, b: &KoetheMatrixSpec) -> Result<Verdict, CalculusError> {
    ensure_koethe(a)?;
    ensure_koethe(b)?;
    let merged = MergedBasis::of(&[a, b])?;
    let ca = merged.coefficients(a);
    let cb = merged.coefficients(b);
    dominated_coeffs(merged.functions(), &ca, &cb)
}

fn dominated_coeffs(
    basis: &[GrowthBasisFunction],
    ca: &[CoefficientPoly],
    cb: &[CoefficientPoly],
) -> Result<Verdict, CalculusError> {
    for t in templates() {
        let v = bounded_above(basis, &sub(ca, &compose_all(cb, t)))?;
        if let (true, Some(w)) = (v.is_proved(), v.witness) {
            return Ok(Verdict::proved(Witness { p: None, r_template: Some(t), constant: w.constant }));
        }
    }
    if let Some(c) = grade_independent_excess(basis, ca, cb) {
        return Ok(Verdict::refuted(c));
    }
    Ok(Verdict::undecided(format!(
        "no template r = a·q + b with a ≤ {MAX_SLOPE}, b ≤ {MAX_OFFSET} certified"
    )))
}

/// Checks a domination witness template independently of the search.
pub fn verify_domination_template(
    a: &KoetheMatrixSpec,
    b: &KoetheMatrixSpec,
    t: AffineTemplate,
) -> Result<bool, CalculusError> {
    let merged = MergedBasis::of(&[a, b])?;
    let combo = sub(&merged.coefficients(a), &compose_all(&merged.coefficients(b), t));
    Ok(bounded_above(merged.functions(), &combo)?.is_proved())
}

/// `A ∼ B`: domination in both directions.
pub fn equivalent(a: &KoetheMatrixSpec, b: &KoetheMatrixSpec) -> Result<Verdict, CalculusError> {
    Ok(Verdict::all(vec![
        (format!("{} ≺ {}", a.name(), b.name()), dominated_by(a, b)?),
        (format!("{} ≺ {}", b.name(), a.name()), dominated_by(b, a)?),
    ]))
}

/// `∀q ∃r Σ_j a_{j,q}/a_{j,r} < ∞`.
pub fn is_nuclear(a: &KoetheMatrixSpec) -> Result<Verdict, CalculusError> {
    ensure_koethe(a)?;
    let basis = a.basis();
    let ca: Vec<CoefficientPoly> = (0..basis.len()).map(|i| a.coefficient(i)).collect();
    for t in templates() {
        let v = summable(basis, &sub(&ca, &compose_all(&ca, t)))?;
        if v.is_proved() {
            return Ok(Verdict::proved(Witness { p: None, r_template: Some(t), constant: ConstantBound::Finite }));
        }
    }
    // Ratios independent of q and r never decay.
    if basis.iter().zip(&ca).all(|(f, c)| !f.class().is_unbounded() || c.is_constant()) {
        return Ok(Verdict::refuted(Certificate {
            q0: 0,
            basis_index: None,
            basis: None,
            j: None,
            code: CertificateCode::NonVanishingTerms,
        }));
    }
    Ok(Verdict::undecided(format!(
        "no template r = a·q + b with a ≤ {MAX_SLOPE}, b ≤ {MAX_OFFSET} certified"
    )))
}

/// `∃p inf_j a_{j,p} > 0`, i.e. `∃p, C` with `1 ≤ C·a_{j,p}` for all `j`.
pub fn has_continuous_norm_row(a: &KoetheMatrixSpec) -> Result<Verdict, CalculusError> {
    ensure_koethe(a)?;
    let basis = a.basis();
    let ca: Vec<CoefficientPoly> = (0..basis.len()).map(|i| a.coefficient(i)).collect();
    let zero = vec![CoefficientPoly::zero(); ca.len()];
    for p in 0..=MAX_P {
        let t = AffineTemplate { a: 0, b: p };
        let v = bounded_above(basis, &sub(&zero, &compose_all(&ca, t)))?;
        if let (true, Some(w)) = (v.is_proved(), v.witness) {
            return Ok(Verdict::proved(Witness { p: Some(p), r_template: None, constant: w.constant }));
        }
    }
    if let Some(c) = grade_independent_excess(basis, &zero, &ca) {
        return Ok(Verdict::refuted(c));
    }
    Ok(Verdict::undecided(format!("no row p ≤ {MAX_P} bounded below")))
}

/// (DN): `∃p ∀q ∃r, C` with `a_{j,q}² ≤ C·a_{j,p}·a_{j,r}`.
///
/// Only the positive side is decided; a failed search is Undecided.
pub fn has_dn(a: &KoetheMatrixSpec) -> Result<Verdict, CalculusError> {
    ensure_koethe(a)?;
    let basis = a.basis();
    let ca: Vec<CoefficientPoly> = (0..basis.len()).map(|i| a.coefficient(i)).collect();
    let two = ca.iter().map(|c| c.scale(&2.into())).collect::<Vec<_>>();
    for p in 0..=MAX_P {
        let at_p = compose_all(&ca, AffineTemplate { a: 0, b: p });
        let base = sub(&two, &at_p);
        for t in templates() {
            let v = bounded_above(basis, &sub(&base, &compose_all(&ca, t)))?;
            if let (true, Some(w)) = (v.is_proved(), v.witness) {
                return Ok(Verdict::proved(Witness { p: Some(p), r_template: Some(t), constant: w.constant }));
            }
        }
    }
    Ok(Verdict::undecided(format!(
        "no p ≤ {MAX_P} and template a ≤ {MAX_SLOPE}, b ≤ {MAX_OFFSET} certified"
    )))
}

/// `A ≺ A²`.
pub fn is_algebra(a: &KoetheMatrixSpec) -> Result<Verdict, CalculusError> {
    dominated_by(a, &a.square())
}

/// `A² ≺ A`.
pub fn is_sqrt_closed(a: &KoetheMatrixSpec) -> Result<Verdict, CalculusError> {
    dominated_by(&a.square(), a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::growth_dsl::parse_spec;
    use crate::verdict::State;

    fn spec(src: &str) -> KoetheMatrixSpec {
        parse_spec(src).unwrap()
    }

    #[test]
    fn template_order_is_slope_major() {
        let v: Vec<_> = templates().take(18).collect();
        assert_eq!(v[0], AffineTemplate { a: 0, b: 0 });
        assert_eq!(v[17], AffineTemplate { a: 1, b: 0 });
        assert_eq!(templates().count(), 85);
    }

    #[test]
    fn s_dominates_itself_with_identity() {
        let s = KoetheMatrixSpec::rapidly_decreasing();
        let v = dominated_by(&s, &s).unwrap();
        let w = v.witness.unwrap();
        assert_eq!(w.r_template, Some(AffineTemplate::IDENTITY));
        assert!(w.constant.is_one());
    }

    #[test]
    fn s_is_nuclear_with_r_plus_two() {
        let v = is_nuclear(&KoetheMatrixSpec::rapidly_decreasing()).unwrap();
        assert_eq!(v.witness.unwrap().r_template, Some(AffineTemplate { a: 1, b: 2 }));
    }

    #[test]
    fn finite_type_power_series_is_not_nuclear_when_constant() {
        let v = is_nuclear(&spec("matrix c { log_entry: log(j) }")).unwrap();
        assert_eq!(v.state, State::Refuted);
    }

    #[test]
    fn s_square_closed_with_doubling() {
        let v = is_sqrt_closed(&KoetheMatrixSpec::rapidly_decreasing()).unwrap();
        assert_eq!(v.witness.unwrap().r_template, Some(AffineTemplate { a: 2, b: 0 }));
        assert!(is_algebra(&KoetheMatrixSpec::rapidly_decreasing()).unwrap().is_proved());
    }

    #[test]
    fn mixed_example_fails_continuous_norm() {
        let a = spec("matrix m { log_entry: q*log(j) - j }");
        assert!(is_nuclear(&a).unwrap().is_proved());
        let c = has_continuous_norm_row(&a).unwrap();
        assert_eq!(c.state, State::Refuted);
        assert_eq!(c.certificate.unwrap().code, CertificateCode::GradeIndependentExcess);
        assert!(has_dn(&a).unwrap().is_proved());
        assert!(is_algebra(&a).unwrap().is_refuted());
    }

    #[test]
    fn s_has_dn_and_a_norm_row() {
        let s = KoetheMatrixSpec::rapidly_decreasing();
        let w = has_dn(&s).unwrap().witness.unwrap();
        assert_eq!((w.p, w.r_template), (Some(0), Some(AffineTemplate { a: 2, b: 0 })));
        assert_eq!(has_continuous_norm_row(&s).unwrap().witness.unwrap().p, Some(0));
    }

    #[test]
    fn witness_verifies() {
        let a = spec("matrix a { log_entry: q*log(j) }");
        let b = spec("matrix b { log_entry: q*j }");
        let v = dominated_by(&a, &b).unwrap();
        let t = v.witness.unwrap().r_template.unwrap();
        assert!(verify_domination_template(&a, &b, t).unwrap());
        assert!(dominated_by(&b, &a).unwrap().is_refuted());
    }

    #[test]
    fn non_koethe_input_rejected() {
        let bad = spec("matrix bad { log_entry: -q*log(j) }");
        assert!(matches!(is_nuclear(&bad), Err(CalculusError::NotKoethe { .. })));
    }
}
