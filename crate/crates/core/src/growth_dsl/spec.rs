use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use rayon::prelude::*;

use super::basis::{BasisKind, GrowthBasisFunction};
use super::poly::{rational_to_f64, CoefficientPoly, Sign, SIGN_WINDOW};
use super::tabulated::{Provenance, TabulatedMatrix};
use super::DslError;
use crate::verdict::{Certificate, CertificateCode, ConstantBound, Verdict, Witness};

/// Largest row index scanned when hunting for a concrete monotonicity
/// violation.
const VIOLATION_SEARCH_ROWS: u64 = 10_000;

/// Symbolic Köthe matrix `a_{j,q} = exp(Σ_k c_k(q)·φ_k(j))`.
///
/// The basis is kept sorted slowest to fastest. Builtin basis functions only
/// appear when they carry a nonzero coefficient; declared named sequences
/// are kept even when unused.
#[derive(Clone, Debug, PartialEq)]
pub struct KoetheMatrixSpec {
    name: String,
    basis: Vec<GrowthBasisFunction>,
    terms: BTreeMap<usize, CoefficientPoly>,
}

impl KoetheMatrixSpec {
    pub fn new(
        name: impl Into<String>,
        entries: Vec<(GrowthBasisFunction, CoefficientPoly)>,
    ) -> Result<Self, DslError> {
        let mut merged: Vec<(GrowthBasisFunction, CoefficientPoly)> = Vec::new();
        for (f, c) in entries {
            f.check_consistent()?;
            match merged.iter_mut().find(|(g, _)| g.same_function(&f)) {
                Some((g, acc)) => {
                    if g.class() != f.class() {
                        return Err(DslError::DuplicateBasis(f.label()));
                    }
                    if g.samples().is_none() && f.samples().is_some() {
                        *g = f.clone();
                    }
                    *acc = &*acc + &c;
                }
                None => merged.push((f, c)),
            }
        }
        merged.retain(|(f, c)| f.is_named() || !c.is_zero());
        merged.sort_by(|a, b| a.0.canonical_cmp(&b.0));
        let mut basis = Vec::with_capacity(merged.len());
        let mut terms = BTreeMap::new();
        for (i, (f, c)) in merged.into_iter().enumerate() {
            if !c.is_zero() {
                terms.insert(i, c);
            }
            basis.push(f);
        }
        Ok(KoetheMatrixSpec { name: name.into(), basis, terms })
    }

    /// `a_{j,q} = j^q`, the matrix of the space of rapidly decreasing sequences.
    pub fn rapidly_decreasing() -> Self {
        KoetheMatrixSpec::new("s", vec![(GrowthBasisFunction::log_j(), CoefficientPoly::q())])
            .expect("builtin spec")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn basis(&self) -> &[GrowthBasisFunction] {
        &self.basis
    }

    pub fn terms(&self) -> &BTreeMap<usize, CoefficientPoly> {
        &self.terms
    }

    pub fn coefficient(&self, index: usize) -> CoefficientPoly {
        self.terms.get(&index).cloned().unwrap_or_default()
    }

    /// Coefficient on a basis function, zero when absent.
    pub fn coefficient_of(&self, f: &GrowthBasisFunction) -> CoefficientPoly {
        self.basis
            .iter()
            .position(|g| g.same_function(f))
            .map(|i| self.coefficient(i))
            .unwrap_or_default()
    }

    /// `(basis function, coefficient)` pairs including zero coefficients.
    pub fn entries(&self) -> Vec<(GrowthBasisFunction, CoefficientPoly)> {
        self.basis.iter().enumerate().map(|(i, f)| (f.clone(), self.coefficient(i))).collect()
    }

    /// Attaches sample values to a declared named sequence.
    pub fn with_samples(mut self, name: &str, samples: Vec<f64>) -> Result<Self, DslError> {
        let slot = self
            .basis
            .iter_mut()
            .find(|f| matches!(f.kind(), BasisKind::Named(n) if n == name))
            .ok_or_else(|| DslError::UnknownSequence(name.to_string()))?;
        *slot = slot.clone().with_samples(samples)?;
        Ok(self)
    }

    /// Loads sample tables for every named sequence that declares a `values`
    /// path, resolved against `base_dir`.
    pub fn resolve_samples(mut self, base_dir: &Path) -> Result<Self, DslError> {
        for slot in self.basis.iter_mut() {
            if let Some(path) = slot.values_path() {
                let text = std::fs::read_to_string(base_dir.join(path))?;
                let values = text
                    .split(|c: char| c.is_whitespace() || c == ',')
                    .filter(|s| !s.is_empty())
                    .map(|s| s.parse::<f64>().map_err(|_| DslError::BadNumber(s.to_string())))
                    .collect::<Result<Vec<_>, _>>()?;
                *slot = slot.clone().with_samples(values)?;
            }
        }
        Ok(self)
    }

    /// `log a_{j,q}`.
    pub fn log_evaluate(&self, j: u64, q: u64) -> Result<f64, DslError> {
        if j == 0 {
            return Err(DslError::IndexOutOfRange(j));
        }
        let mut acc = 0.0;
        for (&i, c) in &self.terms {
            acc += c.eval_f64(q as f64) * self.basis[i].value(j)?;
        }
        Ok(acc)
    }

    pub fn evaluate(&self, j: u64, q: u64) -> Result<f64, DslError> {
        Ok(self.log_evaluate(j, q)?.exp())
    }

    /// `A²`: every coefficient doubled.
    pub fn square(&self) -> KoetheMatrixSpec {
        let two = super::poly::Rational::from_integer(2);
        KoetheMatrixSpec {
            name: format!("{}_sq", self.name),
            basis: self.basis.clone(),
            terms: self.terms.iter().map(|(&i, c)| (i, c.scale(&two))).collect(),
        }
    }

    /// Rows `j = 1..=rows`, columns `q = 0..cols`, stored in log space.
    pub fn evaluate_grid(&self, rows: usize, cols: usize) -> Result<TabulatedMatrix, DslError> {
        let coeffs: Vec<(usize, Vec<f64>)> = self
            .terms
            .iter()
            .map(|(&i, c)| (i, (0..cols).map(|q| c.eval_f64(q as f64)).collect()))
            .collect();
        let data: Vec<Vec<f64>> = (1..=rows as u64)
            .into_par_iter()
            .map(|j| {
                let mut row = vec![0.0; cols];
                for (i, cq) in &coeffs {
                    let phi = self.basis[*i].value(j)?;
                    for (slot, c) in row.iter_mut().zip(cq) {
                        *slot += c * phi;
                    }
                }
                Ok(row)
            })
            .collect::<Result<_, DslError>>()?;
        TabulatedMatrix::from_log_rows(data, Provenance::EvaluatedFromSpec)
    }

    /// Köthe axioms. Axiom (i) holds automatically since all entries are
    /// exponentials. Axiom (ii) is Proved when every coefficient has a
    /// nonnegative forward difference for all `q` (all basis functions are
    /// nonnegative for `j ≥ 1`); Refuted with a concrete `(j, q)` where
    /// `a_{j,q} > a_{j,q+1}`; otherwise Undecided.
    pub fn validate_koethe(&self) -> Verdict {
        let diffs: Vec<(usize, CoefficientPoly)> =
            self.terms.iter().map(|(&i, c)| (i, c.forward_difference())).collect();
        let certified: Vec<Option<bool>> = diffs.iter().map(|(_, d)| d.nonnegative_everywhere()).collect();
        if certified.iter().all(|c| *c == Some(true)) {
            return Verdict::proved(Witness { p: None, r_template: None, constant: ConstantBound::one() });
        }
        for q in 0..=SIGN_WINDOW {
            let at_q: Vec<(usize, f64)> = diffs
                .iter()
                .map(|(i, d)| (*i, d.eval_at(q)))
                .filter(|(_, v)| Sign::of(v) != Sign::Zero)
                .map(|(i, v)| (i, rational_to_f64(&v)))
                .collect();
            if !at_q.iter().any(|(_, v)| *v < 0.0) {
                continue;
            }
            for j in 1..=VIOLATION_SEARCH_ROWS {
                let mut sum = 0.0;
                let mut scale = 0.0;
                let mut ok = true;
                for (i, d) in &at_q {
                    match self.basis[*i].value(j) {
                        Ok(phi) => {
                            sum += d * phi;
                            scale += (d * phi).abs();
                        }
                        Err(_) => ok = false,
                    }
                }
                if !ok {
                    break;
                }
                if sum < -1e-9 * scale.max(1e-300) && sum < 0.0 {
                    return Verdict::refuted(Certificate {
                        q0: q,
                        basis_index: None,
                        basis: None,
                        j: Some(j),
                        code: CertificateCode::MonotonicityViolation,
                    });
                }
            }
        }
        Verdict::undecided("coefficient differences not certified nonnegative and no violation found")
    }
}

/// Prints DSL source that reparses to a structurally equal spec.
impl fmt::Display for KoetheMatrixSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "matrix {} {{", self.name)?;
        for b in &self.basis {
            if let BasisKind::Named(n) = b.kind() {
                write!(f, "  seq {n} class {}", b.class().keyword())?;
                if let Some(p) = b.values_path() {
                    write!(f, " values \"{p}\"")?;
                }
                writeln!(f, ";")?;
            }
        }
        let mut expr = String::new();
        for (k, (&i, c)) in self.terms.iter().rev().enumerate() {
            let shown = c.to_string();
            let (neg, body) = match shown.strip_prefix('-') {
                Some(rest) => (true, rest.to_string()),
                None => (false, shown),
            };
            let term = match self.basis[i].kind() {
                BasisKind::One => body,
                _ => format!("{body} * {}", self.basis[i]),
            };
            match (k, neg) {
                (0, true) => expr.push('-'),
                (0, false) => {}
                (_, true) => expr.push_str(" - "),
                (_, false) => expr.push_str(" + "),
            }
            expr.push_str(&term);
        }
        if expr.is_empty() {
            expr.push('0');
        }
        writeln!(f, "  log_entry: {expr}")?;
        write!(f, "}}")
    }
}
