use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num_traits::{Signed, Zero};

use super::poly::{fmt_rational, rational_to_f64, Rational};
use super::DslError;

/// Declared asymptotic class of a basis function of `j`.
///
/// Classes are totally ordered: bounded < logarithmic < superlogarithmic-
/// subpolynomial < polynomial(θ) (θ ascending) < superpolynomial. Functions
/// in distinct classes compare by class; two distinct functions in the same
/// class are treated as incomparable.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum GrowthClass {
    Bounded,
    Logarithmic,
    SuperlogSubpoly,
    Polynomial(Rational),
    Superpolynomial,
}

impl GrowthClass {
    fn tier(&self) -> u8 {
        match self {
            GrowthClass::Bounded => 0,
            GrowthClass::Logarithmic => 1,
            GrowthClass::SuperlogSubpoly => 2,
            GrowthClass::Polynomial(_) => 3,
            GrowthClass::Superpolynomial => 4,
        }
    }

    /// True for every class whose members tend to infinity.
    pub fn is_unbounded(&self) -> bool {
        !matches!(self, GrowthClass::Bounded)
    }

    pub fn keyword(&self) -> String {
        match self {
            GrowthClass::Bounded => "bounded".into(),
            GrowthClass::Logarithmic => "log".into(),
            GrowthClass::SuperlogSubpoly => "superlog".into(),
            GrowthClass::Polynomial(t) => format!("poly({})", fmt_rational(t)),
            GrowthClass::Superpolynomial => "superpoly".into(),
        }
    }
}

impl PartialOrd for GrowthClass {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for GrowthClass {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (GrowthClass::Polynomial(a), GrowthClass::Polynomial(b)) => a.cmp(b),
            _ => self.tier().cmp(&other.tier()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum BasisKind {
    One,
    LogJ,
    Power(Rational),
    Named(String),
}

impl BasisKind {
    fn order(&self) -> u8 {
        match self {
            BasisKind::One => 0,
            BasisKind::LogJ => 1,
            BasisKind::Power(_) => 2,
            BasisKind::Named(_) => 3,
        }
    }
}

/// One function `φ(j)` of the growth basis.
///
/// Named sequences stand for abstract weights such as the `α_j` of a power
/// series space. They must be nonnegative; values come from an optional
/// sample table (loaded from the declaration's `values` path or attached
/// programmatically).
#[derive(Clone, Debug, PartialEq)]
pub struct GrowthBasisFunction {
    kind: BasisKind,
    class: GrowthClass,
    values_path: Option<String>,
    samples: Option<Arc<Vec<f64>>>,
}

impl GrowthBasisFunction {
    pub fn one() -> Self {
        Self::builtin(BasisKind::One, GrowthClass::Bounded)
    }

    pub fn log_j() -> Self {
        Self::builtin(BasisKind::LogJ, GrowthClass::Logarithmic)
    }

    pub fn power(theta: Rational) -> Result<Self, DslError> {
        if !theta.is_positive() {
            return Err(DslError::NonPositiveExponent(fmt_rational(&theta)));
        }
        Ok(Self::builtin(BasisKind::Power(theta), GrowthClass::Polynomial(theta)))
    }

    fn builtin(kind: BasisKind, class: GrowthClass) -> Self {
        GrowthBasisFunction { kind, class, values_path: None, samples: None }
    }

    pub fn named(name: impl Into<String>, class: GrowthClass) -> Result<Self, DslError> {
        if let GrowthClass::Polynomial(t) = &class {
            if !t.is_positive() {
                return Err(DslError::NonPositiveExponent(fmt_rational(t)));
            }
        }
        Ok(GrowthBasisFunction {
            kind: BasisKind::Named(name.into()),
            class,
            values_path: None,
            samples: None,
        })
    }

    pub fn with_values_path(mut self, path: impl Into<String>) -> Self {
        self.values_path = Some(path.into());
        self
    }

    /// Attaches `samples[j-1] = φ(j)`. Values must be finite and nonnegative.
    pub fn with_samples(mut self, samples: Vec<f64>) -> Result<Self, DslError> {
        if let Some((i, v)) = samples.iter().enumerate().find(|(_, v)| !v.is_finite() || **v < 0.0) {
            return Err(DslError::BadSample { name: self.label(), index: i + 1, value: *v });
        }
        self.samples = Some(Arc::new(samples));
        Ok(self)
    }

    pub fn kind(&self) -> &BasisKind {
        &self.kind
    }

    pub fn class(&self) -> &GrowthClass {
        &self.class
    }

    pub fn values_path(&self) -> Option<&str> {
        self.values_path.as_deref()
    }

    pub fn samples(&self) -> Option<&[f64]> {
        self.samples.as_deref().map(|v| v.as_slice())
    }

    pub fn is_named(&self) -> bool {
        matches!(self.kind, BasisKind::Named(_))
    }

    /// Identity of the function irrespective of its sample table.
    pub fn same_function(&self, other: &Self) -> bool {
        self.kind == other.kind
    }

    pub fn label(&self) -> String {
        self.to_string()
    }

    /// `φ(j)` for `j ≥ 1`.
    pub fn value(&self, j: u64) -> Result<f64, DslError> {
        debug_assert!(j >= 1);
        Ok(match &self.kind {
            BasisKind::One => 1.0,
            BasisKind::LogJ => (j as f64).ln(),
            BasisKind::Power(t) => (j as f64).powf(rational_to_f64(t)),
            BasisKind::Named(name) => {
                let samples = self
                    .samples()
                    .ok_or_else(|| DslError::MissingSample { name: name.clone(), j })?;
                *samples
                    .get((j - 1) as usize)
                    .ok_or_else(|| DslError::MissingSample { name: name.clone(), j })?
            }
        })
    }

    /// Growth comparison; `None` for distinct functions of one class.
    pub fn growth_cmp(&self, other: &Self) -> Option<Ordering> {
        if self.same_function(other) {
            return Some(Ordering::Equal);
        }
        match self.class.cmp(&other.class) {
            Ordering::Equal => None,
            o => Some(o),
        }
    }

    /// Total order used to lay out a basis slowest to fastest.
    pub fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.class
            .cmp(&other.class)
            .then(self.kind.order().cmp(&other.kind.order()))
            .then_with(|| match (&self.kind, &other.kind) {
                (BasisKind::Named(a), BasisKind::Named(b)) => a.cmp(b),
                _ => Ordering::Equal,
            })
    }

    pub(crate) fn check_consistent(&self) -> Result<(), DslError> {
        let ok = match (&self.kind, &self.class) {
            (BasisKind::One, GrowthClass::Bounded) => true,
            (BasisKind::LogJ, GrowthClass::Logarithmic) => true,
            (BasisKind::Power(t), GrowthClass::Polynomial(s)) => t == s && !t.is_zero(),
            (BasisKind::Named(_), _) => true,
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(DslError::InconsistentClass(self.label()))
        }
    }
}

/// Prints the DSL basis reference: `1`, `log(j)`, `j^θ`, `seq(name)`.
impl fmt::Display for GrowthBasisFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            BasisKind::One => write!(f, "1"),
            BasisKind::LogJ => write!(f, "log(j)"),
            BasisKind::Power(t) if t.is_integer() => write!(f, "j^{}", t.numer()),
            BasisKind::Power(t) => write!(f, "j^({})", fmt_rational(t)),
            BasisKind::Named(n) => write!(f, "seq({n})"),
        }
    }
}
