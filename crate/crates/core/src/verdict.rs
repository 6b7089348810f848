//! Tri-state results of the decision procedures.

use serde::Serialize;

use crate::growth_dsl::CoefficientPoly;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum State {
    Proved,
    Refuted,
    Undecided,
}

/// Affine choice `r = a·q + b` for the existential grade.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct AffineTemplate {
    pub a: u64,
    pub b: u64,
}

impl AffineTemplate {
    pub const IDENTITY: AffineTemplate = AffineTemplate { a: 1, b: 0 };

    pub fn apply(&self, q: u64) -> u64 {
        self.a * q + self.b
    }

    /// `r = self(other(q))`.
    pub fn compose(&self, inner: &AffineTemplate) -> AffineTemplate {
        AffineTemplate { a: self.a * inner.a, b: self.a * inner.b + self.b }
    }
}

/// The constant `C` of a witness, possibly depending on `q`.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ConstantBound {
    /// `C(q) = exp(log_c(q))`.
    Exact {
        #[serde(serialize_with = "serialize_poly")]
        log_c: CoefficientPoly,
    },
    /// Finite for every `q`, value not in closed form.
    Finite,
}

impl ConstantBound {
    pub fn one() -> Self {
        ConstantBound::Exact { log_c: CoefficientPoly::zero() }
    }

    pub fn at(&self, q: u64) -> Option<f64> {
        match self {
            ConstantBound::Exact { log_c } => Some(log_c.eval_f64(q as f64).exp()),
            ConstantBound::Finite => None,
        }
    }

    pub fn is_one(&self) -> bool {
        matches!(self, ConstantBound::Exact { log_c } if log_c.is_zero())
    }
}

fn serialize_poly<S: serde::Serializer>(p: &CoefficientPoly, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&p.to_string())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<u64>,
    #[serde(rename = "r", skip_serializing_if = "Option::is_none")]
    pub r_template: Option<AffineTemplate>,
    #[serde(rename = "C")]
    pub constant: ConstantBound,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateCode {
    /// Fastest surviving term has a positive coefficient.
    PositiveLeadingTerm,
    /// A term's excess over the other side does not depend on `r`.
    GradeIndependentExcess,
    /// Summands do not tend to zero.
    NonVanishingTerms,
    /// Leading `log j` coefficient is at least `-1`.
    LogSeriesDivergence,
    /// `a_{j,q} > a_{j,q+1}` at a concrete index.
    MonotonicityViolation,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Certificate {
    pub q0: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub basis_index: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub basis: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j: Option<u64>,
    pub code: CertificateCode,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Evidence {
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub state: State,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub evidence: Option<Evidence>,
    /// Member verdicts of a conjunction, in order.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub parts: Vec<(String, Verdict)>,
}

impl Verdict {
    pub fn proved(witness: Witness) -> Self {
        Verdict { state: State::Proved, witness: Some(witness), certificate: None, evidence: None, parts: vec![] }
    }

    pub fn refuted(certificate: Certificate) -> Self {
        Verdict { state: State::Refuted, witness: None, certificate: Some(certificate), evidence: None, parts: vec![] }
    }

    pub fn undecided(note: impl Into<String>) -> Self {
        Verdict {
            state: State::Undecided,
            witness: None,
            certificate: None,
            evidence: Some(Evidence { notes: vec![note.into()] }),
            parts: vec![],
        }
    }

    pub fn is_proved(&self) -> bool {
        self.state == State::Proved
    }

    pub fn is_refuted(&self) -> bool {
        self.state == State::Refuted
    }

    pub fn is_decided(&self) -> bool {
        self.state != State::Undecided
    }

    /// Conjunction: any Refuted member decides it; otherwise any Undecided
    /// member leaves it Undecided; otherwise Proved.
    pub fn all(parts: Vec<(String, Verdict)>) -> Verdict {
        let state = if parts.iter().any(|(_, v)| v.is_refuted()) {
            State::Refuted
        } else if parts.iter().any(|(_, v)| !v.is_decided()) {
            State::Undecided
        } else {
            State::Proved
        };
        Verdict { state, witness: None, certificate: None, evidence: None, parts }
    }

    /// Three-valued reading: `Some(true)` Proved, `Some(false)` Refuted.
    pub fn as_bool(&self) -> Option<bool> {
        match self.state {
            State::Proved => Some(true),
            State::Refuted => Some(false),
            State::Undecided => None,
        }
    }
}
