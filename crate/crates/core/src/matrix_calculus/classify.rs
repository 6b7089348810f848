//! Full classification of a symbolic Köthe matrix, with an optional numeric
//! cross-check of every decided member.

use serde::Serialize;

use crate::growth_dsl::{KoetheMatrixSpec, TabulatedMatrix};
use crate::verdict::{State, Verdict};

use super::probe::{consistency_check, probe_domination, probe_nuclearity, ProbeSignal};
use super::relations::{equivalent, has_continuous_norm_row, has_dn, is_algebra, is_nuclear, is_sqrt_closed};
use super::CalculusError;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassVerdicts {
    pub koethe: Verdict,
    pub nuclear: Verdict,
    pub continuous_norm_row: Verdict,
    pub sqrt_closed: Verdict,
    pub dn: Verdict,
    pub algebra: Verdict,
    pub self_equivalence: Verdict,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassificationReport {
    pub matrix: String,
    pub verdicts: ClassVerdicts,
    /// nuclear ∧ continuous-norm row ∧ `A² ≺ A`.
    pub norm_row_set: Option<bool>,
    /// nuclear ∧ (DN) ∧ `A ∼ A²`.
    pub dn_set: Option<bool>,
    /// False when both sets are decided and disagree.
    pub consistency: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub probe: Option<ProbeReport>,
}

impl ClassificationReport {
    /// Set agreement and probe agreement together.
    pub fn is_consistent(&self) -> bool {
        self.consistency && self.probe.as_ref().is_none_or(|p| p.consistent)
    }
}

fn conj(vs: &[&Verdict]) -> Option<bool> {
    if vs.iter().any(|v| v.is_refuted()) {
        Some(false)
    } else if vs.iter().all(|v| v.is_proved()) {
        Some(true)
    } else {
        None
    }
}

pub fn classify(a: &KoetheMatrixSpec) -> Result<ClassificationReport, CalculusError> {
    let koethe = a.validate_koethe();
    if koethe.is_refuted() {
        return Err(CalculusError::NotKoethe { name: a.name().to_string(), certificate: koethe.certificate });
    }
    let verdicts = ClassVerdicts {
        koethe,
        nuclear: is_nuclear(a)?,
        continuous_norm_row: has_continuous_norm_row(a)?,
        sqrt_closed: is_sqrt_closed(a)?,
        dn: has_dn(a)?,
        algebra: is_algebra(a)?,
        self_equivalence: equivalent(a, &a.square())?,
    };
    let v = &verdicts;
    let with_norm_row = conj(&[&v.nuclear, &v.continuous_norm_row, &v.sqrt_closed]);
    let with_dn = conj(&[&v.nuclear, &v.dn, &v.self_equivalence]);
    let consistency = match (with_norm_row, with_dn) {
        (Some(x), Some(y)) => x == y,
        _ => true,
    };
    Ok(ClassificationReport {
        matrix: a.name().to_string(),
        verdicts,
        norm_row_set: with_norm_row,
        dn_set: with_dn,
        consistency,
        probe: None,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeCheck {
    pub condition: String,
    pub q: usize,
    pub r: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<usize>,
    pub state: State,
    pub signal: ProbeSignal,
    pub consistent: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeReport {
    pub rows: usize,
    pub cols: usize,
    pub checks: Vec<ProbeCheck>,
    pub consistent: bool,
}

struct Checks<'a> {
    out: Vec<ProbeCheck>,
    verdict: &'a Verdict,
    condition: &'static str,
}

impl Checks<'_> {
    fn push(&mut self, q: usize, r: usize, p: Option<usize>, signal: ProbeSignal) {
        self.out.push(ProbeCheck {
            condition: self.condition.to_string(),
            q,
            r,
            p,
            state: self.verdict.state,
            signal,
            consistent: consistency_check(self.verdict, &signal),
        });
    }
}

/// Grades `(q, r)` to probe for a domination-type verdict within `cols`.
fn domination_cells(v: &Verdict, cols: usize) -> Vec<(usize, usize)> {
    match v.state {
        State::Proved => match v.witness.as_ref().and_then(|w| w.r_template) {
            Some(t) => (0..cols as u64)
                .filter(|&q| t.apply(q) < cols as u64)
                .map(|q| (q as usize, t.apply(q) as usize))
                .collect(),
            None => vec![],
        },
        State::Refuted => match &v.certificate {
            Some(c) if (c.q0 as usize) < cols => (0..cols).map(|r| (c.q0 as usize, r)).collect(),
            _ => vec![],
        },
        State::Undecided => vec![],
    }
}

fn check_domination(
    out: &mut Vec<ProbeCheck>,
    condition: &'static str,
    v: &Verdict,
    lhs: &TabulatedMatrix,
    rhs: &TabulatedMatrix,
) -> Result<(), CalculusError> {
    let mut c = Checks { out: vec![], verdict: v, condition };
    for (q, r) in domination_cells(v, lhs.cols()) {
        let pr = probe_domination(lhs, rhs, q, r..=r)?;
        c.push(q, r, None, pr[0].signal);
    }
    out.append(&mut c.out);
    Ok(())
}

/// Cross-checks every decided member of `report` on the `rows × cols`
/// truncation of `a`, and attaches the result.
pub fn probe_classification(
    a: &KoetheMatrixSpec,
    mut report: ClassificationReport,
    rows: usize,
    cols: usize,
) -> Result<ClassificationReport, CalculusError> {
    let grid = a.evaluate_grid(rows, cols)?;
    let sq = grid.square();
    let v = &report.verdicts;
    let mut out = Vec::new();

    let mut c = Checks { out: vec![], verdict: &v.nuclear, condition: "nuclear" };
    for (q, r) in domination_cells(&v.nuclear, cols) {
        c.push(q, r, None, probe_nuclearity(&grid, q, r)?.signal());
    }
    if v.nuclear.is_refuted() {
        // The certificate carries no grade restriction; probe every q < r.
        c.out.clear();
        for q in 0..cols {
            for r in q..cols {
                c.push(q, r, None, probe_nuclearity(&grid, q, r)?.signal());
            }
        }
    }
    out.append(&mut c.out);

    let zero = crate::growth_dsl::TabulatedMatrix::from_log_rows(vec![vec![0.0; cols]; rows], grid.provenance())?;
    let mut c = Checks { out: vec![], verdict: &v.continuous_norm_row, condition: "continuous_norm_row" };
    let ps: Vec<usize> = match (&v.continuous_norm_row.state, &v.continuous_norm_row.witness) {
        (State::Proved, Some(w)) => w.p.map(|p| p as usize).filter(|&p| p < cols).into_iter().collect(),
        (State::Refuted, _) => (0..cols).collect(),
        _ => vec![],
    };
    for p in ps {
        let pr = probe_domination(&zero, &grid, 0, p..=p)?;
        c.push(0, p, Some(p), pr[0].signal);
    }
    out.append(&mut c.out);

    check_domination(&mut out, "sqrt_closed", &v.sqrt_closed, &sq, &grid)?;
    check_domination(&mut out, "algebra", &v.algebra, &grid, &sq)?;
    for (name, part) in &v.self_equivalence.parts {
        let (lhs, rhs) = if name.starts_with(&format!("{} ", a.name())) { (&grid, &sq) } else { (&sq, &grid) };
        check_domination(&mut out, "self_equivalence", part, lhs, rhs)?;
    }

    if let (State::Proved, Some(w)) = (v.dn.state, &v.dn.witness) {
        let mut c = Checks { out: vec![], verdict: &v.dn, condition: "dn" };
        if let (Some(p), Some(t)) = (w.p.map(|p| p as usize), w.r_template) {
            for q in 0..cols {
                let r = t.apply(q as u64) as usize;
                if p >= cols || r >= cols {
                    continue;
                }
                let lr: Vec<f64> = (0..rows)
                    .map(|i| 2.0 * grid.log_entry(i, q) - grid.log_entry(i, p) - grid.log_entry(i, r))
                    .collect();
                c.push(q, r, Some(p), ProbeSignal::from_slope(super::probe::trend_slope(&lr)));
            }
        }
        out.append(&mut c.out);
    }

    let consistent = out.iter().all(|c| c.consistent);
    report.probe = Some(ProbeReport { rows, cols, checks: out, consistent });
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::growth_dsl::parse_spec;

    #[test]
    fn s_satisfies_both_sets() {
        let r = classify(&KoetheMatrixSpec::rapidly_decreasing()).unwrap();
        assert_eq!((r.norm_row_set, r.dn_set), (Some(true), Some(true)));
        assert!(r.consistency);
        let r = probe_classification(&KoetheMatrixSpec::rapidly_decreasing(), r, 10_000, 8).unwrap();
        assert!(r.is_consistent(), "{:?}", r.probe);
        assert!(!r.probe.unwrap().checks.is_empty());
    }

    #[test]
    fn j_q_exp_minus_j_fails_both() {
        let a = parse_spec("matrix m { log_entry: q*log(j) - j }").unwrap();
        let r = classify(&a).unwrap();
        assert!(r.verdicts.nuclear.is_proved());
        assert!(r.verdicts.continuous_norm_row.is_refuted());
        assert_eq!((r.norm_row_set, r.dn_set), (Some(false), Some(false)));
        let r = probe_classification(&a, r, 10_000, 8).unwrap();
        assert!(r.is_consistent(), "{:?}", r.probe);
    }

    #[test]
    fn infinite_type_power_series() {
        let a = parse_spec("matrix L { log_entry: q*j }").unwrap();
        let r = classify(&a).unwrap();
        for v in [&r.verdicts.nuclear, &r.verdicts.continuous_norm_row, &r.verdicts.sqrt_closed, &r.verdicts.dn] {
            assert!(v.is_proved());
        }
        assert_eq!(r.norm_row_set, Some(true));
    }

    #[test]
    fn json_field_names() {
        let r = classify(&KoetheMatrixSpec::rapidly_decreasing()).unwrap();
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["matrix"], "s");
        assert_eq!(v["verdicts"]["nuclear"]["state"], "proved");
        assert_eq!(v["verdicts"]["nuclear"]["witness"]["r"]["b"], 2);
        assert_eq!(v["consistency"], true);
    }
}
