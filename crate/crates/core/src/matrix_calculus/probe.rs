//! Numeric probes over tabulated truncations.
//!
//! Every probe works with log entries. A ratio is read as diverging when
//! its least-squares slope against `ln j` over the top decade of rows
//! exceeds [`DIVERGENCE_SLOPE`], and as decaying when the slope is below
//! its negative.

use rayon::prelude::*;
use serde::Serialize;

use crate::growth_dsl::TabulatedMatrix;
use crate::verdict::{State, Verdict};

use super::CalculusError;

pub const DIVERGENCE_SLOPE: f64 = 0.05;

/// Least-squares slope of `ys` against `xs`.
pub fn ls_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    if xs.len() < 2 {
        return 0.0;
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

/// First row index (0-based) of the top decade `j ∈ [J/10, J]`; short
/// grids use every row.
fn top_decade_start(rows: usize) -> usize {
    if rows < 20 {
        0
    } else {
        rows / 10 - 1
    }
}

/// Slope of `values[j-1]` against `ln j` over the top decade.
pub fn trend_slope(values: &[f64]) -> f64 {
    let start = top_decade_start(values.len());
    let xs: Vec<f64> = (start..values.len()).map(|i| ((i + 1) as f64).ln()).collect();
    ls_slope(&xs, &values[start..])
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ProbeSignal {
    pub slope: f64,
    pub diverging: bool,
    pub decaying: bool,
}

impl ProbeSignal {
    pub fn from_slope(slope: f64) -> Self {
        ProbeSignal { slope, diverging: slope > DIVERGENCE_SLOPE, decaying: slope < -DIVERGENCE_SLOPE }
    }
}

/// Fails iff a Proved verdict meets a diverging probe or a Refuted verdict
/// meets a decaying one.
pub fn consistency_check(verdict: &Verdict, signal: &ProbeSignal) -> bool {
    match verdict.state {
        State::Proved => !signal.diverging,
        State::Refuted => !signal.decaying,
        State::Undecided => true,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatioProbe {
    pub q: usize,
    pub r: usize,
    /// `max_j a_{j,q}/b_{j,r}` (may overflow to infinity; see `log_c_best`).
    pub c_best: f64,
    pub log_c_best: f64,
    pub signal: ProbeSignal,
}

fn ratio_probe(q: usize, r: usize, log_ratio: &[f64]) -> RatioProbe {
    let log_c_best = log_ratio.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    RatioProbe { q, r, c_best: log_c_best.exp(), log_c_best, signal: ProbeSignal::from_slope(trend_slope(log_ratio)) }
}

fn check_cols(tab: &TabulatedMatrix, col: usize) -> Result<(), CalculusError> {
    if col >= tab.cols() {
        return Err(CalculusError::RangeExceedsGrid { requested: col, cols: tab.cols() });
    }
    Ok(())
}

fn check_rows(a: &TabulatedMatrix, b: &TabulatedMatrix) -> Result<(), CalculusError> {
    if a.rows() != b.rows() {
        return Err(CalculusError::GridMismatch { left: a.rows(), right: b.rows() });
    }
    Ok(())
}

/// `a_{j,q}/b_{j,r}` for each `r` in the range.
pub fn probe_domination(
    a: &TabulatedMatrix,
    b: &TabulatedMatrix,
    q: usize,
    r_range: std::ops::RangeInclusive<usize>,
) -> Result<Vec<RatioProbe>, CalculusError> {
    check_rows(a, b)?;
    check_cols(a, q)?;
    check_cols(b, *r_range.end())?;
    let la = a.log_column(q);
    Ok(r_range
        .into_par_iter()
        .map(|r| {
            let lr: Vec<f64> = la.iter().zip(b.log_column(r)).map(|(x, y)| x - y).collect();
            ratio_probe(q, r, &lr)
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NuclearityProbe {
    pub q: usize,
    pub r: usize,
    /// `(J', log Σ_{j ≤ J'} a_{j,q}/a_{j,r})` at powers of ten and at `J`.
    pub log_partial_sums: Vec<(usize, f64)>,
    /// Slope of the log partial sums; diverging means the sum keeps growing.
    pub tail: ProbeSignal,
    /// Slope of `log(j·a_{j,q}/a_{j,r})`; decaying means terms fall faster
    /// than `1/j`.
    pub terms: ProbeSignal,
}

impl NuclearityProbe {
    pub fn diverging(&self) -> bool {
        self.tail.diverging
    }

    /// Signal used by [`consistency_check`].
    pub fn signal(&self) -> ProbeSignal {
        ProbeSignal { slope: self.tail.slope, diverging: self.tail.diverging, decaying: self.terms.decaying }
    }
}

pub fn probe_nuclearity(tab: &TabulatedMatrix, q: usize, r: usize) -> Result<NuclearityProbe, CalculusError> {
    check_cols(tab, q.max(r))?;
    let terms: Vec<f64> = tab.log_column(q).iter().zip(tab.log_column(r)).map(|(x, y)| x - y).collect();
    let mut partial = Vec::with_capacity(terms.len());
    let mut acc = f64::NEG_INFINITY;
    for &t in &terms {
        acc = log_add(acc, t);
        partial.push(acc);
    }
    let mut checkpoints = Vec::new();
    let mut n = 1;
    while n < partial.len() {
        checkpoints.push((n, partial[n - 1]));
        n *= 10;
    }
    if let Some(&last) = partial.last() {
        checkpoints.push((partial.len(), last));
    }
    let scaled: Vec<f64> = terms.iter().enumerate().map(|(i, t)| t + ((i + 1) as f64).ln()).collect();
    Ok(NuclearityProbe {
        q,
        r,
        log_partial_sums: checkpoints,
        tail: ProbeSignal::from_slope(trend_slope(&partial)),
        terms: ProbeSignal::from_slope(trend_slope(&scaled)),
    })
}

fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// Least non-diverging `r > q` for each `q ≤ (Q−1)/2`; flagged when some
/// such `q` has none in the grid.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NuclearitySweep {
    pub per_q: Vec<Option<usize>>,
    pub slopes: Vec<f64>,
    pub non_nuclear: bool,
}

pub fn sweep_nuclearity(tab: &TabulatedMatrix) -> NuclearitySweep {
    let qmax = tab.cols().saturating_sub(1) / 2;
    let found: Vec<(Option<usize>, f64)> = (0..=qmax)
        .into_par_iter()
        .map(|q| {
            let mut steepest = f64::INFINITY;
            for r in q + 1..tab.cols() {
                let p = probe_nuclearity(tab, q, r).expect("columns in range");
                steepest = steepest.min(p.tail.slope);
                if !p.diverging() {
                    return (Some(r), p.tail.slope);
                }
            }
            (None, steepest)
        })
        .collect();
    NuclearitySweep {
        non_nuclear: tab.cols() > 1 && found.iter().any(|(r, _)| r.is_none()),
        per_q: found.iter().map(|x| x.0).collect(),
        slopes: found.iter().map(|x| x.1).collect(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DnProbe {
    pub p: Option<usize>,
    /// Smallest non-diverging `r` for each `q ≤ (Q−1)/2` at the chosen `p`.
    pub per_q: Vec<Option<RatioProbe>>,
}

/// `a_{j,q}²/(a_{j,p}·a_{j,r})` searched over `p`, then the least `r` per `q`.
pub fn probe_dn(tab: &TabulatedMatrix) -> DnProbe {
    let qmax = tab.cols().saturating_sub(1) / 2;
    let cols: Vec<Vec<f64>> = (0..tab.cols()).map(|q| tab.log_column(q)).collect();
    let per_p: Vec<Vec<Option<RatioProbe>>> = (0..tab.cols())
        .into_par_iter()
        .map(|p| {
            (0..=qmax)
                .map(|q| {
                    (0..tab.cols()).find_map(|r| {
                        let lr: Vec<f64> =
                            (0..tab.rows()).map(|i| 2.0 * cols[q][i] - cols[p][i] - cols[r][i]).collect();
                        let pr = ratio_probe(q, r, &lr);
                        (!pr.signal.diverging).then_some(pr)
                    })
                })
                .collect()
        })
        .collect();
    let best = per_p
        .iter()
        .enumerate()
        .max_by_key(|(p, v)| (v.iter().filter(|x| x.is_some()).count(), std::cmp::Reverse(*p)));
    match best {
        Some((p, v)) => DnProbe { p: v.iter().all(Option::is_some).then_some(p), per_q: v.clone() },
        None => DnProbe { p: None, per_q: vec![] },
    }
}
