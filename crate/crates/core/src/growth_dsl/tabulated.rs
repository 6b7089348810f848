//! Finite `J × Q` sections of Köthe matrices.
//!
//! Entries are held as natural logarithms so that grids such as `e^{q·j}`
//! at `j = 10⁴` stay representable. File formats carry plain entries.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::DslError;
use crate::verdict::{Certificate, CertificateCode, ConstantBound, Verdict, Witness};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    EvaluatedFromSpec,
    #[default]
    ExternalFile,
    OperatorProfile,
}

/// Row `i` holds `j = i + 1`; column `q` holds grade `q`.
#[derive(Clone, Debug, PartialEq)]
pub struct TabulatedMatrix {
    rows: usize,
    cols: usize,
    log_entries: Vec<f64>,
    provenance: Provenance,
}

#[derive(Serialize, Deserialize)]
struct JsonGrid {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    rows: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    log_rows: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    provenance: Provenance,
}

impl TabulatedMatrix {
    /// Builds from plain entries; every entry must be positive and finite.
    pub fn from_rows(rows: Vec<Vec<f64>>, provenance: Provenance) -> Result<Self, DslError> {
        for (i, r) in rows.iter().enumerate() {
            for (q, v) in r.iter().enumerate() {
                if !(v.is_finite() && *v > 0.0) {
                    return Err(DslError::NonPositiveEntry { row: i + 1, col: q, value: *v });
                }
            }
        }
        let logs = rows.into_iter().map(|r| r.into_iter().map(f64::ln).collect()).collect();
        Self::from_log_rows(logs, provenance)
    }

    pub fn from_log_rows(rows: Vec<Vec<f64>>, provenance: Provenance) -> Result<Self, DslError> {
        let n = rows.len();
        let cols = rows.first().map(|r| r.len()).unwrap_or(0);
        if n == 0 || cols == 0 {
            return Err(DslError::EmptyInput);
        }
        let mut log_entries = Vec::with_capacity(n * cols);
        for (i, r) in rows.into_iter().enumerate() {
            if r.len() != cols {
                return Err(DslError::RaggedGrid { row: i + 1 });
            }
            for (q, v) in r.iter().enumerate() {
                if !v.is_finite() {
                    return Err(DslError::NonPositiveEntry { row: i + 1, col: q, value: v.exp() });
                }
            }
            log_entries.extend(r);
        }
        Ok(TabulatedMatrix { rows: n, cols, log_entries, provenance })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn log_entry(&self, row: usize, q: usize) -> f64 {
        self.log_entries[row * self.cols + q]
    }

    pub fn entry(&self, row: usize, q: usize) -> f64 {
        self.log_entry(row, q).exp()
    }

    pub fn log_row(&self, row: usize) -> &[f64] {
        &self.log_entries[row * self.cols..(row + 1) * self.cols]
    }

    /// Column `q` in log space.
    pub fn log_column(&self, q: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.log_entry(i, q)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.log_row(i).iter().map(|v| v.exp()).collect()).collect()
    }

    pub fn to_log_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.log_row(i).to_vec()).collect()
    }

    /// Leading `rows × cols` block.
    pub fn truncate(&self, rows: usize, cols: usize) -> TabulatedMatrix {
        let rows = rows.min(self.rows);
        let cols = cols.min(self.cols);
        let data = (0..rows).map(|i| self.log_row(i)[..cols].to_vec()).collect();
        TabulatedMatrix::from_log_rows(data, self.provenance).expect("nonempty truncation")
    }

    /// `A_σ`: row `i` of the result is row `sigma[i]` of `self` (0-based).
    pub fn permute(&self, sigma: &[usize]) -> Result<TabulatedMatrix, DslError> {
        check_bijection(sigma, self.rows)?;
        let data = sigma.iter().map(|&s| self.log_row(s).to_vec()).collect();
        Self::from_log_rows(data, self.provenance)
    }

    /// Multiplies row `i` by `lambdas[i] > 0`.
    pub fn scale_rows(&self, lambdas: &[f64]) -> Result<TabulatedMatrix, DslError> {
        if lambdas.len() != self.rows {
            return Err(DslError::LengthMismatch { expected: self.rows, found: lambdas.len() });
        }
        let logs: Vec<f64> = lambdas
            .iter()
            .enumerate()
            .map(|(i, &l)| {
                if l > 0.0 && l.is_finite() {
                    Ok(l.ln())
                } else {
                    Err(DslError::NonPositiveScalar { index: i + 1, value: l })
                }
            })
            .collect::<Result<_, _>>()?;
        self.shift_log_rows(&logs)
    }

    /// Adds `log_shifts[i]` to every log entry of row `i`.
    pub fn shift_log_rows(&self, log_shifts: &[f64]) -> Result<TabulatedMatrix, DslError> {
        if log_shifts.len() != self.rows {
            return Err(DslError::LengthMismatch { expected: self.rows, found: log_shifts.len() });
        }
        let data = (0..self.rows)
            .map(|i| self.log_row(i).iter().map(|v| v + log_shifts[i]).collect())
            .collect();
        Self::from_log_rows(data, self.provenance)
    }

    /// Elementwise square.
    pub fn square(&self) -> TabulatedMatrix {
        TabulatedMatrix {
            log_entries: self.log_entries.iter().map(|v| 2.0 * v).collect(),
            ..self.clone()
        }
    }

    pub fn is_column_monotone(&self) -> bool {
        self.first_monotonicity_violation().is_none()
    }

    fn first_monotonicity_violation(&self) -> Option<(usize, usize)> {
        (0..self.rows).find_map(|i| {
            let r = self.log_row(i);
            (0..self.cols - 1).find(|&q| r[q] > r[q + 1]).map(|q| (i, q))
        })
    }

    /// Axiom (ii) on the finite section. Refuted at the first `(j, q)` with
    /// `a_{j,q} > a_{j,q+1}` (`j` 1-based).
    pub fn validate_koethe(&self) -> Verdict {
        match self.first_monotonicity_violation() {
            Some((i, q)) => Verdict::refuted(Certificate {
                q0: q as u64,
                basis_index: None,
                basis: None,
                j: Some(i as u64 + 1),
                code: CertificateCode::MonotonicityViolation,
            }),
            None => Verdict::proved(Witness { p: None, r_template: None, constant: ConstantBound::one() }),
        }
    }

    pub fn read_csv(reader: impl Read) -> Result<Self, DslError> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(reader);
        let mut rows = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            let row = rec
                .iter()
                .filter(|s| !s.is_empty())
                .map(|s| s.parse::<f64>().map_err(|_| DslError::BadNumber(s.to_string())))
                .collect::<Result<Vec<_>, _>>()?;
            if !row.is_empty() {
                rows.push(row);
            }
        }
        Self::from_rows(rows, Provenance::ExternalFile)
    }

    /// Fails when an entry overflows `f64`.
    pub fn write_csv(&self, writer: impl Write) -> Result<(), DslError> {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(writer);
        for row in self.plain_rows()? {
            w.write_record(row.iter().map(|v| format!("{v:e}")))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_json(reader: impl Read) -> Result<Self, DslError> {
        let g: JsonGrid = serde_json::from_reader(reader)?;
        match (g.rows, g.log_rows) {
            (Some(rows), _) => Self::from_rows(rows, g.provenance),
            (None, Some(logs)) => Self::from_log_rows(logs, g.provenance),
            (None, None) => Err(DslError::EmptyInput),
        }
    }

    pub fn to_json_value(&self) -> Result<serde_json::Value, DslError> {
        let g = JsonGrid { rows: Some(self.plain_rows()?), log_rows: None, provenance: self.provenance };
        Ok(serde_json::to_value(g)?)
    }

    /// JSON with `log_rows`, for grids whose entries overflow `f64`.
    pub fn to_log_json_value(&self) -> Result<serde_json::Value, DslError> {
        let g = JsonGrid { rows: None, log_rows: Some(self.to_log_rows()), provenance: self.provenance };
        Ok(serde_json::to_value(g)?)
    }

    /// Reads CSV or JSON depending on the file extension.
    pub fn load(path: &std::path::Path) -> Result<Self, DslError> {
        let f = std::fs::File::open(path)?;
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => Self::read_json(f),
            _ => Self::read_csv(f),
        }
    }

    fn plain_rows(&self) -> Result<Vec<Vec<f64>>, DslError> {
        let rows = self.to_rows();
        for (i, r) in rows.iter().enumerate() {
            if let Some(q) = r.iter().position(|v| !v.is_finite() || *v == 0.0) {
                return Err(DslError::Unrepresentable { row: i + 1, col: q });
            }
        }
        Ok(rows)
    }
}

pub(crate) fn check_bijection(sigma: &[usize], n: usize) -> Result<(), DslError> {
    if sigma.len() != n {
        return Err(DslError::NotABijection);
    }
    let mut seen = vec![false; n];
    for &s in sigma {
        if s >= n || seen[s] {
            return Err(DslError::NotABijection);
        }
        seen[s] = true;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verdict::State;

    fn grid() -> TabulatedMatrix {
        TabulatedMatrix::from_rows(vec![vec![1.0, 1.0], vec![1.0, 2.0], vec![1.0, 3.0]], Provenance::ExternalFile)
            .unwrap()
    }

    #[test]
    fn permute_identity_and_invalid() {
        let g = grid();
        assert_eq!(g.permute(&[0, 1, 2]).unwrap(), g);
        assert!(matches!(g.permute(&[0, 0, 2]), Err(DslError::NotABijection)));
        let p = g.permute(&[2, 0, 1]).unwrap();
        assert_eq!(p.log_row(0), g.log_row(2));
    }

    #[test]
    fn scale_rejects_nonpositive() {
        assert!(matches!(grid().scale_rows(&[1.0, 0.0, 1.0]), Err(DslError::NonPositiveScalar { index: 2, .. })));
    }

    #[test]
    fn monotonicity_violation_located() {
        let mut rows = vec![vec![1.0, 2.0, 3.0, 4.0]; 4];
        rows[2][2] = 5.0; // entries[3][2] > entries[3][3]
        let t = TabulatedMatrix::from_rows(rows, Provenance::ExternalFile).unwrap();
        let v = t.validate_koethe();
        assert_eq!(v.state, State::Refuted);
        let c = v.certificate.unwrap();
        assert_eq!((c.j, c.q0), (Some(3), 2));
    }

    #[test]
    fn rejects_nonpositive_entries() {
        let e = TabulatedMatrix::from_rows(vec![vec![1.0, -1.0]], Provenance::ExternalFile);
        assert!(matches!(e, Err(DslError::NonPositiveEntry { row: 1, col: 1, .. })));
    }

    #[test]
    fn csv_and_json_round_trip() {
        let g = grid();
        let mut buf = Vec::new();
        g.write_csv(&mut buf).unwrap();
        let back = TabulatedMatrix::read_csv(buf.as_slice()).unwrap();
        for i in 0..3 {
            for q in 0..2 {
                assert!((back.entry(i, q) - g.entry(i, q)).abs() < 1e-12);
            }
        }
        let json = serde_json::to_string(&g.to_json_value().unwrap()).unwrap();
        assert!(json.contains("\"provenance\":\"external-file\""));
        let back = TabulatedMatrix::read_json(json.as_bytes()).unwrap();
        assert_eq!(back.rows(), 3);
    }
}
