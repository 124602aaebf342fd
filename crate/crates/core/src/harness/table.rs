//! Ratio tables and their CSV / JSON emission.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::Serialize;

use crate::error::Result;
use crate::grid::fmt_real;

pub const FLAG_ZERO_OVER_ZERO: &str = "zero_over_zero";
pub const FLAG_RHS_ZERO: &str = "rhs_zero";
pub const FLAG_ERROR: &str = "error";

/// One experiment case.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub case_id: String,
    pub params: BTreeMap<String, String>,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub flag: String,
}

impl Row {
    /// Row with `ratio = lhs/rhs`, 0/0 read as 0 and `rhs = 0 < lhs` flagged.
    pub fn new(params: BTreeMap<String, String>, lhs: f64, rhs: f64) -> Self {
        let (ratio, flag) = if lhs == 0.0 && rhs == 0.0 {
            (0.0, FLAG_ZERO_OVER_ZERO.to_string())
        } else if rhs == 0.0 {
            (f64::INFINITY, FLAG_RHS_ZERO.to_string())
        } else {
            (lhs / rhs, String::new())
        };
        Self {
            case_id: String::new(),
            params,
            lhs,
            rhs,
            ratio,
            flag,
        }
    }

    pub fn failed(params: BTreeMap<String, String>, message: &str) -> Self {
        Self {
            case_id: String::new(),
            params,
            lhs: f64::NAN,
            rhs: f64::NAN,
            ratio: f64::NAN,
            flag: format!("{FLAG_ERROR}: {}", message.replace(['\n', ','], " ")),
        }
    }

    pub fn with_flag(mut self, flag: &str) -> Self {
        if self.flag.is_empty() {
            self.flag = flag.to_string();
        }
        self
    }

    pub fn is_failure(&self) -> bool {
        self.flag == FLAG_RHS_ZERO || self.flag.starts_with(FLAG_ERROR) || self.flag.starts_with("fail")
    }
}

/// Builds a parameter map from `(key, value)` pairs.
pub fn params<const K: usize>(pairs: [(&str, String); K]) -> BTreeMap<String, String> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub experiment: String,
    pub max_ratio: f64,
    pub min_ratio: f64,
    pub n_cases: usize,
    pub n_failures: usize,
    /// `max(r₁/r₀, r₀/r₁)` of the max ratios of a base and a refined run.
    pub refinement_factor: Option<f64>,
}

/// Rows of one experiment, with ids assigned in order.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioTable {
    pub experiment: String,
    pub rows: Vec<Row>,
}

impl RatioTable {
    pub fn new(experiment: &str, rows: Vec<Row>) -> Self {
        let rows = rows
            .into_iter()
            .enumerate()
            .map(|(i, mut r)| {
                r.case_id = format!("{experiment}-{:04}", i + 1);
                r
            })
            .collect();
        Self {
            experiment: experiment.to_string(),
            rows,
        }
    }

    pub fn n_failures(&self) -> usize {
        self.rows.iter().filter(|r| r.is_failure()).count()
    }

    fn scored(&self) -> impl Iterator<Item = f64> + '_ {
        self.rows
            .iter()
            .filter(|r| !r.is_failure() && r.flag != FLAG_ZERO_OVER_ZERO && r.ratio.is_finite())
            .map(|r| r.ratio)
    }

    /// Largest ratio over computed, non-sentinel rows (0 if none).
    pub fn max_ratio(&self) -> f64 {
        self.scored().fold(0.0, f64::max)
    }

    /// Smallest ratio over computed, non-sentinel rows (0 if none).
    pub fn min_ratio(&self) -> f64 {
        let m = self.scored().fold(f64::INFINITY, f64::min);
        if m.is_finite() {
            m
        } else {
            0.0
        }
    }

    pub fn summary(&self, refinement_factor: Option<f64>) -> Summary {
        Summary {
            experiment: self.experiment.clone(),
            max_ratio: self.max_ratio(),
            min_ratio: self.min_ratio(),
            n_cases: self.rows.len(),
            n_failures: self.n_failures(),
            refinement_factor,
        }
    }

    /// Parameter columns, alphabetical.
    pub fn columns(&self) -> Vec<String> {
        let keys: BTreeSet<&String> = self.rows.iter().flat_map(|r| r.params.keys()).collect();
        keys.into_iter().cloned().collect()
    }

    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let cols = self.columns();
        let mut wr = csv::Writer::from_writer(w);
        let mut header = vec!["case_id".to_string()];
        header.extend(cols.iter().cloned());
        header.extend(["lhs", "rhs", "ratio", "flag"].map(String::from));
        wr.write_record(&header)?;
        for r in &self.rows {
            let mut rec = vec![r.case_id.clone()];
            rec.extend(cols.iter().map(|c| r.params.get(c).cloned().unwrap_or_default()));
            rec.extend([fmt_real(r.lhs), fmt_real(r.rhs), fmt_real(r.ratio), r.flag.clone()]);
            wr.write_record(&rec)?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write_csv(std::io::BufWriter::new(std::fs::File::create(path)?))
    }
}

pub fn save_summary(summary: &Summary, path: impl AsRef<Path>) -> Result<()> {
    let mut s = serde_json::to_string_pretty(summary)?;
    s.push('\n');
    std::fs::write(path, s)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sentinels_and_summary() {
        let rows = vec![
            Row::new(params([("p", "2".into())]), 1.0, 2.0),
            Row::new(params([("p", "3".into())]), 0.0, 0.0),
            Row::new(params([("a", "0".into())]), 1.0, 0.0),
            Row::failed(params([("p", "4".into())]), "boom, bang"),
            Row::new(params([("p", "5".into())]), 3.0, 2.0),
        ];
        let t = RatioTable::new("E1", rows);
        assert_eq!(t.rows[1].flag, FLAG_ZERO_OVER_ZERO);
        assert_eq!(t.rows[1].ratio, 0.0);
        assert_eq!(t.n_failures(), 2);
        assert_eq!((t.max_ratio(), t.min_ratio()), (1.5, 0.5));
        assert_eq!(t.columns(), vec!["a", "p"]);
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let first = text.lines().next().unwrap();
        assert_eq!(first, "case_id,a,p,lhs,rhs,ratio,flag");
        assert!(text.lines().nth(4).unwrap().starts_with("E1-0004,,4,NaN"));
        let s = t.summary(None);
        assert_eq!((s.n_cases, s.n_failures), (5, 2));
    }
}
