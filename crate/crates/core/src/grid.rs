//! Uniform 1-D grids and the functions that live on them.
//!
//! A [`GridFunction`] stores one sample per cell midpoint and is identically
//! zero outside its [`Domain1D`]. Integrals are midpoint sums, so the measure
//! of a set of cells is its cell count times the spacing `h`.

use std::io::{Read, Write};
use std::ops::Range;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::weights::Weight;

/// The interval `[left, right)` split into `cells` uniform cells.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Domain1D {
    left: f64,
    right: f64,
    cells: usize,
}

impl Domain1D {
    pub fn new(left: f64, right: f64, cells: usize) -> Result<Self> {
        if !(left.is_finite() && right.is_finite()) || left >= right {
            return Err(Error::Domain(format!(
                "domain needs finite left < right, got [{left}, {right})"
            )));
        }
        if cells < 2 {
            return Err(Error::Domain(format!("domain needs at least 2 cells, got {cells}")));
        }
        Ok(Self { left, right, cells })
    }

    pub fn left(&self) -> f64 {
        self.left
    }

    pub fn right(&self) -> f64 {
        self.right
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn len(&self) -> f64 {
        self.right - self.left
    }

    /// Cell width `h`.
    pub fn spacing(&self) -> f64 {
        (self.right - self.left) / self.cells as f64
    }

    /// Midpoint of cell `i`.
    pub fn point(&self, i: usize) -> f64 {
        self.left + (i as f64 + 0.5) * self.spacing()
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.cells).map(move |i| self.point(i))
    }

    /// Left edge of cell `i` (also valid for `i == cells`, the right edge).
    pub fn edge(&self, i: isize) -> f64 {
        self.left + i as f64 * self.spacing()
    }

    /// Cell containing `x`, if `x` lies in the domain.
    pub fn cell_of(&self, x: f64) -> Option<usize> {
        if x < self.left || x >= self.right {
            return None;
        }
        let i = ((x - self.left) / self.spacing()).floor() as usize;
        Some(i.min(self.cells - 1))
    }

    /// Nearest cell boundary to `x`, as a (possibly out-of-range) edge index.
    pub fn nearest_edge(&self, x: f64) -> isize {
        ((x - self.left) / self.spacing()).round() as isize
    }

    /// The cells whose midpoints lie in `[a, b)`.
    pub fn cells_in(&self, a: f64, b: f64) -> CellRange {
        let h = self.spacing();
        let lo = ((a - self.left) / h - 0.5).ceil().max(0.0) as usize;
        let hi = ((b - self.left) / h - 0.5).ceil().max(0.0) as usize;
        CellRange::new(lo.min(self.cells), hi.min(self.cells).max(lo.min(self.cells)))
    }

    /// Same domain with `factor` times as many cells.
    pub fn refined(&self, factor: usize) -> Self {
        Self {
            left: self.left,
            right: self.right,
            cells: self.cells * factor.max(1),
        }
    }
}

/// Half-open run of cell indices `start..end`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CellRange {
    pub start: usize,
    pub end: usize,
}

impl CellRange {
    pub fn new(start: usize, end: usize) -> Self {
        debug_assert!(start <= end);
        Self { start, end }
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }

    pub fn contains(&self, i: usize) -> bool {
        self.start <= i && i < self.end
    }

    pub fn range(&self) -> Range<usize> {
        self.start..self.end
    }

    pub fn intersect(&self, other: &CellRange) -> Option<CellRange> {
        let s = self.start.max(other.start);
        let e = self.end.min(other.end);
        (s < e).then(|| CellRange::new(s, e))
    }

    /// Physical midpoint of the range.
    pub fn center(&self, d: &Domain1D) -> f64 {
        d.edge(self.start as isize) + 0.5 * self.len() as f64 * d.spacing()
    }

    /// Physical length.
    pub fn measure(&self, d: &Domain1D) -> f64 {
        self.len() as f64 * d.spacing()
    }
}

/// Real samples at cell midpoints; zero outside the domain.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    domain: Domain1D,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(domain: Domain1D, values: Vec<f64>) -> Result<Self> {
        if values.len() != domain.cells() {
            return Err(Error::Shape(format!(
                "{} values for a domain of {} cells",
                values.len(),
                domain.cells()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("non-finite sample {} at cell {i}", values[i])));
        }
        Ok(Self { domain, values })
    }

    pub fn zeros(domain: Domain1D) -> Self {
        Self {
            domain,
            values: vec![0.0; domain.cells()],
        }
    }

    pub fn constant(domain: Domain1D, c: f64) -> Self {
        Self {
            domain,
            values: vec![c; domain.cells()],
        }
    }

    pub fn from_fn(domain: Domain1D, f: impl Fn(f64) -> f64) -> Self {
        Self {
            domain,
            values: domain.points().map(f).collect(),
        }
    }

    /// Indicator of `[a, b)`: one on the cells whose midpoint lies in it.
    pub fn indicator(domain: Domain1D, a: f64, b: f64) -> Self {
        let r = domain.cells_in(a, b);
        let mut values = vec![0.0; domain.cells()];
        values[r.range()].iter_mut().for_each(|v| *v = 1.0);
        Self { domain, values }
    }

    pub fn domain(&self) -> &Domain1D {
        &self.domain
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            domain: self.domain,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn abs(&self) -> Self {
        self.map(f64::abs)
    }

    pub fn scaled(&self, c: f64) -> Self {
        self.map(|v| c * v)
    }

    fn check_same(&self, other: &GridFunction) -> Result<()> {
        if self.domain != other.domain {
            return Err(Error::Shape("grid functions live on different domains".into()));
        }
        Ok(())
    }

    pub fn zip_with(&self, other: &GridFunction, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self {
            domain: self.domain,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn add(&self, other: &GridFunction) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn mul(&self, other: &GridFunction) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    /// Smallest cell range holding every nonzero sample; `None` for f ≡ 0.
    pub fn support(&self) -> Option<CellRange> {
        let first = self.values.iter().position(|&v| v != 0.0)?;
        let last = self.values.iter().rposition(|&v| v != 0.0)?;
        Some(CellRange::new(first, last + 1))
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.domain.spacing()
    }

    pub fn integral_over(&self, r: CellRange) -> f64 {
        self.values[r.range()].iter().sum::<f64>() * self.domain.spacing()
    }

    /// Restriction to `r` (zero elsewhere).
    pub fn restricted(&self, r: CellRange) -> Self {
        let mut values = vec![0.0; self.len()];
        values[r.range()].copy_from_slice(&self.values[r.range()]);
        Self {
            domain: self.domain,
            values,
        }
    }

    /// Sample at the cell containing `x` (0 outside the domain).
    pub fn at(&self, x: f64) -> f64 {
        self.domain.cell_of(x).map_or(0.0, |i| self.values[i])
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["x", "value"])?;
        for (i, v) in self.values.iter().enumerate() {
            wtr.write_record([fmt_real(self.domain.point(i)), fmt_real(*v)])?;
        }
        wtr.flush()?;
        Ok(())
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let file = std::fs::File::create(path)?;
        self.write_csv(std::io::BufWriter::new(file))
    }

    /// Parse `x,value` rows; the domain is rebuilt from the midpoints.
    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(r);
        let headers = rdr.headers()?.clone();
        if headers.len() != 2 || &headers[0] != "x" || &headers[1] != "value" {
            return Err(Error::Shape("expected header `x,value`".into()));
        }
        let mut xs = Vec::new();
        let mut vs = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            let parse = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Shape(format!("bad number '{s}': {e}")))
            };
            xs.push(parse(&rec[0])?);
            vs.push(parse(&rec[1])?);
        }
        if xs.len() < 2 {
            return Err(Error::Shape("need at least two samples".into()));
        }
        let n = xs.len();
        let h = (xs[n - 1] - xs[0]) / (n - 1) as f64;
        if !(h > 0.0) {
            return Err(Error::Shape("sample points must increase".into()));
        }
        for (i, x) in xs.iter().enumerate() {
            let expect = xs[0] + i as f64 * h;
            if (x - expect).abs() > 1e-9 * h.max(x.abs()) {
                return Err(Error::Shape(format!("non-uniform sample point {x} at row {i}")));
            }
        }
        let left = xs[0] - 0.5 * h;
        let domain = Domain1D::new(left, left + n as f64 * h, n)?;
        GridFunction::new(domain, vs)
    }

    pub fn load_csv(path: impl AsRef<Path>) -> Result<Self> {
        Self::read_csv(std::fs::File::open(path)?)
    }
}

/// Locale-independent scientific notation with 17 significant digits.
pub fn fmt_real(v: f64) -> String {
    format!("{v:.16e}")
}

/// `(Σ |f|^p ω h)^{1/p}`; `weight = None` is Lebesgue measure.
pub fn lp_norm(f: &GridFunction, p: f64, weight: Option<&Weight>) -> Result<f64> {
    if !(p > 0.0) {
        return Err(Error::Domain(format!("lp_norm needs p > 0, got {p}")));
    }
    let h = f.domain().spacing();
    let sum: f64 = match weight {
        None => f.values().iter().map(|v| v.abs().powf(p)).sum(),
        Some(w) => {
            if w.domain() != f.domain() {
                return Err(Error::Shape("weight and function domains differ".into()));
            }
            f.values()
                .iter()
                .zip(w.values())
                .map(|(v, wv)| v.abs().powf(p) * wv)
                .sum()
        }
    };
    Ok((sum * h).powf(1.0 / p))
}

/// `sup_α α·ω({|f| ≥ α})`, evaluated exactly at the sample levels of `|f|`.
pub fn weak_l1_norm(f: &GridFunction, weight: &Weight) -> Result<f64> {
    if weight.domain() != f.domain() {
        return Err(Error::Shape("weight and function domains differ".into()));
    }
    let h = f.domain().spacing();
    let mut pairs: Vec<(f64, f64)> = f
        .values()
        .iter()
        .zip(weight.values())
        .map(|(v, w)| (v.abs(), *w))
        .collect();
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut best = 0.0_f64;
    let mut mass = 0.0;
    let mut i = 0;
    while i < pairs.len() {
        let level = pairs[i].0;
        // absorb every sample tied at this level before scoring it
        while i < pairs.len() && pairs[i].0 == level {
            mass += pairs[i].1 * h;
            i += 1;
        }
        best = best.max(level * mass);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::{power_weight, Weight};

    fn dom(l: f64, r: f64, n: usize) -> Domain1D {
        Domain1D::new(l, r, n).unwrap()
    }

    #[test]
    fn domain_rejects_bad_inputs() {
        assert!(Domain1D::new(1.0, 0.0, 8).is_err());
        assert!(Domain1D::new(0.0, 1.0, 1).is_err());
        assert!(Domain1D::new(0.0, f64::NAN, 8).is_err());
        let d = dom(-1.0, 1.0, 4);
        assert_eq!(d.spacing(), 0.5);
        assert_eq!(d.point(0), -0.75);
    }

    #[test]
    fn indicator_is_grid_aligned() {
        let d = dom(-8.0, 8.0, 1600);
        let f = GridFunction::indicator(d, 0.0, 1.0);
        assert_eq!(f.support(), Some(CellRange::new(800, 900)));
        assert!((f.integral() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lp_norm_examples() {
        let d = dom(-8.0, 8.0, 1600);
        let f = GridFunction::indicator(d, 0.0, 1.0);
        assert!((lp_norm(&f, 2.0, None).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(lp_norm(&GridFunction::zeros(d), 2.0, None).unwrap(), 0.0);
        let w = power_weight(0.5, d, 1e-12).unwrap();
        let v = lp_norm(&f, 1.0, Some(&w)).unwrap();
        assert!((v - 2.0 / 3.0).abs() < 1e-4, "{v}");
        assert!(lp_norm(&f, 0.0, None).is_err());
    }

    #[test]
    fn weak_l1_examples() {
        let d = dom(0.0, 4.0, 4);
        let f = GridFunction::new(d, vec![3.0, 1.0, 1.0, 1.0]).unwrap();
        let w = Weight::uniform(d);
        assert_eq!(weak_l1_norm(&f, &w).unwrap(), 4.0);
        assert_eq!(weak_l1_norm(&GridFunction::zeros(d), &w).unwrap(), 0.0);
        let d = dom(-8.0, 8.0, 1600);
        let chi = GridFunction::indicator(d, 0.0, 1.0);
        let v = weak_l1_norm(&chi, &Weight::uniform(d)).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn csv_round_trip_keeps_digits() {
        let d = dom(-1.0, 2.0, 7);
        let f = GridFunction::from_fn(d, |x| (3.0 * x).sin() / 7.0);
        let mut buf = Vec::new();
        f.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("x,value\n"));
        let back = GridFunction::read_csv(buf.as_slice()).unwrap();
        assert_eq!(back.values(), f.values());
        assert!((back.domain().left() + 1.0).abs() < 1e-14);
        assert_eq!(back.domain().cells(), 7);
    }

    #[test]
    fn shape_errors() {
        let d = dom(0.0, 1.0, 4);
        assert!(GridFunction::new(d, vec![0.0; 3]).is_err());
        assert!(GridFunction::new(d, vec![0.0, f64::INFINITY, 0.0, 0.0]).is_err());
        let e = GridFunction::zeros(dom(0.0, 2.0, 4));
        assert!(GridFunction::zeros(d).add(&e).is_err());
    }
}
