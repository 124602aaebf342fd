//! Weighted Hardy-space atoms and the far-field quantities attached to them.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{lp_norm, CellRange, Domain1D, GridFunction};
use crate::kernel::{smooth_maximal, KernelSpec};
use crate::oscillation::shifted_mean;
use crate::variation::{variation_operator, ScaleFamily};
use crate::weights::Weight;

/// Interval `[center − radius, center + radius)`, snapped to grid cells.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Ball {
    pub center: f64,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: f64, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !center.is_finite() {
            return Err(Error::Domain(format!("ball needs a positive radius, got {radius}")));
        }
        Ok(Self { center, radius })
    }

    /// Cells whose midpoints lie in the ball; the ball must sit inside `d`.
    pub fn cells(&self, d: &Domain1D) -> Result<CellRange> {
        let slack = 1e-9 * d.spacing();
        if self.center - self.radius < d.left() - slack || self.center + self.radius > d.right() + slack {
            return Err(Error::Placement(format!(
                "ball [{}, {}) leaves the domain",
                self.center - self.radius,
                self.center + self.radius
            )));
        }
        let r = d.cells_in(self.center - self.radius, self.center + self.radius);
        if r.is_empty() {
            return Err(Error::CellResolution(format!(
                "ball of radius {} holds no cell midpoint",
                self.radius
            )));
        }
        Ok(r)
    }
}

/// Moments `∫ a(x) ((x − x_B)/r)^j dx`, `j = 0..=s`, over the ball's cells.
fn moments(a: &GridFunction, cells: CellRange, s: usize) -> Vec<f64> {
    let d = a.domain();
    let (c, r) = (cells.center(d), 0.5 * cells.measure(d));
    (0..=s)
        .map(|j| {
            cells
                .range()
                .map(|i| a.values()[i] * ((d.point(i) - c) / r).powi(j as i32))
                .sum::<f64>()
                * d.spacing()
        })
        .collect()
}

fn lq_norm(a: &GridFunction, q: f64, w: &Weight) -> Result<f64> {
    if q.is_infinite() {
        Ok(a.max_abs())
    } else {
        lp_norm(a, q, Some(w))
    }
}

/// A `(p, q, s)_ω`-atom: supported in `B`, with `‖a‖_{L^q(ω)} ≤ ω(B)^{1/q−1/p}`
/// and vanishing moments up to order `s`.
#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub values: GridFunction,
    pub ball: Ball,
    pub cells: CellRange,
    pub p: f64,
    pub q: f64,
    pub s: usize,
    pub weight: Weight,
}

/// Scalar description of an atom and its validation residuals.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AtomSummary {
    pub ball: Ball,
    pub cells: CellRange,
    pub p: f64,
    /// `None` for `q = ∞`.
    pub q: Option<f64>,
    pub s: usize,
    pub lq_norm: f64,
    /// `ω(B)^{1/q − 1/p}`.
    pub size_bound: f64,
    /// `|∫ a (x − x_B)^j| / (‖a‖₁ r^j)` for `j = 0..=s`.
    pub moment_residuals: Vec<f64>,
}

impl Atom {
    /// `ω(B)^{1/q − 1/p}`.
    pub fn size_bound(&self) -> f64 {
        size_bound(&self.weight, self.cells, self.p, self.q)
    }

    pub fn summary(&self) -> Result<AtomSummary> {
        let l1 = lp_norm(&self.values, 1.0, None)?;
        Ok(AtomSummary {
            ball: self.ball,
            cells: self.cells,
            p: self.p,
            q: self.q.is_finite().then_some(self.q),
            s: self.s,
            lq_norm: lq_norm(&self.values, self.q, &self.weight)?,
            size_bound: self.size_bound(),
            moment_residuals: moments(&self.values, self.cells, self.s)
                .into_iter()
                .map(|m| if l1 > 0.0 { m.abs() / l1 } else { 0.0 })
                .collect(),
        })
    }

    /// Checks support, size and moment conditions.
    pub fn validate(&self) -> Result<AtomSummary> {
        if let Some(supp) = self.values.support() {
            if supp.start < self.cells.start || supp.end > self.cells.end {
                return Err(Error::Support(format!("support {supp:?} leaves the ball {:?}", self.cells)));
            }
        }
        let sm = self.summary()?;
        if sm.lq_norm > sm.size_bound * (1.0 + 1e-9) {
            return Err(Error::Construction(format!(
                "‖a‖ = {} exceeds ω(B)^(1/q−1/p) = {}",
                sm.lq_norm, sm.size_bound
            )));
        }
        if let Some(j) = sm.moment_residuals.iter().position(|&m| m > 1e-9) {
            return Err(Error::Construction(format!(
                "moment {j} residual {} exceeds 1e-9",
                sm.moment_residuals[j]
            )));
        }
        Ok(sm)
    }
}

fn size_bound(w: &Weight, cells: CellRange, p: f64, q: f64) -> f64 {
    let inv_q = if q.is_infinite() { 0.0 } else { 1.0 / q };
    w.measure(cells).powf(inv_q - 1.0 / p)
}

/// Seeded random atom: a smooth random profile on `B` minus its `L²(B)`
/// projection onto polynomials of degree `≤ s`, scaled to
/// `‖a‖_{L^q(ω)} = ω(B)^{1/q−1/p}`.
pub fn make_atom(p: f64, q: f64, s: usize, w: &Weight, ball: Ball, seed: u64) -> Result<Atom> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::Domain(format!("atom exponent p must lie in (0, 1], got {p}")));
    }
    if !(q > 1.0) {
        return Err(Error::Domain(format!("atom exponent q must exceed 1, got {q}")));
    }
    let d = *w.domain();
    let cells = ball.cells(&d)?;
    if cells.len() < s + 2 {
        return Err(Error::CellResolution(format!(
            "ball holds {} cells, need at least {} for {s} vanishing moments",
            cells.len(),
            s + 2
        )));
    }
    let (c, r) = (cells.center(&d), 0.5 * cells.measure(&d));
    let us: Vec<f64> = cells.range().map(|i| (d.point(i) - c) / r).collect();

    // orthonormal polynomial basis on the ball's sample points
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(s + 1);
    for j in 0..=s {
        let mut v: Vec<f64> = us.iter().map(|u| u.powi(j as i32)).collect();
        for _ in 0..2 {
            for e in &basis {
                let dot: f64 = v.iter().zip(e).map(|(a, b)| a * b).sum();
                v.iter_mut().zip(e).for_each(|(a, b)| *a -= dot * b);
            }
        }
        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        v.iter_mut().for_each(|a| *a /= norm);
        basis.push(v);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..8 {
        let coef: Vec<(f64, f64)> = (1..=6)
            .map(|k| (rng.gen_range(-1.0..1.0) / k as f64, rng.gen_range(0.0..std::f64::consts::TAU)))
            .collect();
        let mut g: Vec<f64> = us
            .iter()
            .map(|&u| {
                let wave: f64 = coef
                    .iter()
                    .enumerate()
                    .map(|(k, &(a, ph))| a * ((k + 1) as f64 * std::f64::consts::FRAC_PI_2 * (u + 1.0) + ph).sin())
                    .sum();
                wave * (1.0 - u * u)
            })
            .collect();
        let before = g.iter().map(|a| a * a).sum::<f64>().sqrt();
        for _ in 0..2 {
            for e in &basis {
                let dot: f64 = g.iter().zip(e).map(|(a, b)| a * b).sum();
                g.iter_mut().zip(e).for_each(|(a, b)| *a -= dot * b);
            }
        }
        let after = g.iter().map(|a| a * a).sum::<f64>().sqrt();
        if !(after > 1e-8 * before) {
            continue;
        }
        let mut vals = vec![0.0; d.cells()];
        vals[cells.range()].copy_from_slice(&g);
        let raw = GridFunction::new(d, vals)?;
        let scale = size_bound(w, cells, p, q) / lq_norm(&raw, q, w)?;
        return Ok(Atom {
            values: raw.scaled(scale),
            ball,
            cells,
            p,
            q,
            s,
            weight: w.clone(),
        });
    }
    Err(Error::Construction("projection annihilated 8 random profiles".into()))
}

/// `a = (h − ⟨h⟩_B) χ_B / (2ω(B))` with `h = sgn(b − ⟨b⟩_B)` and `sgn(0) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct SgnAtom {
    pub values: GridFunction,
    pub cells: CellRange,
    /// `b` is constant on `B`, so `a ≡ 0`.
    pub degenerate: bool,
}

pub fn sgn_atom(b: &GridFunction, ball: Ball, w: &Weight) -> Result<SgnAtom> {
    if b.domain() != w.domain() {
        return Err(Error::Shape("function and weight live on different domains".into()));
    }
    let d = *b.domain();
    let cells = ball.cells(&d)?;
    let bv = &b.values()[cells.range()];
    let mb = shifted_mean(bv);
    let tol = 1e-12 * (1.0 + bv.iter().fold(0.0f64, |m, v| m.max(v.abs())));
    let h: Vec<f64> = bv
        .iter()
        .map(|&v| {
            let x = v - mb;
            if x > tol {
                1.0
            } else if x < -tol {
                -1.0
            } else {
                0.0
            }
        })
        .collect();
    let mh = h.iter().sum::<f64>() / h.len() as f64;
    let wb = w.measure(cells);
    let mut vals = vec![0.0; d.cells()];
    for (o, hv) in vals[cells.range()].iter_mut().zip(&h) {
        *o = (hv - mh) / (2.0 * wb);
    }
    let values = GridFunction::new(d, vals)?;
    Ok(SgnAtom {
        degenerate: values.is_zero(),
        values,
        cells,
    })
}

/// Result of comparing `|x − x_B|⁻¹ |∫_B f|` with `M_φ̃ f(x)` off the ball.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FarFieldReport {
    /// `max_{x∉B} LHS(x)/M_φ̃ f(x)`; 0/0 reads as 0.
    pub max_ratio: f64,
    pub argmax_x: f64,
    /// `∫_B f`.
    pub mass: f64,
    /// Points where `M_φ̃ f = 0` but the left side is positive.
    pub zero_denominator: usize,
}

/// Far-field bound for `f` supported in `B` with the cutoff kernel `φ̃`.
pub fn far_field_maximal_bound_check(
    f: &GridFunction,
    ball: Ball,
    k_tilde: &KernelSpec,
    scales: &ScaleFamily,
) -> Result<FarFieldReport> {
    let d = *f.domain();
    let cells = ball.cells(&d)?;
    if let Some(supp) = f.support() {
        if supp.start < cells.start || supp.end > cells.end {
            return Err(Error::Support(format!("supp f = {supp:?} is not inside {cells:?}")));
        }
    }
    let mass = f.integral_over(cells);
    let xb = cells.center(&d);
    let m = smooth_maximal(f, k_tilde, scales)?;
    let mut rep = FarFieldReport {
        max_ratio: 0.0,
        argmax_x: xb,
        mass,
        zero_denominator: 0,
    };
    for i in (0..d.cells()).filter(|&i| !cells.contains(i)) {
        let x = d.point(i);
        let lhs = mass.abs() / (x - xb).abs();
        let den = m.values()[i];
        if den > 0.0 {
            if lhs / den > rep.max_ratio {
                rep.max_ratio = lhs / den;
                rep.argmax_x = x;
            }
        } else if lhs > 0.0 {
            rep.zero_denominator += 1;
        }
    }
    Ok(rep)
}

/// `‖(b − ⟨b⟩_B) V_ρ(Φ⋆a)‖_{L¹(ω)}`.
pub fn centered_variation_l1(
    b: &GridFunction,
    a: &GridFunction,
    cells: CellRange,
    w: &Weight,
    k: &KernelSpec,
    scales: &ScaleFamily,
    rho: f64,
) -> Result<f64> {
    let v = variation_operator(a, k, scales, rho)?;
    let mb = shifted_mean(&b.values()[cells.range()]);
    let prod = b.zip_with(&v.profile, |bv, vv| (bv - mb) * vv)?;
    lp_norm(&prod, 1.0, Some(w))
}

/// `((1/ω(B)) ∫_B |b − ⟨b⟩_B|^q ω)^{1/q}`.
pub fn weighted_oscillation(b: &GridFunction, cells: CellRange, w: &Weight, q: f64) -> Result<f64> {
    if !(q >= 1.0) {
        return Err(Error::Domain(format!("need q ≥ 1, got {q}")));
    }
    let bv = &b.values()[cells.range()];
    let mb = shifted_mean(bv);
    let wv = &w.values()[cells.range()];
    let num: f64 = bv.iter().zip(wv).map(|(x, wi)| (x - mb).abs().powf(q) * wi).sum();
    let den: f64 = wv.iter().sum();
    Ok((num / den).powf(1.0 / q))
}
