//! Muckenhoupt weights and their characteristic constants.
//!
//! Suprema "over all cubes" run over the cubes of the three shifted lattices,
//! each clipped to the computational domain. The `_exhaustive` variants scan
//! every grid-aligned interval instead and serve as oracles on small grids.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::dyadic::{clipped_cubes, DyadicLattice};
use crate::error::{Error, Result};
use crate::grid::{CellRange, Domain1D, GridFunction};
use crate::maximal::{hl_maximal_with, prefix_sums};

/// Analytic description attached to a weight, when one exists.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum WeightTag {
    Constant { value: f64 },
    Power { exponent: f64, floor: f64 },
}

/// A strictly positive grid function used as a measure density.
#[derive(Debug, Clone, PartialEq)]
pub struct Weight {
    base: GridFunction,
    tag: Option<WeightTag>,
}

impl Weight {
    pub fn new(base: GridFunction) -> Result<Self> {
        if let Some(i) = base.values().iter().position(|&v| !(v > 0.0) || !v.is_finite()) {
            return Err(Error::Domain(format!(
                "weight must be positive and finite, got {} at cell {i}",
                base.values()[i]
            )));
        }
        Ok(Self { base, tag: None })
    }

    pub fn with_tag(mut self, tag: WeightTag) -> Self {
        self.tag = Some(tag);
        self
    }

    pub fn uniform(domain: Domain1D) -> Self {
        Self::constant(domain, 1.0).expect("1 is a valid weight")
    }

    pub fn constant(domain: Domain1D, c: f64) -> Result<Self> {
        Ok(Self::new(GridFunction::constant(domain, c))?.with_tag(WeightTag::Constant { value: c }))
    }

    pub fn tag(&self) -> Option<&WeightTag> {
        self.tag.as_ref()
    }

    pub fn domain(&self) -> &Domain1D {
        self.base.domain()
    }

    pub fn values(&self) -> &[f64] {
        self.base.values()
    }

    pub fn as_function(&self) -> &GridFunction {
        &self.base
    }

    /// `ω(r) = Σ_{i∈r} ω_i h`.
    pub fn measure(&self, r: CellRange) -> f64 {
        self.base.integral_over(r)
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        Weight::new(self.base.scaled(c))
    }

    /// Pointwise power `ω^s`.
    pub fn pow(&self, s: f64) -> Result<Self> {
        Weight::new(self.base.map(|v| v.powf(s)))
    }
}

/// `ω(x) = max(|x|, floor)^a`.
pub fn power_weight(a: f64, domain: Domain1D, floor: f64) -> Result<Weight> {
    if !(floor > 0.0) {
        return Err(Error::Domain(format!("power weight floor must be positive, got {floor}")));
    }
    let base = GridFunction::from_fn(domain, |x| x.abs().max(floor).powf(a));
    Ok(Weight::new(base)?.with_tag(WeightTag::Power { exponent: a, floor }))
}

/// Bloom weight `ν = (μ/λ)^{1/p}`.
pub fn bloom_weight(mu: &Weight, lambda: &Weight, p: f64) -> Result<Weight> {
    if !(p > 1.0) {
        return Err(Error::Domain(format!("Bloom weight needs p > 1, got {p}")));
    }
    let base = mu.base.zip_with(&lambda.base, |m, l| (m / l).powf(1.0 / p))?;
    Weight::new(base)
}

/// Product `⟨ω⟩_Q ⟨ω^{1-p'}⟩_Q^{p-1}` for one set of cells.
fn ap_product(pre_w: &[f64], pre_dual: &[f64], r: CellRange, p: f64) -> f64 {
    let k = r.len() as f64;
    let aw = (pre_w[r.end] - pre_w[r.start]) / k;
    let ad = (pre_dual[r.end] - pre_dual[r.start]) / k;
    aw * ad.powf(p - 1.0)
}

fn ap_prefix(w: &Weight, p: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    if !(p > 1.0) {
        return Err(Error::Domain(format!("A_p constant needs p > 1, got {p}")));
    }
    let dual_exp = -1.0 / (p - 1.0);
    Ok((
        prefix_sums(w.values().iter().copied()),
        prefix_sums(w.values().iter().map(|v| v.powf(dual_exp))),
    ))
}

/// `[ω]_{A_p} = sup_Q ⟨ω⟩_Q ⟨ω^{1-p'}⟩_Q^{p-1}` over the lattice cubes.
pub fn ap_constant(w: &Weight, p: f64, lattices: &[DyadicLattice]) -> Result<f64> {
    let (pw, pd) = ap_prefix(w, p)?;
    Ok(clipped_cubes(lattices)
        .into_iter()
        .map(|r| ap_product(&pw, &pd, r, p))
        .fold(0.0, f64::max))
}

/// `[ω]_{A_p}` over every grid-aligned interval; O(N²).
pub fn ap_constant_exhaustive(w: &Weight, p: f64) -> Result<f64> {
    let (pw, pd) = ap_prefix(w, p)?;
    let n = w.values().len();
    let mut best = 0.0f64;
    for a in 0..n {
        for b in a + 1..=n {
            best = best.max(ap_product(&pw, &pd, CellRange::new(a, b), p));
        }
    }
    Ok(best)
}

/// `[ω]_{A_1} = max_i Mω(x_i)/ω(x_i)`.
pub fn a1_constant(w: &Weight, lattices: &[DyadicLattice]) -> f64 {
    let m = hl_maximal_with(&w.base, lattices);
    m.values()
        .iter()
        .zip(w.values())
        .map(|(mv, wv)| mv / wv)
        .fold(0.0, f64::max)
}

/// `sup_Q ⟨ω⟩_Q / ess inf_Q ω`, the cube form of the A_1 condition.
pub fn a1_cube_constant(w: &Weight, lattices: &[DyadicLattice]) -> f64 {
    let pre = prefix_sums(w.values().iter().copied());
    clipped_cubes(lattices)
        .into_iter()
        .map(|r| {
            let avg = (pre[r.end] - pre[r.start]) / r.len() as f64;
            let inf = w.values()[r.range()].iter().copied().fold(f64::INFINITY, f64::min);
            avg / inf
        })
        .fold(0.0, f64::max)
}

/// Fujii–Wilson `[ω]_{A_∞} = sup_Q ω(Q)^{-1} ∫_Q M(χ_Q ω)`.
pub fn ainf_constant(w: &Weight, lattices: &[DyadicLattice]) -> f64 {
    let n = w.values().len();
    let pre = prefix_sums(w.values().iter().copied());
    let mass = |r: CellRange| pre[r.end] - pre[r.start];
    let mut best = 0.0f64;
    let mut local = Vec::new();
    for lat in lattices {
        for q in lat.cubes() {
            let Some(qr) = q.clipped(n) else { continue };
            // M(χ_Q ω) on Q: only cubes meeting Q contribute
            local.clear();
            local.resize(qr.len(), 0.0f64);
            for other in lattices {
                for level in 0..=other.depth {
                    for p in other.cubes_meeting(level, qr) {
                        let pr = p.clipped(n).expect("meets Q inside the domain");
                        let ov = pr.intersect(&qr).expect("meets Q");
                        let val = mass(ov) / pr.len() as f64;
                        for v in &mut local[ov.start - qr.start..ov.end - qr.start] {
                            *v = v.max(val);
                        }
                    }
                }
            }
            let integral: f64 = local.iter().sum();
            best = best.max(integral / mass(qr));
        }
    }
    best
}

/// Constants of one weight, as reported by experiments and `varharm info`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightConstants {
    /// `p ↦ [ω]_{A_p}`, keyed by the formatted exponent.
    pub ap: BTreeMap<String, f64>,
    pub a1: f64,
    pub ainf: f64,
    /// Root shifts of the lattices used, in thirds of the root length.
    pub lattice_shifts: Vec<f64>,
}

impl WeightConstants {
    pub fn compute(w: &Weight, ps: &[f64], lattices: &[DyadicLattice]) -> Result<Self> {
        let mut ap = BTreeMap::new();
        for &p in ps {
            ap.insert(format!("{p}"), ap_constant(w, p, lattices)?);
        }
        Ok(Self {
            ap,
            a1: a1_constant(w, lattices),
            ainf: ainf_constant(w, lattices),
            lattice_shifts: lattices.iter().map(|l| l.shift_thirds as f64 / 3.0).collect(),
        })
    }

    pub fn ap(&self, p: f64) -> Option<f64> {
        self.ap.get(&format!("{p}")).copied()
    }
}

/// Estimate of `q_ω = inf{q : ω ∈ A_q}`: the smallest `q ∈ (1, q_max]` with
/// `[ω]_{A_q} ≤ threshold`, by bisection (the constant is non-increasing in q).
/// Returns `None` when even `q_max` exceeds the threshold.
pub fn critical_index_estimate(
    w: &Weight,
    lattices: &[DyadicLattice],
    threshold: f64,
    q_max: f64,
) -> Result<Option<f64>> {
    if ap_constant(w, q_max, lattices)? > threshold {
        return Ok(None);
    }
    let (mut lo, mut hi) = (1.0f64, q_max);
    for _ in 0..40 {
        let mid = 0.5 * (lo + hi);
        if ap_constant(w, mid, lattices)? <= threshold {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(hi))
}

/// Truncated `∫ ω(x)/(1+|x|) dx` over the domain.
pub fn decay_integral(w: &Weight) -> f64 {
    let d = w.domain();
    w.values()
        .iter()
        .zip(d.points())
        .map(|(v, x)| v / (1.0 + x.abs()))
        .sum::<f64>()
        * d.spacing()
}
