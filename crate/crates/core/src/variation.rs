//! ρ-variation of scale-indexed families.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dyadic::DyadicLattice;
use crate::error::{Error, Result};
use crate::grid::{Domain1D, GridFunction};
use crate::kernel::{check_scale, convolve_family, eval_kernel_dilated, KernelSpec, KernelTable, Source};
use crate::maximal::{hl_maximal_with, m_half_with};

/// A finite, strictly decreasing set of positive scales.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ScaleFamily {
    scales: Vec<f64>,
}

impl TryFrom<Vec<f64>> for ScaleFamily {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<ScaleFamily> for Vec<f64> {
    fn from(s: ScaleFamily) -> Self {
        s.scales
    }
}

impl ScaleFamily {
    pub fn new(scales: Vec<f64>) -> Result<Self> {
        if scales.is_empty() {
            return Err(Error::Domain("scale family is empty".into()));
        }
        if scales.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
            return Err(Error::Domain("scales must be positive and finite".into()));
        }
        if scales.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::Domain("scales must be strictly decreasing".into()));
        }
        Ok(Self { scales })
    }

    /// `t_j = t_max · ratio^j`, `j = 0..count`.
    pub fn geometric(t_max: f64, ratio: f64, count: usize) -> Result<Self> {
        if !(ratio > 0.0 && ratio < 1.0) {
            return Err(Error::Domain(format!("scale ratio must lie in (0, 1), got {ratio}")));
        }
        Self::new((0..count).map(|j| t_max * ratio.powi(j as i32)).collect())
    }

    /// `count` geometric scales from `t_max` down to `t_min` inclusive.
    pub fn geometric_between(t_max: f64, t_min: f64, count: usize) -> Result<Self> {
        if count < 2 || !(t_min < t_max) {
            return Err(Error::Domain("need count ≥ 2 and t_min < t_max".into()));
        }
        let ratio = (t_min / t_max).powf(1.0 / (count - 1) as f64);
        let mut s: Vec<f64> = (0..count).map(|j| t_max * ratio.powi(j as i32)).collect();
        s[count - 1] = t_min;
        Self::new(s)
    }

    /// Superset with twice as many scales: geometric midpoints between
    /// neighbours plus one scale above the largest.
    pub fn refine(&self) -> Self {
        let mut out = Vec::with_capacity(2 * self.len());
        let top = if self.len() > 1 {
            self.scales[0] * (self.scales[0] / self.scales[1]).sqrt()
        } else {
            self.scales[0] * 2.0
        };
        out.push(top);
        for w in self.scales.windows(2) {
            out.push(w[0]);
            out.push((w[0] * w[1]).sqrt());
        }
        out.push(self.min());
        Self::new(out).expect("midpoints keep the order strict")
    }

    /// The family with `t` inserted (no-op if already present).
    pub fn with_scale(&self, t: f64) -> Result<Self> {
        let mut s = self.scales.clone();
        if !s.contains(&t) {
            s.push(t);
            s.sort_by(|a, b| b.total_cmp(a));
        }
        Self::new(s)
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        self.scales.iter().copied()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.scales
    }

    pub fn len(&self) -> usize {
        self.scales.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scales.is_empty()
    }

    pub fn max(&self) -> f64 {
        self.scales[0]
    }

    pub fn min(&self) -> f64 {
        self.scales[self.scales.len() - 1]
    }

    /// Resolution check against `domain` (`t ≥ 2h` for every scale).
    pub fn check(&self, domain: &Domain1D) -> Result<()> {
        check_scale(domain, self.min())
    }
}

fn check_rho(rho: f64) -> Result<()> {
    if !(rho > 1.0) || !rho.is_finite() {
        return Err(Error::Domain(format!("variation exponent must exceed 1, got {rho}")));
    }
    Ok(())
}

/// DP core; `best` is scratch space of length ≥ `a.len()`.
fn dp(a: &[f64], rho: f64, best: &mut Vec<f64>) -> f64 {
    let m = a.len();
    if m < 2 {
        return 0.0;
    }
    best.clear();
    best.resize(m, 0.0);
    let mut top = 0.0f64;
    for i in 1..m {
        let ai = a[i];
        let mut b = 0.0f64;
        for j in 0..i {
            let v = best[j] + (ai - a[j]).abs().powf(rho);
            if v > b {
                b = v;
            }
        }
        best[i] = b;
        top = top.max(b);
    }
    top.powf(1.0 / rho)
}

/// `‖a‖_{V_ρ}` over the index set, by dynamic programming in O(m²).
pub fn seq_variation_dp(a: &[f64], rho: f64) -> Result<f64> {
    check_rho(rho)?;
    Ok(dp(a, rho, &mut Vec::new()))
}

/// `‖a‖_{V_ρ}` by enumerating every index subsequence; `m ≤ 15`.
pub fn seq_variation_bruteforce(a: &[f64], rho: f64) -> Result<f64> {
    check_rho(rho)?;
    let m = a.len();
    if m > 15 {
        return Err(Error::Size(format!("brute force limited to 15 terms, got {m}")));
    }
    let mut top = 0.0f64;
    for mask in 0u32..(1 << m) {
        if mask.count_ones() < 2 {
            continue;
        }
        let mut prev: Option<f64> = None;
        let mut s = 0.0;
        for (i, &ai) in a.iter().enumerate() {
            if mask >> i & 1 == 1 {
                if let Some(p) = prev {
                    s += (ai - p).abs().powf(rho);
                }
                prev = Some(ai);
            }
        }
        top = top.max(s);
    }
    Ok(top.powf(1.0 / rho))
}

/// Pointwise variation of a family of grid functions sharing one domain.
pub fn family_variation(family: &[GridFunction], rho: f64) -> Result<Vec<f64>> {
    check_rho(rho)?;
    let Some(first) = family.first() else {
        return Err(Error::Domain("empty family".into()));
    };
    let n = first.len();
    let mut seq = vec![0.0; family.len()];
    let mut scratch = Vec::new();
    Ok((0..n)
        .map(|i| {
            for (s, g) in seq.iter_mut().zip(family) {
                *s = g.values()[i];
            }
            dp(&seq, rho, &mut scratch)
        })
        .collect())
}

/// `V_ρ` of some family at every grid point, with its provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct VariationProfile {
    pub profile: GridFunction,
    pub rho: f64,
    pub scales: ScaleFamily,
    pub kernel: KernelSpec,
}

#[derive(Serialize)]
struct Sidecar<'a> {
    rho: f64,
    kernel: &'a KernelSpec,
    scales: &'a [f64],
}

impl VariationProfile {
    pub fn values(&self) -> &[f64] {
        self.profile.values()
    }

    pub fn domain(&self) -> &Domain1D {
        self.profile.domain()
    }

    /// Writes `x,value` CSV to `path` and `{rho, kernel, scales}` to the
    /// sibling `.json` file.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        self.profile.save_csv(path)?;
        let mut w = BufWriter::new(File::create(path.with_extension("json"))?);
        serde_json::to_writer_pretty(
            &mut w,
            &Sidecar {
                rho: self.rho,
                kernel: &self.kernel,
                scales: self.scales.as_slice(),
            },
        )?;
        writeln!(w)?;
        Ok(())
    }
}

/// `V_ρ(Φ⋆f)` on the grid: one convolution per scale, then a DP per point.
pub fn variation_operator(
    f: &GridFunction,
    k: &KernelSpec,
    scales: &ScaleFamily,
    rho: f64,
) -> Result<VariationProfile> {
    check_rho(rho)?;
    scales.check(f.domain())?;
    let family = convolve_family(f, k, scales)?;
    let values = family_variation(&family, rho)?;
    Ok(VariationProfile {
        profile: GridFunction::new(*f.domain(), values)?,
        rho,
        scales: scales.clone(),
        kernel: *k,
    })
}

fn same_domain(a: &GridFunction, b: &GridFunction) -> Result<()> {
    if a.domain() != b.domain() {
        return Err(Error::Shape("functions live on different domains".into()));
    }
    Ok(())
}

/// `c_t(x_i) = h Σ_j φ_t(x_i − x_j)(b_i − b_j) f_j` for every scale.
pub fn commutator_family(
    f: &GridFunction,
    b: &GridFunction,
    k: &KernelSpec,
    scales: &ScaleFamily,
) -> Result<Vec<GridFunction>> {
    same_domain(f, b)?;
    let d = *f.domain();
    scales.check(&d)?;
    let Some(supp) = f.support() else {
        return Ok(vec![GridFunction::zeros(d); scales.len()]);
    };
    let tables: Vec<KernelTable> = scales.iter().map(|t| KernelTable::new(k, t, &d)).collect();
    let fv = &f.values()[supp.range()];
    let bv = &b.values()[supp.range()];
    let mut out = vec![vec![0.0; d.cells()]; scales.len()];
    let mut g = vec![0.0; supp.len()];
    for i in 0..d.cells() {
        let bi = b.values()[i];
        for (gj, (&fj, &bj)) in g.iter_mut().zip(fv.iter().zip(bv)) {
            *gj = (bi - bj) * fj;
        }
        let src = Source::new_on(&g, supp);
        for (row, table) in out.iter_mut().zip(&tables) {
            row[i] = src.apply(table, i);
        }
    }
    out.into_iter().map(|v| GridFunction::new(d, v)).collect()
}

/// Same family assembled as `b·(φ_t∗f) − φ_t∗(bf)`; a cross-check for
/// [`commutator_family`].
pub fn commutator_family_via_convolutions(
    f: &GridFunction,
    b: &GridFunction,
    k: &KernelSpec,
    scales: &ScaleFamily,
) -> Result<Vec<GridFunction>> {
    same_domain(f, b)?;
    let bf = b.mul(f)?;
    let cf = convolve_family(f, k, scales)?;
    let cbf = convolve_family(&bf, k, scales)?;
    cf.iter()
        .zip(&cbf)
        .map(|(u, v)| b.mul(u)?.zip_with(v, |x, y| x - y))
        .collect()
}

/// `V_ρ((Φ⋆f)_b)`, the variation of the commutator family.
pub fn commutator_variation(
    f: &GridFunction,
    b: &GridFunction,
    k: &KernelSpec,
    scales: &ScaleFamily,
    rho: f64,
) -> Result<VariationProfile> {
    check_rho(rho)?;
    let family = commutator_family(f, b, k, scales)?;
    let values = family_variation(&family, rho)?;
    Ok(VariationProfile {
        profile: GridFunction::new(*f.domain(), values)?,
        rho,
        scales: scales.clone(),
        kernel: *k,
    })
}

/// `‖{φ_t(ξ−y) − φ_t(z−y)}_t‖_{V_ρ}` over the scale family.
pub fn kernel_difference_variation(
    k: &KernelSpec,
    xi: f64,
    z: f64,
    y: f64,
    scales: &ScaleFamily,
    rho: f64,
) -> Result<f64> {
    if y == xi || y == z {
        return Err(Error::Singularity(format!("y = {y} coincides with ξ or z")));
    }
    let seq = scales
        .iter()
        .map(|t| Ok(eval_kernel_dilated(k, t, xi - y)? - eval_kernel_dilated(k, t, z - y)?))
        .collect::<Result<Vec<f64>>>()?;
    seq_variation_dp(&seq, rho)
}

/// `M_{V_ρ(Φ)} f(x) = max_{Q∋x} max_{ξ∈Q} V_ρ(Φ⋆(f χ_{ℝ∖3Q}))(ξ)` over the
/// lattice cubes, with ξ ranging over the grid points of `Q`.
pub fn grand_maximal_variation(
    f: &GridFunction,
    k: &KernelSpec,
    scales: &ScaleFamily,
    rho: f64,
    lattices: &[DyadicLattice],
) -> Result<GridFunction> {
    check_rho(rho)?;
    let d = *f.domain();
    scales.check(&d)?;
    let n = d.cells();
    let tables: Vec<KernelTable> = scales.iter().map(|t| KernelTable::new(k, t, &d)).collect();
    let mut out = vec![0.0f64; n];
    let mut far = vec![0.0f64; n];
    let mut seq = vec![0.0f64; scales.len()];
    let mut scratch = Vec::new();
    for lat in lattices {
        for q in lat.cubes() {
            let Some(qr) = q.clipped(n) else { continue };
            far.copy_from_slice(f.values());
            if let Some(t3) = q.tripled_clipped(n) {
                far[t3.range()].iter_mut().for_each(|v| *v = 0.0);
            }
            let src = Source::new(&far);
            if src.is_zero() {
                continue;
            }
            let mut top = 0.0f64;
            for i in qr.range() {
                for (s, table) in seq.iter_mut().zip(&tables) {
                    *s = src.apply(table, i);
                }
                top = top.max(dp(&seq, rho, &mut scratch));
            }
            for o in &mut out[qr.range()] {
                *o = o.max(top);
            }
        }
    }
    GridFunction::new(d, out)
}

/// `max_x M_{V_ρ(Φ)}f(x) / (Mf(x) + M_{1/2}(V_ρ(Φ⋆f))(x))`, with 0/0 read as 0.
/// Points with a vanishing denominator and a positive numerator give `∞`.
pub fn grand_maximal_domination_ratio(
    f: &GridFunction,
    k: &KernelSpec,
    scales: &ScaleFamily,
    rho: f64,
    lattices: &[DyadicLattice],
) -> Result<f64> {
    let lhs = grand_maximal_variation(f, k, scales, rho, lattices)?;
    let v = variation_operator(f, k, scales, rho)?;
    let mf = hl_maximal_with(f, lattices);
    let mh = m_half_with(&v.profile, lattices);
    let mut top = 0.0f64;
    for i in 0..f.len() {
        let num = lhs.values()[i];
        let den = mf.values()[i] + mh.values()[i];
        if den > 0.0 {
            top = top.max(num / den);
        } else if num > 1e-9 {
            return Ok(f64::INFINITY);
        }
    }
    Ok(top)
}
