//! Approximate-identity kernels, their dilates, and midpoint-rule convolution.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{lp_norm, CellRange, Domain1D, GridFunction};
use crate::variation::ScaleFamily;
use crate::weights::Weight;

/// `∫_{-1}^{1} exp(-1/(1-x²)) dx`.
const BUMP_MASS: f64 = 0.443_993_816_168_079_4;

/// Profile `φ` of an approximate identity `φ_t(x) = t⁻¹ φ(x/t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum KernelSpec {
    /// `π^{-1/2} e^{-x²}`.
    GaussianHeat,
    /// `π⁻¹ (1 + x²)⁻¹`; unit mass but not a Schwartz function.
    Poisson,
    /// Normalized `exp(-1/(1-x²))` on `(-1, 1)`.
    CompactBump,
    /// Smooth cutoff equal to 1 on `[center - w, center + w]` and vanishing
    /// outside `[center - 2w, center + 2w]`. Mass is `3w`, not 1.
    Plateau { center: f64, half_width: f64 },
}

impl KernelSpec {
    pub const UNIT_MASS: [KernelSpec; 3] = [
        KernelSpec::GaussianHeat,
        KernelSpec::Poisson,
        KernelSpec::CompactBump,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            KernelSpec::GaussianHeat => "gaussian-heat",
            KernelSpec::Poisson => "poisson",
            KernelSpec::CompactBump => "compact-bump",
            KernelSpec::Plateau { .. } => "plateau",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "gaussian-heat" | "gaussian" | "heat" => Ok(KernelSpec::GaussianHeat),
            "poisson" => Ok(KernelSpec::Poisson),
            "compact-bump" | "bump" => Ok(KernelSpec::CompactBump),
            other => Err(Error::Config(format!("unknown kernel '{other}'"))),
        }
    }

    /// Cutoff used for `M_φ̃` in far-field estimates: 1 on `[-1, 1]`.
    pub fn unit_plateau() -> Self {
        KernelSpec::Plateau {
            center: 0.0,
            half_width: 1.0,
        }
    }

    pub fn is_unit_mass(&self) -> bool {
        !matches!(self, KernelSpec::Plateau { .. })
    }

    pub fn is_schwartz(&self) -> bool {
        !matches!(self, KernelSpec::Poisson)
    }

    /// Report tags for properties the theory assumes but this kernel lacks.
    pub fn flags(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if !self.is_schwartz() {
            out.push("non-schwartz");
        }
        if !self.is_unit_mass() {
            out.push("non-unit-mass");
        }
        out
    }

    /// `φ(x)`.
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            KernelSpec::GaussianHeat => (-x * x).exp() / PI.sqrt(),
            KernelSpec::Poisson => 1.0 / (PI * (1.0 + x * x)),
            KernelSpec::CompactBump => {
                if x.abs() < 1.0 {
                    (-1.0 / (1.0 - x * x)).exp() / BUMP_MASS
                } else {
                    0.0
                }
            }
            KernelSpec::Plateau { center, half_width } => {
                let d = (x - center).abs();
                if d <= half_width {
                    1.0
                } else if d >= 2.0 * half_width {
                    0.0
                } else {
                    1.0 - smooth_step((d - half_width) / half_width)
                }
            }
        }
    }

    /// Radius beyond which `φ` vanishes identically, if any.
    pub fn support_radius(&self) -> Option<f64> {
        match *self {
            KernelSpec::CompactBump => Some(1.0),
            KernelSpec::Plateau { center, half_width } => Some(center.abs() + 2.0 * half_width),
            _ => None,
        }
    }
}

/// C^∞ transition from 0 at `u ≤ 0` to 1 at `u ≥ 1`.
fn smooth_step(u: f64) -> f64 {
    if u <= 0.0 {
        return 0.0;
    }
    if u >= 1.0 {
        return 1.0;
    }
    let a = (-1.0 / u).exp();
    let b = (-1.0 / (1.0 - u)).exp();
    a / (a + b)
}

/// `φ_t(x) = t⁻¹ φ(x/t)`.
pub fn eval_kernel_dilated(k: &KernelSpec, t: f64, x: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("dilation needs t > 0, got {t}")));
    }
    Ok(k.eval(x / t) / t)
}

pub(crate) fn check_scale(domain: &Domain1D, t: f64) -> Result<()> {
    let min = 2.0 * domain.spacing();
    if !(t > 0.0) || t < min * (1.0 - 1e-12) {
        return Err(Error::Resolution { scale: t, min });
    }
    Ok(())
}

/// `h·φ_t(d·h)` for every cell offset `d ∈ [-(N-1), N-1]`.
pub(crate) struct KernelTable {
    cells: usize,
    data: Vec<f64>,
}

impl KernelTable {
    pub(crate) fn new(k: &KernelSpec, t: f64, domain: &Domain1D) -> Self {
        let n = domain.cells();
        let h = domain.spacing();
        let data = (0..2 * n - 1)
            .map(|idx| {
                let d = idx as f64 - (n as f64 - 1.0);
                h * k.eval(d * h / t) / t
            })
            .collect();
        Self { cells: n, data }
    }
}

/// Source samples prepared for repeated midpoint-rule evaluation.
pub(crate) struct Source {
    support: Option<CellRange>,
    reversed: Vec<f64>,
}

impl Source {
    pub(crate) fn new(f: &[f64]) -> Self {
        let first = f.iter().position(|&v| v != 0.0);
        let last = f.iter().rposition(|&v| v != 0.0);
        match (first, last) {
            (Some(a), Some(b)) => Self {
                support: Some(CellRange::new(a, b + 1)),
                reversed: f[a..=b].iter().rev().copied().collect(),
            },
            _ => Self {
                support: None,
                reversed: Vec::new(),
            },
        }
    }

    /// Source whose samples on `support` are `values` (zero elsewhere).
    pub(crate) fn new_on(values: &[f64], support: CellRange) -> Self {
        debug_assert_eq!(values.len(), support.len());
        Self {
            support: (!support.is_empty()).then_some(support),
            reversed: values.iter().rev().copied().collect(),
        }
    }

    pub(crate) fn is_zero(&self) -> bool {
        self.support.is_none()
    }

    /// `Σ_j table(i, j) f_j`.
    #[inline]
    pub(crate) fn apply(&self, table: &KernelTable, i: usize) -> f64 {
        let Some(s) = self.support else {
            return 0.0;
        };
        let offset = i + table.cells - s.end;
        dot(&table.data[offset..offset + s.len()], &self.reversed)
    }
}

/// Dot product with a fixed four-lane summation order.
#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().min(b.len());
    let (a, b) = (&a[..n], &b[..n]);
    let mut acc = [0.0f64; 4];
    let chunks = n / 4;
    for c in 0..chunks {
        let k = 4 * c;
        acc[0] += a[k] * b[k];
        acc[1] += a[k + 1] * b[k + 1];
        acc[2] += a[k + 2] * b[k + 2];
        acc[3] += a[k + 3] * b[k + 3];
    }
    let mut tail = 0.0;
    for k in 4 * chunks..n {
        tail += a[k] * b[k];
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// `(φ_t ∗ f)(x_i) = h Σ_j φ_t(x_i − x_j) f(x_j)` at every grid point.
pub fn convolve(f: &GridFunction, k: &KernelSpec, t: f64) -> Result<GridFunction> {
    let d = *f.domain();
    check_scale(&d, t)?;
    let table = KernelTable::new(k, t, &d);
    let src = Source::new(f.values());
    let values = (0..d.cells()).map(|i| src.apply(&table, i)).collect();
    GridFunction::new(d, values)
}

/// `(φ_t ∗ f)` for every scale of `scales`, in family order.
pub fn convolve_family(
    f: &GridFunction,
    k: &KernelSpec,
    scales: &ScaleFamily,
) -> Result<Vec<GridFunction>> {
    scales.iter().map(|t| convolve(f, k, t)).collect()
}

/// `M_φ f(x) = max_{t∈S} |(φ_t ∗ f)(x)|`.
pub fn smooth_maximal(f: &GridFunction, k: &KernelSpec, scales: &ScaleFamily) -> Result<GridFunction> {
    let d = *f.domain();
    for t in scales.iter() {
        check_scale(&d, t)?;
    }
    let mut out = vec![0.0f64; d.cells()];
    for t in scales.iter() {
        let c = convolve(f, k, t)?;
        for (o, v) in out.iter_mut().zip(c.values()) {
            *o = o.max(v.abs());
        }
    }
    GridFunction::new(d, out)
}

/// `‖M_φ f‖_{L^p(ω)}`.
pub fn hardy_norm(
    f: &GridFunction,
    k: &KernelSpec,
    scales: &ScaleFamily,
    weight: &Weight,
    p: f64,
) -> Result<f64> {
    let m = smooth_maximal(f, k, scales)?;
    lp_norm(&m, p, Some(weight))
}
