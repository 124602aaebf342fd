//! Sparse families, the stopping-time construction, and sparse operators.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::dyadic::{default_lattices, Cube, DyadicLattice};
use crate::error::{Error, Result};
use crate::grid::{CellRange, GridFunction};
use crate::kernel::KernelSpec;
use crate::maximal::prefix_sums;
use crate::oscillation::shifted_mean;
use crate::variation::{variation_operator, ScaleFamily};

/// Largest stopping constant tried before the construction gives up.
pub const C0_LIMIT: f64 = 1024.0;

/// A cube of a sparse family together with its private set `E_Q`.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseCube {
    pub cube: Cube,
    /// Part of the cube inside the domain.
    pub cells: CellRange,
    /// `E_Q` as sorted, disjoint cell ranges.
    pub e: Vec<CellRange>,
}

impl SparseCube {
    pub fn e_len(&self) -> usize {
        self.e.iter().map(|r| r.len()).sum()
    }
}

/// An η-sparse family of cubes from one lattice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "SparseJson", try_from = "SparseJson")]
pub struct SparseFamily {
    pub lattice: DyadicLattice,
    pub eta: f64,
    pub cubes: Vec<SparseCube>,
    /// Stopping constant the construction settled on.
    pub c0: f64,
}

#[derive(Serialize, Deserialize)]
struct CubeRef {
    level: u32,
    index: usize,
}

#[derive(Serialize, Deserialize)]
struct SparseJson {
    lattice: DyadicLattice,
    eta: f64,
    c0: f64,
    cubes: Vec<CubeRef>,
    #[serde(rename = "E")]
    e: BTreeMap<String, Vec<[usize; 2]>>,
}

impl From<SparseFamily> for SparseJson {
    fn from(s: SparseFamily) -> Self {
        Self {
            lattice: s.lattice,
            eta: s.eta,
            c0: s.c0,
            cubes: s
                .cubes
                .iter()
                .map(|c| CubeRef {
                    level: c.cube.level,
                    index: c.cube.index,
                })
                .collect(),
            e: s
                .cubes
                .iter()
                .map(|c| (c.cube.key(), c.e.iter().map(|r| [r.start, r.end]).collect()))
                .collect(),
        }
    }
}

impl TryFrom<SparseJson> for SparseFamily {
    type Error = Error;

    fn try_from(j: SparseJson) -> Result<Self> {
        let n = j.lattice.domain_cells;
        let cubes = j
            .cubes
            .iter()
            .map(|r| {
                let cube = j.lattice.cube(r.level, r.index);
                let cells = cube
                    .clipped(n)
                    .ok_or_else(|| Error::Construction(format!("cube {} misses the domain", cube.key())))?;
                let e = j
                    .e
                    .get(&cube.key())
                    .map(|v| v.iter().map(|&[a, b]| CellRange::new(a, b)).collect())
                    .unwrap_or_default();
                Ok(SparseCube { cube, cells, e })
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            lattice: j.lattice,
            eta: j.eta,
            cubes,
            c0: j.c0,
        })
    }
}

/// Outcome of [`validate_sparse`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SparseValidation {
    pub valid: bool,
    pub violations: Vec<String>,
}

/// Checks `E_Q ⊆ Q`, `|E_Q| ≥ η|Q|` and pairwise disjointness by counting cells.
pub fn validate_sparse(s: &SparseFamily) -> SparseValidation {
    let mut violations = Vec::new();
    let mut owner: Vec<Option<usize>> = vec![None; s.lattice.domain_cells];
    for (k, c) in s.cubes.iter().enumerate() {
        let key = c.cube.key();
        if (c.e_len() as f64) < s.eta * c.cells.len() as f64 {
            violations.push(format!("|E_{key}| = {} < η·{}", c.e_len(), c.cells.len()));
        }
        for r in &c.e {
            if r.start < c.cells.start || r.end > c.cells.end {
                violations.push(format!("E_{key} leaves its cube"));
                continue;
            }
            for i in r.range() {
                match owner[i] {
                    Some(other) => {
                        violations.push(format!(
                            "E_{} and E_{key} share cell {i}",
                            s.cubes[other].cube.key()
                        ));
                        break;
                    }
                    None => owner[i] = Some(k),
                }
            }
        }
    }
    SparseValidation {
        valid: violations.is_empty(),
        violations,
    }
}

struct Averages {
    pre: Vec<f64>,
    n: usize,
}

impl Averages {
    fn tripled(&self, q: &Cube) -> f64 {
        q.tripled_clipped(self.n)
            .map_or(0.0, |r| (self.pre[r.end] - self.pre[r.start]) / r.len() as f64)
    }
}

/// Stopping-time family for `f` on `lat`: from each selected cube `Q`, the
/// maximal descendants `P` with `⟨|f|⟩_{3P} > C0 ⟨|f|⟩_{3Q}` are selected.
/// When the selected descendants of some cube cover more than half of it, `C0`
/// is doubled and the construction restarts, so the result is ½-sparse.
pub fn build_sparse_family(f: &GridFunction, lat: &DyadicLattice, c0: f64) -> Result<SparseFamily> {
    if !(c0 > 1.0) {
        return Err(Error::Domain(format!("stopping constant must exceed 1, got {c0}")));
    }
    if f.is_zero() {
        return Err(Error::Empty("sparse construction needs a nonzero function".into()));
    }
    if lat.domain_cells != f.len() {
        return Err(Error::Shape("lattice built for a different grid".into()));
    }
    let avg = Averages {
        pre: prefix_sums(f.values().iter().map(|v| v.abs())),
        n: f.len(),
    };
    let mut c = c0;
    while c <= C0_LIMIT {
        if let Some(cubes) = try_build(&avg, lat, c) {
            return Ok(SparseFamily {
                lattice: *lat,
                eta: 0.5,
                cubes,
                c0: c,
            });
        }
        c *= 2.0;
    }
    Err(Error::Construction(format!(
        "no ½-sparse family with stopping constant up to {C0_LIMIT} (started at {c0})"
    )))
}

fn try_build(avg: &Averages, lat: &DyadicLattice, c0: f64) -> Option<Vec<SparseCube>> {
    let n = avg.n;
    let mut out = Vec::new();
    let mut stack = vec![lat.root()];
    let mut selected = Vec::new();
    let mut frontier = Vec::new();
    while let Some(q) = stack.pop() {
        let cells = q.clipped(n)?;
        let threshold = c0 * avg.tripled(&q);
        selected.clear();
        frontier.clear();
        frontier.extend(lat.children_in_domain(&q).into_iter().rev());
        while let Some(p) = frontier.pop() {
            if avg.tripled(&p) > threshold {
                selected.push(p);
            } else {
                frontier.extend(lat.children_in_domain(&p).into_iter().rev());
            }
        }
        let covered: usize = selected.iter().map(|p| p.clipped(n).map_or(0, |r| r.len())).sum();
        if 2 * covered > cells.len() {
            return None;
        }
        let mut e = Vec::new();
        let mut at = cells.start;
        for p in &selected {
            let r = p.clipped(n).expect("children meet the domain");
            if r.start > at {
                e.push(CellRange::new(at, r.start));
            }
            at = r.end;
        }
        if at < cells.end {
            e.push(CellRange::new(at, cells.end));
        }
        out.push(SparseCube { cube: q, cells, e });
        stack.extend(selected.iter().rev().copied());
    }
    out.sort_by_key(|c| (c.cube.level, c.cube.index));
    Some(out)
}

fn same_domain(a: &GridFunction, b: &GridFunction) -> Result<()> {
    if a.domain() != b.domain() {
        return Err(Error::Shape("functions live on different domains".into()));
    }
    Ok(())
}

/// `T_S f = Σ_{Q∈S} ⟨|f|⟩_Q χ_Q`.
pub fn sparse_operator(s: &SparseFamily, f: &GridFunction) -> GridFunction {
    let pre = prefix_sums(f.values().iter().map(|v| v.abs()));
    let mut out = vec![0.0; f.len()];
    for c in &s.cubes {
        let r = c.cells;
        let a = (pre[r.end] - pre[r.start]) / r.len() as f64;
        out[r.range()].iter_mut().for_each(|o| *o += a);
    }
    GridFunction::new(*f.domain(), out).expect("finite")
}

/// `T_{S,b} f = Σ_{Q∈S} |b − ⟨b⟩_Q| ⟨|f|⟩_Q χ_Q`.
pub fn sparse_commutator(s: &SparseFamily, b: &GridFunction, f: &GridFunction) -> Result<GridFunction> {
    same_domain(b, f)?;
    let pre = prefix_sums(f.values().iter().map(|v| v.abs()));
    let mut out = vec![0.0; f.len()];
    for c in &s.cubes {
        let r = c.cells;
        let a = (pre[r.end] - pre[r.start]) / r.len() as f64;
        let mb = shifted_mean(&b.values()[r.range()]);
        for i in r.range() {
            out[i] += (b.values()[i] - mb).abs() * a;
        }
    }
    GridFunction::new(*f.domain(), out)
}

/// `T*_{S,b} f = Σ_{Q∈S} ⟨|(b − ⟨b⟩_Q) f|⟩_Q χ_Q`.
pub fn sparse_commutator_star(s: &SparseFamily, b: &GridFunction, f: &GridFunction) -> Result<GridFunction> {
    same_domain(b, f)?;
    let mut out = vec![0.0; f.len()];
    for c in &s.cubes {
        let r = c.cells;
        let mb = shifted_mean(&b.values()[r.range()]);
        let a = r
            .range()
            .map(|i| ((b.values()[i] - mb) * f.values()[i]).abs())
            .sum::<f64>()
            / r.len() as f64;
        out[r.range()].iter_mut().for_each(|o| *o += a);
    }
    GridFunction::new(*f.domain(), out)
}

/// Result of comparing `V_ρ(Φ⋆f)` with `Σ_j T_{S_j} f`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DominationReport {
    /// `max_x V(x) / Σ_j T_{S_j} f(x)`, reading 0/0 as 0.
    pub max_ratio: f64,
    /// Cell where the maximum is attained.
    pub argmax: usize,
    /// Points with a vanishing denominator and `V > 1e-9`.
    pub zero_denominator: usize,
    /// Stopping constant used on each lattice.
    pub c0: Vec<f64>,
    /// Number of cubes in each family.
    pub family_sizes: Vec<usize>,
}

/// Domination ratio of a precomputed variation profile `v` of `f`.
pub fn domination_ratio(
    v: &GridFunction,
    f: &GridFunction,
    lattices: &[DyadicLattice],
    c0: f64,
) -> Result<DominationReport> {
    same_domain(v, f)?;
    let n = f.len();
    if f.is_zero() {
        let zero_denominator = v.values().iter().filter(|&&x| x > 1e-9).count();
        return Ok(DominationReport {
            max_ratio: 0.0,
            argmax: 0,
            zero_denominator,
            c0: Vec::new(),
            family_sizes: Vec::new(),
        });
    }
    let mut total = vec![0.0; n];
    let mut c0s = Vec::new();
    let mut sizes = Vec::new();
    for lat in lattices {
        let s = build_sparse_family(f, lat, c0)?;
        for (t, x) in total.iter_mut().zip(sparse_operator(&s, f).values()) {
            *t += x;
        }
        c0s.push(s.c0);
        sizes.push(s.cubes.len());
    }
    let mut report = DominationReport {
        max_ratio: 0.0,
        argmax: 0,
        zero_denominator: 0,
        c0: c0s,
        family_sizes: sizes,
    };
    for (i, (&num, &den)) in v.values().iter().zip(&total).enumerate() {
        if den > 0.0 {
            if num / den > report.max_ratio {
                report.max_ratio = num / den;
                report.argmax = i;
            }
        } else if num > 1e-9 {
            report.zero_denominator += 1;
        }
    }
    Ok(report)
}

/// Builds one family per lattice from `f` and reports `max V_ρ(Φ⋆f)/Σ_j T_{S_j}f`.
pub fn domination_check(
    f: &GridFunction,
    k: &KernelSpec,
    scales: &ScaleFamily,
    rho: f64,
    c0: f64,
) -> Result<DominationReport> {
    let v = variation_operator(f, k, scales, rho)?;
    domination_ratio(&v.profile, f, &default_lattices(f.domain()), c0)
}
