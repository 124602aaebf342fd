//! Oscillation functionals: BMO-type norms, medians, local mean oscillation,
//! and the sign-coherent witness sets used for lower bounds.
//!
//! Cube sets are passed as lists of cell ranges; [`clipped_cubes`] gives the
//! lattice cubes and [`all_intervals`] every grid-aligned interval.
//!
//! [`clipped_cubes`]: crate::dyadic::clipped_cubes

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{CellRange, GridFunction};
use crate::weights::Weight;

/// Every interval `[a, b)` of cells with `min_len ≤ b − a`; O(N²) of them.
pub fn all_intervals(cells: usize, min_len: usize) -> Vec<CellRange> {
    let mut out = Vec::new();
    for a in 0..cells {
        for b in a + min_len.max(1)..=cells {
            out.push(CellRange::new(a, b));
        }
    }
    out
}

/// Mean of `v`, accumulated relative to `v[0]` so constants are reproduced exactly.
pub(crate) fn shifted_mean(v: &[f64]) -> f64 {
    let v0 = v[0];
    v0 + v.iter().map(|x| x - v0).sum::<f64>() / v.len() as f64
}

/// `Σ_{i∈r} |b_i − ⟨b⟩_r|` (without the factor h).
fn oscillation_sum(b: &[f64], r: CellRange) -> f64 {
    let s = &b[r.range()];
    let m = shifted_mean(s);
    s.iter().map(|x| (x - m).abs()).sum()
}

/// Per-cube values of an oscillation functional and their maximum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OscillationReport {
    pub cubes: Vec<CellRange>,
    pub values: Vec<f64>,
    pub argmax: Option<usize>,
    pub norm: f64,
}

impl OscillationReport {
    fn from_values(cubes: &[CellRange], values: Vec<f64>) -> Self {
        let mut argmax = None;
        let mut norm = 0.0f64;
        for (i, &v) in values.iter().enumerate() {
            if argmax.is_none() || v > norm {
                norm = v;
                argmax = Some(i);
            }
        }
        Self {
            cubes: cubes.to_vec(),
            values,
            argmax,
            norm,
        }
    }

    pub fn argmax_cube(&self) -> Option<CellRange> {
        self.argmax.map(|i| self.cubes[i])
    }
}

/// `⟨|b − ⟨b⟩_Q|⟩_Q` for each cube.
pub fn bmo_report(b: &GridFunction, cubes: &[CellRange]) -> OscillationReport {
    let values = cubes
        .iter()
        .map(|&r| oscillation_sum(b.values(), r) / r.len() as f64)
        .collect();
    OscillationReport::from_values(cubes, values)
}

/// `sup_Q ⟨|b − ⟨b⟩_Q|⟩_Q` over `cubes`.
pub fn bmo_norm(b: &GridFunction, cubes: &[CellRange]) -> f64 {
    bmo_report(b, cubes).norm
}

/// `ν(Q)⁻¹ ∫_Q |b − ⟨b⟩_Q|` for each cube.
pub fn bmo_nu_report(b: &GridFunction, nu: &Weight, cubes: &[CellRange]) -> Result<OscillationReport> {
    if b.domain() != nu.domain() {
        return Err(Error::Shape("function and weight live on different domains".into()));
    }
    let values = cubes
        .iter()
        .map(|&r| {
            let mass: f64 = nu.values()[r.range()].iter().sum();
            oscillation_sum(b.values(), r) / mass
        })
        .collect();
    Ok(OscillationReport::from_values(cubes, values))
}

/// `‖b‖_{BMO_ν}` over `cubes`.
pub fn bmo_nu_norm(b: &GridFunction, nu: &Weight, cubes: &[CellRange]) -> Result<f64> {
    Ok(bmo_nu_report(b, nu, cubes)?.norm)
}

/// `𝓑𝓜𝓞_ω` functional, with the outer integral truncated to the domain.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CalBmoReport {
    pub report: OscillationReport,
    /// `∫_{domain∖B} ω(x)/|x − x_B| dx` for each ball.
    pub tails: Vec<f64>,
    /// Always true: the tail integral only covers the computational domain.
    pub truncated: bool,
}

/// `sup_B ω(B)⁻¹ ∫_{B^c} ω(x)/|x − x_B| dx · ∫_B |b − ⟨b⟩_B|`, where `B^c` is
/// taken inside the domain and each ball is given by its cells.
pub fn cal_bmo_omega_report(b: &GridFunction, w: &Weight, balls: &[CellRange]) -> Result<CalBmoReport> {
    if b.domain() != w.domain() {
        return Err(Error::Shape("function and weight live on different domains".into()));
    }
    let d = *b.domain();
    let h = d.spacing();
    let mut tails = Vec::with_capacity(balls.len());
    let values = balls
        .iter()
        .map(|&r| {
            let xb = r.center(&d);
            let tail: f64 = (0..d.cells())
                .filter(|&i| !r.contains(i))
                .map(|i| w.values()[i] / (d.point(i) - xb).abs())
                .sum::<f64>()
                * h;
            tails.push(tail);
            let wb = w.measure(r);
            tail / wb * oscillation_sum(b.values(), r) * h
        })
        .collect();
    Ok(CalBmoReport {
        report: OscillationReport::from_values(balls, values),
        tails,
        truncated: true,
    })
}

pub fn cal_bmo_omega_norm(b: &GridFunction, w: &Weight, balls: &[CellRange]) -> Result<f64> {
    Ok(cal_bmo_omega_report(b, w, balls)?.report.norm)
}

fn check_cells(f: &GridFunction, cells: &[usize]) -> Result<()> {
    if cells.is_empty() {
        return Err(Error::Empty("median of an empty set".into()));
    }
    if let Some(&i) = cells.iter().find(|&&i| i >= f.len()) {
        return Err(Error::Shape(format!("cell {i} outside the grid")));
    }
    Ok(())
}

/// Lower sample median of `f` on `cells`: the `⌈K/2⌉`-th smallest value.
pub fn median(f: &GridFunction, cells: &[usize]) -> Result<f64> {
    check_cells(f, cells)?;
    let mut v: Vec<f64> = cells.iter().map(|&i| f.values()[i]).collect();
    v.sort_by(f64::total_cmp);
    Ok(v[v.len().div_ceil(2) - 1])
}

/// `max(|{f > m}|, |{f < m}|) ≤ |E|/2`, by counting cells.
pub fn is_median(f: &GridFunction, cells: &[usize], m: f64) -> bool {
    let above = cells.iter().filter(|&&i| f.values()[i] > m).count();
    let below = cells.iter().filter(|&&i| f.values()[i] < m).count();
    2 * above.max(below) <= cells.len()
}

/// `a_τ(f;Q) = inf_c ((f − c)χ_Q)*(τ|Q|)`.
///
/// With `K` cells and the right-continuous rearrangement, the value at `τ|Q|`
/// is the `k`-th largest `|f_i − c|`, `k = ⌊τK⌋ + 1`. That is at most `r` iff
/// `K − k + 1` samples lie within `r` of `c`, so the infimum is half the
/// narrowest spread of `K − ⌊τK⌋` consecutive sorted samples.
pub fn local_mean_oscillation(f: &GridFunction, q: CellRange, tau: f64) -> Result<f64> {
    if !(tau > 0.0 && tau < 1.0) {
        return Err(Error::Domain(format!("τ must lie in (0, 1), got {tau}")));
    }
    let k_cells = q.len();
    let s = tau * k_cells as f64;
    if s < 1.0 - 1e-9 {
        return Err(Error::CellResolution(format!(
            "τ|Q| = {s} cells is below one cell"
        )));
    }
    let mut v: Vec<f64> = f.values()[q.range()].to_vec();
    v.sort_by(f64::total_cmp);
    let window = k_cells - (s + 1e-9).floor() as usize;
    Ok(v.windows(window)
        .map(|w| 0.5 * (w[window - 1] - w[0]))
        .fold(f64::INFINITY, f64::min))
}

/// Two sides of the `BMO_ν` / local-mean-oscillation equivalence.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceReport {
    /// `‖b‖_{BMO_ν}`.
    pub lhs: f64,
    /// `sup_Q (|Q|/ν(Q)) a_τ(b;Q)`.
    pub rhs: f64,
    /// `lhs/rhs`; 0 when both vanish.
    pub ratio: f64,
    pub zero_over_zero: bool,
}

/// Compares `‖b‖_{BMO_ν}` with `sup_Q (|Q|/ν(Q)) a_τ(b;Q)` on the cubes with
/// `τ|Q|` at least one cell.
pub fn bmo_nu_equivalence(b: &GridFunction, nu: &Weight, cubes: &[CellRange], tau: f64) -> Result<EquivalenceReport> {
    let usable: Vec<CellRange> = cubes
        .iter()
        .copied()
        .filter(|r| tau * r.len() as f64 >= 1.0 - 1e-9)
        .collect();
    if usable.is_empty() {
        return Err(Error::CellResolution("no cube holds τ|Q| ≥ one cell".into()));
    }
    let lhs = bmo_nu_norm(b, nu, &usable)?;
    let mut rhs = 0.0f64;
    for &r in &usable {
        let avg_nu = nu.values()[r.range()].iter().sum::<f64>() / r.len() as f64;
        rhs = rhs.max(local_mean_oscillation(b, r, tau)? / avg_nu);
    }
    let zero_over_zero = lhs == 0.0 && rhs == 0.0;
    let ratio = if zero_over_zero { 0.0 } else { lhs / rhs };
    Ok(EquivalenceReport {
        lhs,
        rhs,
        ratio,
        zero_over_zero,
    })
}

/// Sets realizing a sign-coherent oscillation of `b` between `Q` and a
/// distant cube `P`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub q: CellRange,
    pub p: CellRange,
    /// `|E| = τ|Q|/2` cells of `Q`.
    pub e: Vec<usize>,
    /// `|F| = |P|/2` cells of `P`.
    pub f: Vec<usize>,
    /// `m_b(P)`.
    pub median: f64,
    pub a_tau: f64,
    /// Sign of `b(x) − b(y)` on `E × F`; 0 when degenerate.
    pub sign: i8,
    /// `a_τ(b;Q) = 0`; the sets are then arbitrary.
    pub degenerate: bool,
    /// `(∫_F μ)^{-1/p} χ_F`.
    #[serde(skip)]
    pub f_test: GridFunction,
}

/// Builds `P = Q − 10 l_Q/δ`, `E ⊆ Q` and `F ⊆ P` with `|b(x) − b(y)| ≥
/// a_τ(b;Q)` and constant sign on `E × F`, plus the test function
/// `(∫_F μ)^{-1/p} χ_F`.
pub fn oscillation_witness(
    b: &GridFunction,
    q: CellRange,
    tau: f64,
    delta: f64,
    mu: &Weight,
    p: f64,
) -> Result<Witness> {
    if b.domain() != mu.domain() {
        return Err(Error::Shape("function and weight live on different domains".into()));
    }
    if !(delta > 0.0) || !(p > 0.0) {
        return Err(Error::Domain(format!("need δ > 0 and p > 0, got δ = {delta}, p = {p}")));
    }
    let k = q.len();
    let tk = tau * k as f64;
    let e_len = (tk / 2.0).round() as usize;
    if (tk - 2.0 * e_len as f64).abs() > 1e-9 || e_len == 0 {
        return Err(Error::CellResolution(format!(
            "τ|Q| = {tk} cells must be a positive even integer"
        )));
    }
    if k % 2 != 0 {
        return Err(Error::CellResolution(format!("|Q| = {k} cells is odd")));
    }
    let shift = (10.0 * k as f64 / delta).round() as usize;
    if shift > q.start {
        return Err(Error::Placement(format!(
            "P lies {} cells left of the domain",
            shift - q.start
        )));
    }
    let pr = CellRange::new(q.start - shift, q.end - shift);
    let bv = b.values();
    let p_cells: Vec<usize> = pr.range().collect();
    let m = median(b, &p_cells)?;
    let a_tau = local_mean_oscillation(b, q, tau)?;

    // Q̃: the τ|Q| cells of Q farthest from m
    let mut order: Vec<usize> = q.range().collect();
    order.sort_by(|&i, &j| (bv[j] - m).abs().total_cmp(&(bv[i] - m).abs()).then(i.cmp(&j)));
    let top = &order[..2 * e_len];
    let above: Vec<usize> = top.iter().copied().filter(|&i| bv[i] > m).collect();
    let below: Vec<usize> = top.iter().copied().filter(|&i| bv[i] < m).collect();
    let degenerate = a_tau == 0.0;
    let (e, upper) = if above.len() >= below.len() {
        (above, true)
    } else {
        (below, false)
    };
    let (e, sign) = if e.len() >= e_len {
        (e[..e_len].to_vec(), if upper { 1 } else { -1 })
    } else if degenerate {
        (top[..e_len].to_vec(), 0)
    } else {
        return Err(Error::Construction("no sign class fills half of Q̃".into()));
    };
    let sign = if degenerate { 0 } else { sign };

    // F: half of P on the other side of m, most extreme first
    let mut side: Vec<usize> = p_cells
        .iter()
        .copied()
        .filter(|&i| if upper { bv[i] <= m } else { bv[i] >= m })
        .collect();
    side.sort_by(|&i, &j| {
        let o = bv[i].total_cmp(&bv[j]);
        (if upper { o } else { o.reverse() }).then(i.cmp(&j))
    });
    let f_len = k / 2;
    if side.len() < f_len {
        return Err(Error::Construction("median side of P holds fewer than |P|/2 cells".into()));
    }
    let mut f: Vec<usize> = side[..f_len].to_vec();
    f.sort_unstable();
    let mut e = e;
    e.sort_unstable();

    let mass: f64 = f.iter().map(|&i| mu.values()[i]).sum::<f64>() * b.domain().spacing();
    let height = mass.powf(-1.0 / p);
    let mut ft = vec![0.0; b.len()];
    for &i in &f {
        ft[i] = height;
    }
    Ok(Witness {
        q,
        p: pr,
        e,
        f,
        median: m,
        a_tau,
        sign,
        degenerate,
        f_test: GridFunction::new(*b.domain(), ft)?,
    })
}

/// Exhaustive check of the witness postconditions: set sizes, containment,
/// `|b(x) − b(y)| ≥ a_τ` and a single sign on `E × F`.
pub fn verify_witness(b: &GridFunction, w: &Witness, tau: f64) -> Result<()> {
    let fail = |m: String| Err(Error::Construction(m));
    if 2 * w.e.len() != (tau * w.q.len() as f64).round() as usize {
        return fail(format!("|E| = {} is not τ|Q|/2", w.e.len()));
    }
    if 2 * w.f.len() != w.p.len() {
        return fail(format!("|F| = {} is not |P|/2", w.f.len()));
    }
    if !w.e.iter().all(|&i| w.q.contains(i)) || !w.f.iter().all(|&i| w.p.contains(i)) {
        return fail("E ⊄ Q or F ⊄ P".into());
    }
    if w.degenerate {
        return Ok(());
    }
    let bv = b.values();
    for &x in &w.e {
        for &y in &w.f {
            let diff = bv[x] - bv[y];
            if diff.abs() < w.a_tau || diff.signum() as i8 != w.sign {
                return fail(format!("pair ({x}, {y}) gives b(x) − b(y) = {diff}"));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::{clipped_cubes, lattices_for_domain};
    use crate::grid::Domain1D;
    use crate::weights::power_weight;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Brute force `a_τ`: scan every sample and pairwise midpoint as `c`.
    fn a_tau_oracle(v: &[f64], tau: f64) -> f64 {
        let k = (tau * v.len() as f64 + 1e-9).floor() as usize + 1;
        let mut cands: Vec<f64> = v.to_vec();
        for a in v {
            for b in v {
                cands.push(0.5 * (a + b));
            }
        }
        cands
            .iter()
            .map(|&c| {
                let mut d: Vec<f64> = v.iter().map(|x| (x - c).abs()).collect();
                d.sort_by(|a, b| b.total_cmp(a));
                d[k - 1]
            })
            .fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn bmo_examples() {
        let d = Domain1D::new(-8.0, 8.0, 256).unwrap();
        let q = d.cells_in(0.0, 2.0);
        let b = GridFunction::indicator(d, 0.0, 1.0);
        assert!((bmo_norm(&b, &[q]) - 0.5).abs() < 1e-15);
        assert_eq!(bmo_norm(&GridFunction::constant(d, 0.3), &[q, d.cells_in(-8.0, 8.0)]), 0.0);
        let nu = power_weight(0.5, d, 2.0 * d.spacing()).unwrap();
        let v = bmo_nu_norm(&b, &nu, &[q]).unwrap();
        assert!((v - 1.0 / nu.measure(q)).abs() < 1e-12);
        let one = Weight::uniform(d);
        let lats = lattices_for_domain(&d, 8).unwrap();
        let cubes = clipped_cubes(&lats);
        let bx = GridFunction::from_fn(d, |x| x.sin() + (x > 1.0) as u8 as f64);
        let ratio = bmo_nu_norm(&bx, &one, &cubes).unwrap() / bmo_norm(&bx, &cubes);
        assert!((ratio - 1.0).abs() < 1e-12);
        let shifted = bx.map(|v| v + 7.5);
        assert!((bmo_norm(&shifted, &cubes) - bmo_norm(&bx, &cubes)).abs() < 1e-12);
    }

    #[test]
    fn bmo_translation_invariance() {
        let d = Domain1D::new(0.0, 8.0, 128).unwrap();
        let b = GridFunction::from_fn(d, |x| if x < 3.0 { (5.0 * x).sin() } else { 0.0 });
        let mut shifted = GridFunction::zeros(d);
        shifted.values_mut()[10..].copy_from_slice(&b.values()[..118]);
        let cubes: Vec<CellRange> = all_intervals(100, 1);
        let moved: Vec<CellRange> = cubes.iter().map(|r| CellRange::new(r.start + 10, r.end + 10)).collect();
        assert_eq!(bmo_norm(&b, &cubes), bmo_norm(&shifted, &moved));
        assert!(bmo_norm(&b, &all_intervals(128, 1)) >= bmo_norm(&b, &cubes));
    }

    #[test]
    fn cal_bmo_closed_form() {
        let d = Domain1D::new(-8.0, 8.0, 3 * 1024).unwrap();
        let b = GridFunction::indicator(d, 0.0, 1.0);
        let ball = d.cells_in(0.0, 2.0);
        let v = cal_bmo_omega_norm(&b, &Weight::uniform(d), &[ball]).unwrap();
        let exact = 0.5 * (9f64.ln() + 7f64.ln());
        assert!((v - exact).abs() < 1e-4, "{v} vs {exact}");
        assert_eq!(cal_bmo_omega_norm(&GridFunction::constant(d, 2.0), &Weight::uniform(d), &[ball]).unwrap(), 0.0);
        let rep = cal_bmo_omega_report(&b, &Weight::uniform(d), &[ball]).unwrap();
        assert!(rep.truncated);
        // a larger domain with the same spacing only adds tail
        let big = Domain1D::new(-16.0, 16.0, 3 * 2048).unwrap();
        let bb = GridFunction::indicator(big, 0.0, 1.0);
        let vb = cal_bmo_omega_norm(&bb, &Weight::uniform(big), &[big.cells_in(0.0, 2.0)]).unwrap();
        assert!(vb > v);
    }

    #[test]
    fn medians() {
        let d = Domain1D::new(0.0, 4.0, 4).unwrap();
        let f = GridFunction::new(d, vec![0.0, 1.0, 0.0, 1.0]).unwrap();
        let cells = [0, 1, 2, 3];
        assert_eq!(median(&f, &cells).unwrap(), 0.0);
        assert!(is_median(&f, &cells, 0.0) && is_median(&f, &cells, 1.0));
        assert!(!is_median(&f, &cells, 2.0));
        let g = GridFunction::new(Domain1D::new(0.0, 3.0, 3).unwrap(), vec![3.0, 1.0, 2.0]).unwrap();
        assert_eq!(median(&g, &[0, 1, 2]).unwrap(), 2.0);
        assert!(median(&g, &[]).is_err());
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let big = Domain1D::new(0.0, 1.0, 64).unwrap();
        for _ in 0..100 {
            let h = GridFunction::new(big, (0..64).map(|_| rng.gen_range(0..5) as f64 * 0.5).collect()).unwrap();
            let cells: Vec<usize> = (0..rng.gen_range(1..64)).collect();
            let m = median(&h, &cells).unwrap();
            assert!(is_median(&h, &cells, m));
        }
    }

    #[test]
    fn local_mean_oscillation_examples() {
        let d = Domain1D::new(-8.0, 8.0, 256).unwrap();
        let q = d.cells_in(0.0, 2.0);
        let b = GridFunction::indicator(d, 0.0, 1.0);
        assert!((local_mean_oscillation(&b, q, 0.125).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(local_mean_oscillation(&GridFunction::constant(d, 4.0), q, 0.125).unwrap(), 0.0);
        assert!(local_mean_oscillation(&b, CellRange::new(0, 4), 0.125).is_err());
        // a four-point set where midpoint candidates alone miss the infimum
        let small = Domain1D::new(0.0, 4.0, 4).unwrap();
        let v = GridFunction::new(small, vec![0.0, 1.0, 3.0, 10.0]).unwrap();
        let a = local_mean_oscillation(&v, CellRange::new(0, 4), 0.25).unwrap();
        assert_eq!(a, 1.5);
        assert_eq!(a, a_tau_oracle(v.values(), 0.25));
    }

    #[test]
    fn local_mean_oscillation_matches_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let d = Domain1D::new(0.0, 1.0, 40).unwrap();
        for _ in 0..200 {
            let vals = (0..40)
                .map(|_| rng.gen_range(-3.0..3.0f64).round() * 0.5 + rng.gen_range(0.0..0.1))
                .collect();
            let f = GridFunction::new(d, vals).unwrap();
            let len = rng.gen_range(8..=40);
            let r = CellRange::new(0, len);
            let tau = [0.125, 0.2, 0.3, 0.45][rng.gen_range(0..4)];
            let got = local_mean_oscillation(&f, r, tau).unwrap();
            let want = a_tau_oracle(&f.values()[r.range()], tau);
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
            let looser = local_mean_oscillation(&f, r, tau / 2.0).unwrap_or(f64::INFINITY);
            assert!(got <= looser + 1e-15);
        }
    }

    #[test]
    fn equivalence_examples() {
        let d = Domain1D::new(-8.0, 8.0, 3 * 128).unwrap();
        let cubes: Vec<CellRange> = clipped_cubes(&lattices_for_domain(&d, 7).unwrap())
            .into_iter()
            .filter(|r| r.len() >= 8)
            .collect();
        let one = Weight::uniform(d);
        let z = bmo_nu_equivalence(&GridFunction::constant(d, 1.0), &one, &cubes, 0.125).unwrap();
        assert!(z.zero_over_zero && z.ratio == 0.0);
        let b = GridFunction::indicator(d, 0.0, 1.0);
        let r = bmo_nu_equivalence(&b, &one, &cubes, 0.125).unwrap();
        assert!(r.ratio > 1.0 / 16.0 && r.ratio < 16.0, "{r:?}");
        let r2 = bmo_nu_equivalence(&b.scaled(2.0), &one, &cubes, 0.125).unwrap();
        assert!((r2.lhs - 2.0 * r.lhs).abs() < 1e-12 && (r2.rhs - 2.0 * r.rhs).abs() < 1e-12);
        assert!((r2.ratio - r.ratio).abs() < 1e-12);
    }

    #[test]
    fn witness_for_step() {
        let d = Domain1D::new(-8.0, 8.0, 512).unwrap();
        let b = GridFunction::from_fn(d, |x| if x < 0.0 { -1.0 } else { 1.0 + 0.1 * x });
        let mu = power_weight(0.3, d, 2.0 * d.spacing()).unwrap();
        let q = CellRange::new(400, 416);
        let w = oscillation_witness(&b, q, 0.125, 0.5, &mu, 2.0).unwrap();
        assert_eq!(w.p, CellRange::new(80, 96));
        assert_eq!((w.e.len(), w.f.len()), (1, 8));
        verify_witness(&b, &w, 0.125).unwrap();
        assert!(!w.degenerate);
        let mass: f64 = w.f.iter().map(|&i| mu.values()[i]).sum::<f64>() * d.spacing();
        assert!((w.f_test.values()[w.f[0]] - mass.powf(-0.5)).abs() < 1e-14);

        let flat = oscillation_witness(&GridFunction::constant(d, 2.0), q, 0.125, 0.5, &mu, 2.0).unwrap();
        assert!(flat.degenerate && flat.sign == 0);
        verify_witness(&GridFunction::constant(d, 2.0), &flat, 0.125).unwrap();

        assert!(matches!(
            oscillation_witness(&b, CellRange::new(100, 116), 0.125, 0.5, &mu, 2.0),
            Err(Error::Placement(_))
        ));
        assert!(matches!(
            oscillation_witness(&b, CellRange::new(400, 408), 0.125, 0.5, &mu, 2.0),
            Err(Error::CellResolution(_))
        ));
    }
}
