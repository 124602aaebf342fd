//! Hardy–Littlewood maximal functions over the shifted lattices.

use crate::dyadic::{default_lattices, DyadicLattice};
use crate::grid::GridFunction;

/// Prefix sums `P[k] = Σ_{i<k} v_i`.
pub(crate) fn prefix_sums(values: impl IntoIterator<Item = f64>) -> Vec<f64> {
    let mut out = vec![0.0];
    let mut acc = 0.0;
    for v in values {
        acc += v;
        out.push(acc);
    }
    out
}

/// `Mf(x) = max_{Q ∋ x} ⟨|f|⟩_{Q ∩ domain}` over the cubes of `lattices`.
pub fn hl_maximal_with(f: &GridFunction, lattices: &[DyadicLattice]) -> GridFunction {
    let n = f.len();
    let abs: Vec<f64> = f.values().iter().map(|v| v.abs()).collect();
    let mut out = vec![0.0f64; n];
    for lat in lattices {
        debug_assert_eq!(lat.domain_cells, n);
        for q in lat.cubes() {
            let Some(r) = q.clipped(n) else { continue };
            let avg = abs[r.range()].iter().sum::<f64>() / r.len() as f64;
            for o in &mut out[r.range()] {
                if avg > *o {
                    *o = avg;
                }
            }
        }
    }
    GridFunction::new(*f.domain(), out).expect("averages of finite samples are finite")
}

/// [`hl_maximal_with`] on the deepest aligned lattices of `f`'s domain.
pub fn hl_maximal(f: &GridFunction) -> GridFunction {
    hl_maximal_with(f, &default_lattices(f.domain()))
}

/// Maximal function over every grid-aligned interval containing the point.
/// O(N²); intended as an oracle for small grids.
pub fn hl_maximal_exhaustive(f: &GridFunction) -> GridFunction {
    let n = f.len();
    let pre = prefix_sums(f.values().iter().map(|v| v.abs()));
    let mut out = vec![0.0f64; n];
    for a in 0..n {
        // suffix maxima over right endpoints b > i of the average on [a, b)
        let mut best = 0.0f64;
        for i in (a..n).rev() {
            let b = i + 1;
            let avg = (pre[b] - pre[a]) / (b - a) as f64;
            best = best.max(avg);
            out[i] = out[i].max(best);
        }
    }
    GridFunction::new(*f.domain(), out).expect("finite")
}

/// `M_{1/2} f = (M |f|^{1/2})²`.
pub fn m_half_with(f: &GridFunction, lattices: &[DyadicLattice]) -> GridFunction {
    hl_maximal_with(&f.map(|v| v.abs().sqrt()), lattices).map(|v| v * v)
}

pub fn m_half(f: &GridFunction) -> GridFunction {
    m_half_with(f, &default_lattices(f.domain()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::lattices_for_domain;
    use crate::grid::Domain1D;

    #[test]
    fn constant_is_fixed() {
        let d = Domain1D::new(-8.0, 8.0, 3 * 128).unwrap();
        for c in [0.0, 1.0, 0.25, 3.0] {
            let m = hl_maximal(&GridFunction::constant(d, c));
            assert!(m.values().iter().all(|v| (v - c).abs() <= 1e-14 * c.max(1.0)));
            let h = m_half(&GridFunction::constant(d, c));
            assert!(h.values().iter().all(|v| (v - c).abs() <= 1e-13 * c.max(1.0)));
        }
    }

    #[test]
    fn indicator_of_lattice_cube() {
        let d = Domain1D::new(-8.0, 8.0, 3 * 128).unwrap();
        let lats = lattices_for_domain(&d, 7).unwrap();
        let q = lats[2].cube(3, 1);
        let r = q.clipped(d.cells()).unwrap();
        let mut f = GridFunction::zeros(d);
        f.values_mut()[r.range()].iter_mut().for_each(|v| *v = 1.0);
        let m = hl_maximal_with(&f, &lats);
        assert!(r.range().all(|i| m.values()[i] == 1.0));
        let mh = m_half_with(&f, &lats);
        assert!(r.range().all(|i| mh.values()[i] == 1.0));
    }

    #[test]
    fn far_point_matches_cube_enumeration() {
        let d = Domain1D::new(-8.0, 8.0, 3 * 128).unwrap();
        let lats = lattices_for_domain(&d, 7).unwrap();
        let f = GridFunction::indicator(d, 0.0, 1.0);
        let m = hl_maximal_with(&f, &lats);
        let i = d.cell_of(2.0).unwrap();
        // brute force: every cube of every lattice containing cell i
        let mut best = 0.0f64;
        for lat in &lats {
            for q in lat.cubes() {
                if q.contains_cell(i) {
                    let r = q.clipped(d.cells()).unwrap();
                    let s: f64 = f.values()[r.range()].iter().sum();
                    best = best.max(s / r.len() as f64);
                }
            }
        }
        assert_eq!(m.values()[i], best);
        assert!(best > 0.0 && best <= 1.0 / 3.0 + 1e-12, "{best}");
        // the full interval maximal function at x = 2 is (1 + dist)/... ≥ 1/2 of this
        let ex = hl_maximal_exhaustive(&f);
        assert!(ex.values()[i] >= best);
    }

    #[test]
    fn dominates_cube_averages() {
        let d = Domain1D::new(-3.0, 5.0, 96).unwrap();
        let lats = lattices_for_domain(&d, 5).unwrap();
        let f = GridFunction::from_fn(d, |x| (3.0 * x).sin() * (1.0 + x.abs()));
        let m = hl_maximal_with(&f, &lats);
        for lat in &lats {
            for q in lat.cubes() {
                let r = q.clipped(d.cells()).unwrap();
                let avg = f.values()[r.range()].iter().sum::<f64>() / r.len() as f64;
                assert!(r.range().all(|i| m.values()[i] >= avg.abs() - 1e-12));
            }
        }
    }

    #[test]
    fn exhaustive_is_within_factor_of_lattice_version() {
        let d = Domain1D::new(0.0, 1.0, 64).unwrap();
        let lats = lattices_for_domain(&d, 6).unwrap();
        let f = GridFunction::from_fn(d, |x| if (0.3..0.34).contains(&x) { 5.0 } else { 0.1 * x });
        let full = hl_maximal_exhaustive(&f);
        let lat = hl_maximal_with(&f, &lats);
        for i in 0..64 {
            assert!(lat.values()[i] <= full.values()[i] + 1e-12);
            assert!(full.values()[i] <= 6.0 * lat.values()[i] + 1e-12);
        }
    }
}
