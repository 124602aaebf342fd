//! The eight ratio sweeps.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::atoms::{make_atom, sgn_atom, Ball};
use crate::dyadic::{clipped_cubes, default_lattices};
use crate::error::Result;
use crate::grid::{lp_norm, weak_l1_norm, CellRange, Domain1D, GridFunction};
use crate::kernel::KernelSpec;
use crate::oscillation::{
    bmo_nu_norm, cal_bmo_omega_norm, local_mean_oscillation, oscillation_witness, verify_witness,
};
use crate::sparse::domination_ratio;
use crate::variation::{commutator_variation, kernel_difference_variation, variation_operator, ScaleFamily};
use crate::weights::{bloom_weight, power_weight};

use super::battery::{function_battery, power_weights, symbols, Named, WeightEntry};
use super::config::{Experiment, ExperimentConfig};
use super::table::{params, RatioTable, Row};

fn fmt(x: f64) -> String {
    format!("{x}")
}

fn case(prm: std::collections::BTreeMap<String, String>, f: impl FnOnce() -> Result<(f64, f64)>) -> Row {
    match f() {
        Ok((lhs, rhs)) => Row::new(prm, lhs, rhs),
        Err(e) => Row::failed(prm, &e.to_string()),
    }
}

/// Runs the configured experiment with the configured scale family.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RatioTable> {
    run_with_scales(cfg, &cfg.scales()?)
}

/// Runs the experiment with an explicit scale family.
pub fn run_with_scales(cfg: &ExperimentConfig, scales: &ScaleFamily) -> Result<RatioTable> {
    cfg.validate()?;
    let d = cfg.domain()?;
    let rows = match cfg.experiment {
        Experiment::E1 => strong_bound(cfg, d, scales)?,
        Experiment::E2 => weak_bound(cfg, d, scales)?,
        Experiment::E3 => atom_bound(cfg, d, scales)?,
        Experiment::E4 => sparse_domination(cfg, d, scales),
        Experiment::E5 => bloom_bound(cfg, d, scales)?,
        Experiment::E6 => witness_bound(cfg, d, scales)?,
        Experiment::E7 => hardy_commutator(cfg, d, scales)?,
        Experiment::E8 => kernel_estimate(cfg, scales),
    };
    Ok(RatioTable::new(cfg.experiment.name(), rows))
}

/// `V_ρ(Φ⋆f)` for every function and `ρ`, errors kept as messages.
fn profiles(
    fs: &[Named],
    cfg: &ExperimentConfig,
    scales: &ScaleFamily,
) -> Vec<Vec<std::result::Result<GridFunction, String>>> {
    fs.iter()
        .map(|f| {
            cfg.rho
                .iter()
                .map(|&rho| {
                    variation_operator(&f.f, &cfg.kernel, scales, rho)
                        .map(|v| v.profile)
                        .map_err(|e| e.to_string())
                })
                .collect()
        })
        .collect()
}

fn ap_exponent(p: f64) -> f64 {
    (1.0 / (p - 1.0)).max(1.0)
}

fn strong_bound(cfg: &ExperimentConfig, d: Domain1D, scales: &ScaleFamily) -> Result<Vec<Row>> {
    let fs = function_battery(&cfg.functions, cfg.seed, d);
    let ws = power_weights(&cfg.weights, &cfg.p, d)?;
    let vs = profiles(&fs, cfg, scales);
    let mut rows = Vec::new();
    for (f, vf) in fs.iter().zip(&vs) {
        for (&rho, v) in cfg.rho.iter().zip(vf) {
            for &p in &cfg.p {
                for w in ws.iter().filter(|w| w.exponent.is_some_and(|a| a < p - 1.0)) {
                    let prm = params([
                        ("a", fmt(w.exponent.unwrap_or(f64::NAN))),
                        ("f", f.label.clone()),
                        ("kernel", cfg.kernel.name().into()),
                        ("p", fmt(p)),
                        ("rho", fmt(rho)),
                    ]);
                    rows.push(match v {
                        Err(m) => Row::failed(prm, m),
                        Ok(v) => case(prm, || {
                            let ap = w.constants.ap(p).unwrap_or(f64::NAN);
                            Ok((
                                lp_norm(v, p, Some(&w.weight))?,
                                ap.powf(ap_exponent(p)) * lp_norm(&f.f, p, Some(&w.weight))?,
                            ))
                        }),
                    });
                }
            }
        }
    }
    Ok(rows)
}

fn weak_bound(cfg: &ExperimentConfig, d: Domain1D, scales: &ScaleFamily) -> Result<Vec<Row>> {
    let fs = function_battery(&cfg.functions, cfg.seed, d);
    let exps: Vec<f64> = cfg.weights.iter().copied().filter(|&a| a <= 0.0).collect();
    let ws = power_weights(&exps, &[2.0], d)?;
    let vs = profiles(&fs, cfg, scales);
    let mut rows = Vec::new();
    for (f, vf) in fs.iter().zip(&vs) {
        for (&rho, v) in cfg.rho.iter().zip(vf) {
            for w in &ws {
                let prm = params([
                    ("a", fmt(w.exponent.unwrap_or(f64::NAN))),
                    ("f", f.label.clone()),
                    ("kernel", cfg.kernel.name().into()),
                    ("rho", fmt(rho)),
                ]);
                rows.push(match v {
                    Err(m) => Row::failed(prm, m),
                    Ok(v) => case(prm, || {
                        let c = &w.constants;
                        Ok((
                            weak_l1_norm(v, &w.weight)?,
                            c.a1 * (std::f64::consts::E + c.ainf).ln() * lp_norm(&f.f, 1.0, Some(&w.weight))?,
                        ))
                    }),
                });
            }
        }
    }
    Ok(rows)
}

/// `n` radii geometric between `lo` and `hi`.
fn radii(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n)
        .map(|k| lo * (hi / lo).powf(k as f64 / (n - 1) as f64))
        .collect()
}

/// Balls with geometric radii and seeded centres in `[-1, 1]`.
fn balls(cfg: &ExperimentConfig, stream: u64, per_radius: usize) -> Vec<(usize, Ball)> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(stream);
    let mut out = Vec::new();
    for r in radii(cfg.radius_min, cfg.radius_max, cfg.radii) {
        for _ in 0..per_radius {
            let c = rng.gen_range(-1.0..=1.0);
            out.push((out.len(), Ball { center: c, radius: r }));
        }
    }
    out
}

/// Atom integrability `q` and moment order `s` for `ω = |x|^a ∈ A_{2p}`.
pub fn atom_shape(p: f64, a: f64) -> (f64, usize) {
    let q_w = (1.0 + a).max(1.0);
    let q = if 2.0 * p > q_w { 0.5 * (q_w + 2.0 * p) } else { q_w + 0.5 };
    let s = (q_w / p - 1.0).floor().max(0.0) as usize;
    (q, s)
}

fn atom_bound(cfg: &ExperimentConfig, d: Domain1D, scales: &ScaleFamily) -> Result<Vec<Row>> {
    let bs = balls(cfg, 301, cfg.atoms_per_radius);
    let mut rows = Vec::new();
    for &a in &cfg.weights {
        let w = power_weight(a, d, 2.0 * d.spacing())?;
        for &p in cfg.p.iter().filter(|&&p| a < 2.0 * p - 1.0) {
            let (q, s) = atom_shape(p, a);
            for &rho in &cfg.rho {
                for &(i, ball) in &bs {
                    let prm = params([
                        ("a", fmt(a)),
                        ("atom", format!("{i:03}")),
                        ("center", fmt(ball.center)),
                        ("p", fmt(p)),
                        ("q", fmt(q)),
                        ("radius", fmt(ball.radius)),
                        ("rho", fmt(rho)),
                        ("s", s.to_string()),
                    ]);
                    let seed = cfg.seed.wrapping_mul(1_000_003).wrapping_add(i as u64);
                    rows.push(case(prm, || {
                        let atom = make_atom(p, q, s, &w, ball, seed)?;
                        let v = variation_operator(&atom.values, &cfg.kernel, scales, rho)?;
                        Ok((lp_norm(&v.profile, p, Some(&w))?, 1.0))
                    }));
                }
            }
        }
    }
    Ok(rows)
}

fn sparse_domination(cfg: &ExperimentConfig, d: Domain1D, scales: &ScaleFamily) -> Vec<Row> {
    let fs = function_battery(&cfg.functions, cfg.seed, d);
    let lats = default_lattices(&d);
    let vs = profiles(&fs, cfg, scales);
    let mut rows = Vec::new();
    for (f, vf) in fs.iter().zip(&vs) {
        for (&rho, v) in cfg.rho.iter().zip(vf) {
            let prm = params([
                ("f", f.label.clone()),
                ("kernel", cfg.kernel.name().into()),
                ("rho", fmt(rho)),
            ]);
            let row = match v {
                Err(m) => Row::failed(prm, m),
                Ok(v) => match domination_ratio(v, &f.f, &lats, cfg.c0) {
                    Err(e) => Row::failed(prm, &e.to_string()),
                    Ok(rep) => {
                        let mut prm = prm;
                        let c0: Vec<String> = rep.c0.iter().map(|c| fmt(*c)).collect();
                        prm.insert("c0".into(), c0.join(" "));
                        let sizes: Vec<String> = rep.family_sizes.iter().map(|c| c.to_string()).collect();
                        prm.insert("cubes".into(), sizes.join(" "));
                        let row = Row::new(prm, rep.max_ratio, 1.0);
                        if rep.zero_denominator > 0 {
                            let mut r = row;
                            r.flag = format!("fail: {} points with zero denominator", rep.zero_denominator);
                            r
                        } else {
                            row
                        }
                    }
                },
            };
            rows.push(row);
        }
    }
    rows
}

/// Ordered `(μ, λ)` pairs of power weights that are both in `A_p`.
fn bloom_pairs<'a>(ws: &'a [WeightEntry], p: f64) -> Vec<(&'a WeightEntry, &'a WeightEntry)> {
    let ok: Vec<&WeightEntry> = ws.iter().filter(|w| w.exponent.is_some_and(|a| a < p - 1.0)).collect();
    ok.iter().flat_map(|&m| ok.iter().map(move |&l| (m, l))).collect()
}

fn bloom_bound(cfg: &ExperimentConfig, d: Domain1D, scales: &ScaleFamily) -> Result<Vec<Row>> {
    let fs = function_battery(&cfg.functions, cfg.seed, d);
    let bs = symbols(cfg.symbols, cfg.seed, d);
    let ws = power_weights(&cfg.weights, &cfg.p, d)?;
    let cubes = clipped_cubes(&default_lattices(&d));
    let mut rows = Vec::new();
    for b in &bs {
        for &p in &cfg.p {
            for (mu, la) in bloom_pairs(&ws, p) {
                let nu = bloom_weight(&mu.weight, &la.weight, p)
                    .and_then(|nu| bmo_nu_norm(&b.f, &nu, &cubes))
                    .map_err(|e| e.to_string());
                let c = (mu.constants.ap(p).unwrap_or(f64::NAN) * la.constants.ap(p).unwrap_or(f64::NAN))
                    .powf(ap_exponent(p));
                for f in &fs {
                    for &rho in &cfg.rho {
                        let prm = params([
                            ("b", b.label.clone()),
                            ("f", f.label.clone()),
                            ("lambda", fmt(la.exponent.unwrap_or(f64::NAN))),
                            ("mu", fmt(mu.exponent.unwrap_or(f64::NAN))),
                            ("p", fmt(p)),
                            ("rho", fmt(rho)),
                        ]);
                        rows.push(match &nu {
                            Err(m) => Row::failed(prm, m),
                            Ok(bmo) => case(prm, || {
                                let v = commutator_variation(&f.f, &b.f, &cfg.kernel, scales, rho)?;
                                Ok((
                                    lp_norm(&v.profile, p, Some(&la.weight))?,
                                    c * bmo * lp_norm(&f.f, p, Some(&mu.weight))?,
                                ))
                            }),
                        });
                    }
                }
            }
        }
    }
    Ok(rows)
}

/// The `count` intervals of `len` cells with the largest `a_τ`, among those
/// starting at least `min_start` cells in, on a half-length stride.
fn witness_intervals(b: &GridFunction, len: usize, min_start: usize, tau: f64, count: usize) -> Result<Vec<(CellRange, f64)>> {
    let n = b.len();
    let mut cands = Vec::new();
    let mut s = min_start;
    while s + len <= n {
        let r = CellRange::new(s, s + len);
        cands.push((r, local_mean_oscillation(b, r, tau)?));
        s += (len / 2).max(1);
    }
    cands.sort_by(|x, y| y.1.total_cmp(&x.1).then(x.0.start.cmp(&y.0.start)));
    cands.truncate(count);
    Ok(cands)
}

fn witness_bound(cfg: &ExperimentConfig, d: Domain1D, scales: &ScaleFamily) -> Result<Vec<Row>> {
    let bs = symbols(cfg.symbols, cfg.seed, d);
    let ws = power_weights(&cfg.weights, &cfg.p, d)?;
    let cubes = clipped_cubes(&default_lattices(&d));
    let k = cfg.witness_cells;
    let shift = (10.0 * k as f64 / cfg.delta).round() as usize;
    let t_star = 10.0 * k as f64 * d.spacing() / cfg.delta;
    let plateau = KernelSpec::Plateau {
        center: 1.0,
        half_width: cfg.delta,
    };
    let wscales = scales.with_scale(t_star)?;
    let rho = cfg.rho[0];
    let mut rows = Vec::new();
    for b in &bs {
        let qs = witness_intervals(&b.f, k, shift, cfg.tau, cfg.witness_cubes)?;
        for &p in &cfg.p {
            let pp = p / (p - 1.0);
            for (mu, la) in bloom_pairs(&ws, p) {
                let nu = bloom_weight(&mu.weight, &la.weight, p)
                    .and_then(|nu| bmo_nu_norm(&b.f, &nu, &cubes))
                    .map_err(|e| e.to_string());
                let la_dual = la.weight.pow(-pp / p)?;
                for &(q, a_tau) in &qs {
                    let base = [
                        ("b", b.label.clone()),
                        ("cube", format!("{}..{}", q.start, q.end)),
                        ("lambda", fmt(la.exponent.unwrap_or(f64::NAN))),
                        ("mu", fmt(mu.exponent.unwrap_or(f64::NAN))),
                        ("p", fmt(p)),
                    ];
                    let mut prm = params(base.clone());
                    prm.insert("check".into(), "bound".into());
                    rows.push(match &nu {
                        Err(m) => Row::failed(prm, m),
                        Ok(bmo) => {
                            let len = q.len() as f64;
                            let m_mu = mu.weight.values()[q.range()].iter().sum::<f64>() / len;
                            let m_la = la_dual.values()[q.range()].iter().sum::<f64>() / len;
                            Row::new(prm, a_tau, m_mu.powf(1.0 / p) * m_la.powf(1.0 / pp) * bmo)
                        }
                    });
                    let mut prm = params(base);
                    prm.insert("check".into(), "witness".into());
                    rows.push(case(prm, || {
                        let w = oscillation_witness(&b.f, q, cfg.tau, cfg.delta, &mu.weight, p)?;
                        verify_witness(&b.f, &w, cfg.tau)?;
                        if w.degenerate {
                            return Ok((0.0, 0.0));
                        }
                        let v = commutator_variation(&w.f_test, &b.f, &plateau, &wscales, rho)?;
                        let h = d.spacing();
                        let lhs: f64 = w.e.iter().map(|&i| v.profile.values()[i]).sum::<f64>() * h;
                        let f_mass: f64 = w.f.iter().map(|&i| mu.weight.values()[i]).sum::<f64>() * h;
                        Ok((lhs, cfg.tau * q.measure(&d) * w.a_tau * f_mass.powf(-1.0 / p)))
                    }));
                }
            }
        }
    }
    Ok(rows)
}

fn hardy_commutator(cfg: &ExperimentConfig, d: Domain1D, scales: &ScaleFamily) -> Result<Vec<Row>> {
    let bs = symbols(cfg.symbols, cfg.seed, d);
    let exps: Vec<f64> = cfg.weights.iter().copied().filter(|&a| a <= 0.0).collect();
    let ws = power_weights(&exps, &[2.0], d)?;
    let cubes = clipped_cubes(&default_lattices(&d));
    let balls = balls(cfg, 701, cfg.atoms_per_radius.max(1));
    let mut rows = Vec::new();
    for b in &bs {
        for w in &ws {
            let cal = cal_bmo_omega_norm(&b.f, &w.weight, &cubes).map_err(|e| e.to_string());
            for &rho in &cfg.rho {
                for &(i, ball) in &balls {
                    for atom in ["sgn", "random"] {
                        let prm = params([
                            ("a", fmt(w.exponent.unwrap_or(f64::NAN))),
                            ("atom", format!("{atom}-{i:03}")),
                            ("b", b.label.clone()),
                            ("center", fmt(ball.center)),
                            ("radius", fmt(ball.radius)),
                            ("rho", fmt(rho)),
                        ]);
                        rows.push(match &cal {
                            Err(m) => Row::failed(prm, m),
                            Ok(cal) => case(prm, || {
                                let a = if atom == "sgn" {
                                    sgn_atom(&b.f, ball, &w.weight)?.values
                                } else {
                                    let seed = cfg.seed.wrapping_mul(1_000_033).wrapping_add(i as u64);
                                    make_atom(1.0, 2.0, 0, &w.weight, ball, seed)?.values
                                };
                                let v = commutator_variation(&a, &b.f, &cfg.kernel, scales, rho)?;
                                Ok((lp_norm(&v.profile, 1.0, Some(&w.weight))?, *cal))
                            }),
                        });
                    }
                }
            }
        }
    }
    Ok(rows)
}

/// Seeded `(ξ, z, y)` with `|ξ − y| ∈ [1/2, 4]` log-uniform and
/// `|z − ξ| = u|ξ − y|`, `u ∈ [1/100, 1/4]`.
pub fn kernel_triples(count: usize, seed: u64) -> Vec<(f64, f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(801);
    (0..count)
        .map(|_| {
            let xi = rng.gen_range(-4.0..4.0);
            let dist = (rng.gen_range(0.5f64.ln()..4f64.ln())).exp();
            let u = rng.gen_range(0.01..0.25);
            let sy = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            let sz = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            (xi, xi + sz * u * dist, xi + sy * dist)
        })
        .collect()
}

fn kernel_estimate(cfg: &ExperimentConfig, scales: &ScaleFamily) -> Vec<Row> {
    let mut rows = Vec::new();
    for (i, (xi, z, y)) in kernel_triples(cfg.triples, cfg.seed).into_iter().enumerate() {
        for &rho in &cfg.rho {
            let prm = params([
                ("kernel", cfg.kernel.name().into()),
                ("rho", fmt(rho)),
                ("triple", format!("{i:03}")),
                ("xi", fmt(xi)),
                ("y", fmt(y)),
                ("z", fmt(z)),
            ]);
            rows.push(case(prm, || {
                Ok((
                    kernel_difference_variation(&cfg.kernel, xi, z, y, scales, rho)?,
                    (z - xi).abs() / (xi - y).powi(2),
                ))
            }));
        }
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(e: Experiment) -> ExperimentConfig {
        let mut c = ExperimentConfig::defaults(e);
        c.cells = 384;
        c.scale_count = 30;
        c
    }

    #[test]
    fn zero_battery_gives_zero_ratios() {
        let mut c = small(Experiment::E1);
        c.functions = vec![super::super::battery::BatterySpec::parse("zero:2").unwrap()];
        let t = run_experiment(&c).unwrap();
        assert!(!t.rows.is_empty());
        assert!(t.rows.iter().all(|r| r.lhs == 0.0 && r.ratio == 0.0));
    }

    #[test]
    fn constant_symbol_annihilates_bloom_lhs() {
        let c = small(Experiment::E5);
        let d = c.domain().unwrap();
        let f = GridFunction::indicator(d, -1.0, 1.0);
        let b = GridFunction::constant(d, 2.5);
        let v = commutator_variation(&f, &b, &c.kernel, &c.scales().unwrap(), 3.0).unwrap();
        assert!(v.values().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn atom_shapes() {
        assert_eq!(atom_shape(1.0, 0.0), (1.5, 0));
        assert_eq!(atom_shape(0.7, 0.3), (1.35, 0));
        assert_eq!(atom_shape(0.6, 0.0).1, 0);
        assert_eq!(atom_shape(0.55, 0.1).1, 1);
    }

    #[test]
    fn triples_keep_separation() {
        for (xi, z, y) in kernel_triples(200, 3) {
            assert!((xi - y).abs() >= 4.0 * (z - xi).abs());
        }
    }

    #[test]
    fn every_case_gets_a_row() {
        let mut c = small(Experiment::E8);
        c.triples = 7;
        c.rho = vec![2.5, 3.0];
        assert_eq!(run_experiment(&c).unwrap().rows.len(), 14);
        let mut c = small(Experiment::E1);
        c.functions = vec![super::super::battery::BatterySpec::parse("indicators:2").unwrap()];
        // p = 1.2 admits a ∈ {-0.3, 0}; p = 2, 4 admit all four
        assert_eq!(run_experiment(&c).unwrap().rows.len(), 2 * 10);
    }
}
