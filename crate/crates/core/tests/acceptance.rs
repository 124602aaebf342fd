//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Runs with its own `main` so the lines are printed under `cargo test`.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use varharm::dyadic::{clipped_cubes, default_lattices};
use varharm::harness::battery::{function_battery, symbols, BatterySpec};
use varharm::harness::{self, Experiment, ExperimentConfig, RatioTable};
use varharm::kernel::convolve_family;
use varharm::oscillation::{bmo_nu_equivalence, local_mean_oscillation, oscillation_witness, verify_witness};
use varharm::sparse::{build_sparse_family, sparse_commutator};
use varharm::{
    commutator_variation, power_weight, seq_variation_bruteforce, seq_variation_dp, variation_operator, CellRange,
    Domain1D, GridFunction, KernelSpec, ScaleFamily, Weight,
};

type Outcome = Result<String, String>;

fn fifty(d: Domain1D, seed: u64) -> Vec<GridFunction> {
    let specs = ["indicators:10", "random-bumps:20", "oscillatory:20"].map(|s| BatterySpec::parse(s).unwrap());
    function_battery(&specs, seed, d).into_iter().map(|n| n.f).collect()
}

fn desk() -> (Domain1D, ScaleFamily) {
    let cfg = ExperimentConfig::defaults(Experiment::E1);
    (cfg.domain().unwrap(), cfg.scales().unwrap())
}

fn c1_variation_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = 0.0f64;
    for _ in 0..500 {
        let m = rng.gen_range(1..=14);
        let a: Vec<f64> = (0..m).map(|_| rng.gen_range(-10.0..10.0)).collect();
        let rho = [1.5, 2.5, 3.0, 4.0][rng.gen_range(0..4)];
        let x = seq_variation_dp(&a, rho).map_err(|e| e.to_string())?;
        let y = seq_variation_bruteforce(&a, rho).map_err(|e| e.to_string())?;
        let rel = if y == 0.0 { x.abs() } else { (x - y).abs() / y.abs() };
        worst = worst.max(rel);
    }
    if worst <= 1e-12 {
        Ok(format!("worst relative gap {worst:.2e}"))
    } else {
        Err(format!("relative gap {worst:.2e} exceeds 1e-12"))
    }
}

fn c2_pointwise_bound() -> Outcome {
    let (d, s) = desk();
    let fs = fifty(d, 1);
    let mut worst = f64::NEG_INFINITY;
    for k in KernelSpec::UNIT_MASS {
        for f in &fs {
            let fam = convolve_family(f, &k, &s).map_err(|e| e.to_string())?;
            let v = variation_operator(f, &k, &s, 3.0).map_err(|e| e.to_string())?;
            for i in 0..d.cells() {
                let abs: Vec<f64> = fam.iter().map(|g| g.values()[i].abs()).collect();
                let top = abs.iter().copied().fold(0.0, f64::max);
                for &a0 in &abs {
                    worst = worst.max(top - a0 - v.values()[i]);
                }
            }
        }
    }
    if worst <= 1e-9 {
        Ok(format!("150 profiles, max excess {worst:.2e}"))
    } else {
        Err(format!("max_t|a_t| exceeds |a_t0| + V by {worst:.3e}"))
    }
}

fn c3_kernel_estimate() -> Outcome {
    let mut cfg = ExperimentConfig::defaults(Experiment::E8);
    cfg.kernel = KernelSpec::GaussianHeat;
    cfg.triples = 200;
    let out = harness::run(&cfg, 1).map_err(|e| e.to_string())?;
    let fine = out.refined.as_ref().unwrap();
    if out.table.n_failures() + fine.n_failures() > 0 {
        return Err("failure rows".into());
    }
    let (r0, r1) = (out.table.max_ratio(), fine.max_ratio());
    let f = out.summary.refinement_factor.unwrap();
    let msg = format!("max ratio {r0:.4} (48 scales) vs {r1:.4} (96 scales), factor {f:.4}");
    if r0.is_finite() && r1.is_finite() && f <= 1.5 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn c4_sparse_domination() -> Outcome {
    let cfg = ExperimentConfig::defaults(Experiment::E4);
    let out = harness::run(&cfg, 1).map_err(|e| e.to_string())?;
    let fine = out.refined.as_ref().unwrap();
    let zero_den = out.table.n_failures() + fine.n_failures();
    let f = out.summary.refinement_factor.unwrap();
    let msg = format!(
        "{} functions, max ratio {:.4} (N = {}) vs {:.4} (N = {}), factor {f:.4}, {zero_den} failures",
        out.table.rows.len(),
        out.table.max_ratio(),
        cfg.cells,
        fine.max_ratio(),
        2 * cfg.cells
    );
    if zero_den == 0 && f <= 2.0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn max_by(t: &RatioTable, keep: impl Fn(&BTreeMap<String, String>) -> bool) -> f64 {
    t.rows
        .iter()
        .filter(|r| keep(&r.params) && r.ratio.is_finite())
        .map(|r| r.ratio)
        .fold(0.0, f64::max)
}

fn c5_strong_bound() -> Outcome {
    let cfg = ExperimentConfig::defaults(Experiment::E1);
    let out = harness::run(&cfg, 1).map_err(|e| e.to_string())?;
    let mut parts = Vec::new();
    let mut ok = out.n_failures() == 0;
    for p in &cfg.p {
        let p = format!("{p}");
        let all = max_by(&out.table, |m| m["p"] == p);
        let flat = max_by(&out.table, |m| m["p"] == p && m["a"] == "0");
        ok &= all <= 10.0 * flat;
        parts.push(format!("p = {p}: {:.3}×", all / flat));
    }
    let f = out.summary.refinement_factor.unwrap();
    ok &= f <= 2.0;
    let msg = format!("max over weights vs ω ≡ 1: {}; refinement factor {f:.4}", parts.join(", "));
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

fn c6_atom_bound() -> Outcome {
    let mut cfg = ExperimentConfig::defaults(Experiment::E3);
    cfg.p = vec![0.7, 1.0];
    cfg.weights = vec![0.0, 0.3];
    cfg.radius_min = 1.0 / 16.0;
    cfg.radius_max = 4.0;
    cfg.radii = 25;
    cfg.atoms_per_radius = 2;
    let t = harness::run_experiment(&cfg).map_err(|e| e.to_string())?;
    if t.n_failures() > 0 {
        return Err(format!("{} failure rows", t.n_failures()));
    }
    let mut ok = true;
    let mut parts = Vec::new();
    for p in ["0.7", "1"] {
        for a in ["0", "0.3"] {
            let rows: Vec<_> = t.rows.iter().filter(|r| r.params["p"] == p && r.params["a"] == a).collect();
            let lr: Vec<f64> = rows.iter().map(|r| r.params["radius"].parse::<f64>().unwrap().ln()).collect();
            let ln: Vec<f64> = rows.iter().map(|r| r.lhs.ln()).collect();
            let hi = rows.iter().map(|r| r.lhs).fold(0.0, f64::max);
            let lo = rows.iter().map(|r| r.lhs).fold(f64::INFINITY, f64::min);
            let sl = slope(&lr, &ln);
            ok &= rows.len() == 50 && hi / lo <= 20.0 && sl.abs() <= 0.25;
            parts.push(format!("p={p} a={a}: spread {:.2}, slope {sl:+.3}", hi / lo));
        }
    }
    let msg = parts.join("; ");
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn band(cells: usize) -> Result<(f64, f64), String> {
    let d = Domain1D::new(-8.0, 8.0, cells).unwrap();
    let cubes = clipped_cubes(&default_lattices(&d));
    let nus = [Weight::uniform(d), power_weight(0.3, d, 2.0 * d.spacing()).unwrap()];
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for b in symbols(20, 9, d) {
        for nu in &nus {
            let r = bmo_nu_equivalence(&b.f, nu, &cubes, 0.125).map_err(|e| e.to_string())?;
            if r.zero_over_zero {
                continue;
            }
            lo = lo.min(r.ratio);
            hi = hi.max(r.ratio);
        }
    }
    Ok((lo, hi))
}

fn c7_equivalence() -> Outcome {
    let (lo0, hi0) = band(3072)?;
    let (lo1, hi1) = band(6144)?;
    let stable = |a: f64, b: f64| (a / b).max(b / a) <= 2.0;
    let msg = format!("band [{lo0:.4}, {hi0:.4}] at N = 3072, [{lo1:.4}, {hi1:.4}] at N = 6144");
    let inside = |lo: f64, hi: f64| lo >= 1.0 / 32.0 && hi <= 32.0;
    if inside(lo0, hi0) && inside(lo1, hi1) && stable(lo0, lo1) && stable(hi0, hi1) {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn c8_annihilation() -> Outcome {
    let (d, s) = desk();
    let fs = fifty(d, 3);
    let lats = default_lattices(&d);
    let mut worst = 0.0f64;
    for (i, f) in fs.iter().enumerate().step_by(5) {
        let b = GridFunction::constant(d, 1.0 + i as f64 * 0.37);
        let cv = commutator_variation(f, &b, &KernelSpec::GaussianHeat, &s, 3.0).map_err(|e| e.to_string())?;
        if cv.values().iter().any(|&x| x != 0.0) {
            return Err(format!("commutator_variation nonzero for constant b ({i})"));
        }
        for lat in &lats {
            let sp = build_sparse_family(f, lat, 2.0).map_err(|e| e.to_string())?;
            let c = sparse_commutator(&sp, &b, f).map_err(|e| e.to_string())?;
            if c.values().iter().any(|&x| x != 0.0) {
                return Err(format!("sparse_commutator nonzero for constant b ({i})"));
            }
        }
        let v = variation_operator(f, &KernelSpec::GaussianHeat, &s, 3.0).map_err(|e| e.to_string())?;
        for c in [-3.0, 0.5, 7.25] {
            let w = variation_operator(&f.scaled(c), &KernelSpec::GaussianHeat, &s, 3.0).map_err(|e| e.to_string())?;
            for (x, y) in v.values().iter().zip(w.values()) {
                let want = c.abs() * x;
                if want != 0.0 {
                    worst = worst.max((y - want).abs() / want);
                } else if *y != 0.0 {
                    return Err("V(cf) nonzero where V(f) vanishes".into());
                }
            }
        }
    }
    if worst <= 1e-10 {
        Ok(format!("exact zeros; homogeneity gap {worst:.2e}"))
    } else {
        Err(format!("homogeneity gap {worst:.2e}"))
    }
}

/// `inf_c` of the `(⌊τK⌋+1)`-th largest `|b − c|` on `Q`, scanning samples and midpoints.
fn a_tau_oracle(v: &[f64], tau: f64) -> f64 {
    let k = (tau * v.len() as f64 + 1e-9).floor() as usize + 1;
    let mut cands = v.to_vec();
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

fn c9_witness() -> Outcome {
    let d = Domain1D::new(-8.0, 8.0, 512).unwrap();
    let (tau, delta, len) = (0.125, 0.5, 16usize);
    let shift = (10.0 * len as f64 / delta).round() as usize;
    let mu = Weight::uniform(d);
    let mut pairs = Vec::new();
    for b in symbols(40, 17, d) {
        let mut s = shift;
        let mut taken = 0;
        while s + len <= d.cells() && taken < 2 && pairs.len() < 20 {
            let q = CellRange::new(s, s + len);
            if local_mean_oscillation(&b.f, q, tau).map_err(|e| e.to_string())? > 0.0 {
                pairs.push((b.f.clone(), q));
                taken += 1;
            }
            s += 24;
        }
    }
    if pairs.len() < 20 {
        return Err(format!("only {} non-degenerate (b, Q) pairs", pairs.len()));
    }
    for (b, q) in &pairs {
        let w = oscillation_witness(b, *q, tau, delta, &mu, 2.0).map_err(|e| e.to_string())?;
        verify_witness(b, &w, tau).map_err(|e| e.to_string())?;
        let bv = b.values();
        let a = a_tau_oracle(&bv[q.range()], tau);
        if (w.a_tau - a).abs() > 1e-12 * a.max(1.0) || w.degenerate {
            return Err(format!("a_τ = {} but oracle gives {a}", w.a_tau));
        }
        if 2 * w.e.len() != (tau * q.len() as f64) as usize || 2 * w.f.len() != w.p.len() {
            return Err("set sizes".into());
        }
        let sign = (bv[w.e[0]] - bv[w.f[0]]).signum();
        for &x in &w.e {
            for &y in &w.f {
                let diff = bv[x] - bv[y];
                if diff.abs() < a || diff.signum() != sign || !q.contains(x) || !w.p.contains(y) {
                    return Err(format!("pair ({x}, {y}) violates the witness"));
                }
            }
        }
    }
    Ok(format!("{} pairs at N = 512 checked exhaustively", pairs.len()))
}

fn c10_determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cfg = dir.path().join("e1.cfg");
    std::fs::write(
        &cfg,
        "experiment = E1\ncells = 768\nscale_count = 36\nfunctions = indicators:4, random-bumps:4, oscillatory:4\n",
    )
    .map_err(|e| e.to_string())?;
    let run = |out: &Path| -> Result<(), String> {
        let st = Command::new(env!("CARGO_BIN_EXE_varharm"))
            .args(["run", "--experiment", "E1", "--seed", "77", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(out)
            .output()
            .map_err(|e| e.to_string())?;
        if st.status.success() {
            Ok(())
        } else {
            Err(String::from_utf8_lossy(&st.stderr).into_owned())
        }
    };
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    run(&a)?;
    run(&b)?;
    for f in ["E1.csv", "E1_summary.json"] {
        let x = std::fs::read(a.join(f)).map_err(|e| e.to_string())?;
        let y = std::fs::read(b.join(f)).map_err(|e| e.to_string())?;
        if x != y {
            return Err(format!("{f} differs between runs"));
        }
    }
    Ok("two runs byte-identical".into())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome, u64); 10] = [
        ("variation oracle equivalence", c1_variation_oracle, 10),
        ("pointwise bound by the variation", c2_pointwise_bound, 120),
        ("kernel difference estimate", c3_kernel_estimate, 60),
        ("sparse domination", c4_sparse_domination, 300),
        ("weighted strong bound", c5_strong_bound, 300),
        ("uniform atom bound", c6_atom_bound, 300),
        ("BMO_ν equivalence", c7_equivalence, 120),
        ("commutator annihilation and homogeneity", c8_annihilation, 60),
        ("oscillation witness", c9_witness, 120),
        ("determinism", c10_determinism, 600),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, check, budget)) in criteria.into_iter().enumerate() {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let r = check();
        let took = start.elapsed();
        let r = match r {
            Ok(m) if took > Duration::from_secs(budget) => Err(format!("{m}; took {took:.1?}, budget {budget} s")),
            other => other,
        };
        match r {
            Ok(m) => println!("PASS {:>2} {name}: {m} [{took:.1?}]", i + 1),
            Err(m) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {m} [{took:.1?}]", i + 1)
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
