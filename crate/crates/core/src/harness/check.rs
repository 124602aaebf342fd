//! Quick built-in invariant checks for `varharm check`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dyadic::default_lattices;
use crate::grid::{CellRange, Domain1D, GridFunction};
use crate::kernel::KernelSpec;
use crate::oscillation::{oscillation_witness, verify_witness};
use crate::sparse::{build_sparse_family, sparse_commutator, validate_sparse};
use crate::variation::{
    commutator_variation, seq_variation_bruteforce, seq_variation_dp, variation_operator, ScaleFamily,
};
use crate::weights::{ap_constant, Weight};

use super::battery::{battery_generate, function_battery, BatterySpec};

type Outcome = std::result::Result<(), String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Outcome {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn setup() -> (Domain1D, ScaleFamily, Vec<GridFunction>) {
    let d = Domain1D::new(-8.0, 8.0, 384).expect("valid grid");
    let s = ScaleFamily::geometric(4.0, 0.885, 30).expect("valid scales");
    let specs = [
        BatterySpec::parse("indicators:3").expect("known"),
        BatterySpec::parse("random-bumps:3").expect("known"),
        BatterySpec::parse("oscillatory:3").expect("known"),
    ];
    let fs = function_battery(&specs, 7, d).into_iter().map(|n| n.f).collect();
    (d, s, fs)
}

fn dp_matches_bruteforce() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let m = rng.gen_range(1..=12);
        let a: Vec<f64> = (0..m).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let rho = [1.5, 2.5, 3.0, 4.0][rng.gen_range(0..4)];
        let x = seq_variation_dp(&a, rho).map_err(|e| e.to_string())?;
        let y = seq_variation_bruteforce(&a, rho).map_err(|e| e.to_string())?;
        ensure((x - y).abs() <= 1e-12 * y.abs().max(1e-300), || format!("{a:?}: {x} vs {y}"))?;
    }
    Ok(())
}

fn commutator_annihilation() -> Outcome {
    let (d, s, fs) = setup();
    let b = GridFunction::constant(d, -1.75);
    for f in &fs {
        let v = commutator_variation(f, &b, &KernelSpec::GaussianHeat, &s, 3.0).map_err(|e| e.to_string())?;
        ensure(v.values().iter().all(|&x| x == 0.0), || "nonzero commutator".into())?;
        let lat = default_lattices(&d)[1];
        let sp = build_sparse_family(f, &lat, 2.0).map_err(|e| e.to_string())?;
        let c = sparse_commutator(&sp, &b, f).map_err(|e| e.to_string())?;
        ensure(c.values().iter().all(|&x| x == 0.0), || "nonzero sparse commutator".into())?;
    }
    Ok(())
}

fn homogeneity() -> Outcome {
    let (_, s, fs) = setup();
    for f in &fs {
        let v = variation_operator(f, &KernelSpec::Poisson, &s, 3.0).map_err(|e| e.to_string())?;
        let w = variation_operator(&f.scaled(-2.5), &KernelSpec::Poisson, &s, 3.0).map_err(|e| e.to_string())?;
        for (x, y) in v.values().iter().zip(w.values()) {
            ensure((2.5 * x - y).abs() <= 1e-10 * y.abs().max(1e-300), || format!("{x} vs {y}"))?;
        }
    }
    Ok(())
}

fn constant_weight_constants() -> Outcome {
    let (d, _, _) = setup();
    let w = Weight::constant(d, 3.0).map_err(|e| e.to_string())?;
    let lats = default_lattices(&d);
    for p in [1.2, 2.0, 4.0] {
        let c = ap_constant(&w, p, &lats).map_err(|e| e.to_string())?;
        ensure((c - 1.0).abs() < 1e-12, || format!("[3]_A{p} = {c}"))?;
    }
    Ok(())
}

fn sparse_families_valid() -> Outcome {
    let (d, _, fs) = setup();
    for f in &fs {
        for lat in &default_lattices(&d) {
            let s = build_sparse_family(f, lat, 2.0).map_err(|e| e.to_string())?;
            let v = validate_sparse(&s);
            ensure(v.valid, || v.violations.join("; "))?;
        }
    }
    Ok(())
}

fn witness_postconditions() -> Outcome {
    let (d, _, _) = setup();
    let b = GridFunction::from_fn(d, |x| if x > 6.05 { 1.0 } else { -0.5 + 0.01 * x });
    let mu = Weight::uniform(d);
    let w = oscillation_witness(&b, CellRange::new(330, 346), 0.125, 0.5, &mu, 2.0).map_err(|e| e.to_string())?;
    ensure(!w.degenerate, || "step symbol gave a degenerate witness".into())?;
    verify_witness(&b, &w, 0.125).map_err(|e| e.to_string())
}

fn battery_determinism() -> Outcome {
    let (d, _, _) = setup();
    for id in ["random-bumps", "oscillatory", "symbols", "perturbed-constant-weights"] {
        let a = battery_generate(id, 4, 5, d, &[]).map_err(|e| e.to_string())?;
        let b = battery_generate(id, 4, 5, d, &[]).map_err(|e| e.to_string())?;
        ensure(a == b, || format!("{id} differs between runs"))?;
    }
    Ok(())
}

/// Runs every check, returning `(name, outcome)` in a fixed order.
pub fn run_checks() -> Vec<(&'static str, Outcome)> {
    let checks: [(&str, fn() -> Outcome); 7] = [
        ("variation dp equals brute force", dp_matches_bruteforce),
        ("commutators vanish for constant b", commutator_annihilation),
        ("variation is homogeneous", homogeneity),
        ("constant weights have unit constants", constant_weight_constants),
        ("sparse families are sparse", sparse_families_valid),
        ("witness postconditions", witness_postconditions),
        ("batteries are reproducible", battery_determinism),
    ];
    checks.into_iter().map(|(n, f)| (n, f())).collect()
}
