//! Seeded batteries of test functions, symbols and weights.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dyadic::default_lattices;
use crate::error::{Error, Result};
use crate::grid::{Domain1D, GridFunction};
use crate::weights::{power_weight, Weight, WeightConstants};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FunctionKind {
    Indicators,
    RandomBumps,
    Oscillatory,
    Zero,
}

impl FunctionKind {
    pub fn name(&self) -> &'static str {
        match self {
            FunctionKind::Indicators => "indicators",
            FunctionKind::RandomBumps => "random-bumps",
            FunctionKind::Oscillatory => "oscillatory",
            FunctionKind::Zero => "zero",
        }
    }

    fn id(&self) -> u64 {
        *self as u64 + 1
    }
}

/// `kind:count` entry of a function battery.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BatterySpec {
    pub kind: FunctionKind,
    pub count: usize,
}

impl BatterySpec {
    pub fn new(kind: FunctionKind, count: usize) -> Self {
        Self { kind, count }
    }

    pub fn parse(s: &str) -> Result<Self> {
        let (name, count) = match s.trim().split_once(':') {
            Some((n, c)) => (
                n.trim(),
                c.trim()
                    .parse()
                    .map_err(|_| Error::Config(format!("bad battery count in '{s}'")))?,
            ),
            None => (s.trim(), 3),
        };
        let kind = match name {
            "indicators" => FunctionKind::Indicators,
            "random-bumps" => FunctionKind::RandomBumps,
            "oscillatory" => FunctionKind::Oscillatory,
            "zero" => FunctionKind::Zero,
            other => return Err(Error::UnknownBattery(other.to_string())),
        };
        Ok(Self { kind, count })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Named {
    pub label: String,
    pub f: GridFunction,
}

/// A weight with its constants.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightEntry {
    pub label: String,
    /// Power exponent, when the weight is `|x|^a`.
    pub exponent: Option<f64>,
    pub weight: Weight,
    pub constants: WeightConstants,
}

/// `(b, μ, λ)` for the two-weight commutator experiments.
#[derive(Debug, Clone, PartialEq)]
pub struct BloomTriple {
    pub b: Named,
    pub mu: f64,
    pub lambda: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Battery {
    Functions(Vec<Named>),
    Weights(Vec<WeightEntry>),
    Triples(Vec<BloomTriple>),
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

const FIXED_INDICATORS: [(f64, f64); 10] = [
    (-1.0, 1.0),
    (0.0, 1.0),
    (-4.0, -2.0),
    (2.0, 2.5),
    (-0.5, 3.0),
    (-6.0, -5.75),
    (1.0, 1.125),
    (-3.0, 3.0),
    (4.0, 7.0),
    (-2.0, -1.875),
];

/// Functions of one battery entry.
pub fn functions(spec: BatterySpec, seed: u64, d: Domain1D) -> Vec<Named> {
    let mut rng = rng_for(seed, spec.kind.id());
    let name = spec.kind.name();
    (0..spec.count)
        .map(|i| {
            let f = match spec.kind {
                FunctionKind::Zero => GridFunction::zeros(d),
                FunctionKind::Indicators => {
                    let (a, b) = FIXED_INDICATORS.get(i).copied().unwrap_or_else(|| {
                        let c = rng.gen_range(-5.0..5.0);
                        let w = rng.gen_range(0.05..2.0);
                        (c - w, c + w)
                    });
                    GridFunction::indicator(d, a, b)
                }
                FunctionKind::RandomBumps => {
                    let k = rng.gen_range(1..=3);
                    let bumps: Vec<(f64, f64, f64)> = (0..k)
                        .map(|_| {
                            let amp = rng.gen_range(0.2..2.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                            (amp, rng.gen_range(-5.0..5.0), rng.gen_range(0.1..1.5))
                        })
                        .collect();
                    GridFunction::from_fn(d, |x| {
                        bumps
                            .iter()
                            .map(|&(a, c, w)| {
                                let u = (x - c) / w;
                                if u.abs() < 1.0 {
                                    a * (1.0 - u * u).powi(2)
                                } else {
                                    0.0
                                }
                            })
                            .sum()
                    })
                }
                FunctionKind::Oscillatory => {
                    let c = rng.gen_range(-3.0..3.0);
                    let half = rng.gen_range(0.5..3.0);
                    let k = rng.gen_range(1..=4);
                    let terms: Vec<(f64, f64)> = (1..=k)
                        .map(|j| {
                            let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                            (sign / j as f64, (1u32 << j) as f64 / half)
                        })
                        .collect();
                    GridFunction::from_fn(d, |x| {
                        if (x - c).abs() >= half {
                            return 0.0;
                        }
                        terms
                            .iter()
                            .map(|&(a, freq)| {
                                let s = (PI * freq * (x - c)).sin();
                                a * if s > 0.0 {
                                    1.0
                                } else if s < 0.0 {
                                    -1.0
                                } else {
                                    0.0
                                }
                            })
                            .sum()
                    })
                }
            };
            Named {
                label: format!("{name}-{i:02}"),
                f,
            }
        })
        .collect()
}

/// Concatenated function battery.
pub fn function_battery(specs: &[BatterySpec], seed: u64, d: Domain1D) -> Vec<Named> {
    specs.iter().flat_map(|s| functions(*s, seed, d)).collect()
}

/// Symbols `b`: steps, sawtooth waves, logarithms and random mixtures.
pub fn symbols(count: usize, seed: u64, d: Domain1D) -> Vec<Named> {
    let mut rng = rng_for(seed, 101);
    let floor = d.spacing();
    (0..count)
        .map(|i| {
            let (kind, f) = match i % 4 {
                0 => {
                    let at = rng.gen_range(-3.0..3.0);
                    let (lo, hi) = (rng.gen_range(-2.0..0.0), rng.gen_range(0.5..2.0));
                    ("step", GridFunction::from_fn(d, |x| if x < at { lo } else { hi }))
                }
                1 => {
                    let period = rng.gen_range(0.5..4.0);
                    let amp = rng.gen_range(0.5..2.0);
                    let phase = rng.gen_range(0.0..period);
                    (
                        "sawtooth",
                        GridFunction::from_fn(d, |x| amp * ((x + phase) / period).rem_euclid(1.0)),
                    )
                }
                2 => {
                    let c = rng.gen_range(-2.0..2.0);
                    ("log", GridFunction::from_fn(d, |x| (x - c).abs().max(floor).ln()))
                }
                _ => {
                    let steps: Vec<(f64, f64)> = (0..rng.gen_range(2..6))
                        .map(|_| (rng.gen_range(-6.0..6.0), rng.gen_range(-1.0..1.0)))
                        .collect();
                    let c = rng.gen_range(-4.0..4.0);
                    let wlog = rng.gen_range(0.2..1.0);
                    (
                        "mixed",
                        GridFunction::from_fn(d, |x| {
                            steps.iter().filter(|s| x >= s.0).map(|s| s.1).sum::<f64>()
                                + wlog * (x - c).abs().max(floor).ln()
                        }),
                    )
                }
            };
            Named {
                label: format!("{kind}-{i:02}"),
                f,
            }
        })
        .collect()
}

/// Power weights `max(|x|, 2h)^a` with their constants at the exponents `ps`.
pub fn power_weights(exponents: &[f64], ps: &[f64], d: Domain1D) -> Result<Vec<WeightEntry>> {
    let lats = default_lattices(&d);
    exponents
        .iter()
        .map(|&a| {
            let weight = power_weight(a, d, 2.0 * d.spacing())?;
            let constants = WeightConstants::compute(&weight, ps, &lats)?;
            Ok(WeightEntry {
                label: format!("power-{a}"),
                exponent: Some(a),
                weight,
                constants,
            })
        })
        .collect()
}

/// `1 + ε g` with a random trigonometric `g`, `|g| ≤ 1`, `ε ∈ [0.1, 0.5]`.
pub fn perturbed_constant_weights(count: usize, seed: u64, ps: &[f64], d: Domain1D) -> Result<Vec<WeightEntry>> {
    let mut rng = rng_for(seed, 202);
    let lats = default_lattices(&d);
    (0..count)
        .map(|i| {
            let eps = rng.gen_range(0.1..0.5);
            let terms: Vec<(f64, f64, f64)> = (0..3)
                .map(|_| (rng.gen_range(-1.0..1.0) / 3.0, rng.gen_range(0.2..4.0), rng.gen_range(0.0..PI)))
                .collect();
            let base = GridFunction::from_fn(d, |x| {
                1.0 + eps * terms.iter().map(|&(a, k, ph)| a * (k * x + ph).sin()).sum::<f64>()
            });
            let weight = Weight::new(base)?;
            let constants = WeightConstants::compute(&weight, ps, &lats)?;
            Ok(WeightEntry {
                label: format!("perturbed-{i:02}"),
                exponent: None,
                weight,
                constants,
            })
        })
        .collect()
}

/// Battery by id: `indicators`, `random-bumps`, `oscillatory`, `zero`,
/// `symbols`, `power-weights`, `perturbed-constant-weights`, `bloom-triples`.
/// `exponents` feeds the power-weight and Bloom batteries; constants are
/// reported at `p ∈ {1.5, 2, 3}`.
pub fn battery_generate(id: &str, count: usize, seed: u64, d: Domain1D, exponents: &[f64]) -> Result<Battery> {
    const PS: [f64; 3] = [1.5, 2.0, 3.0];
    Ok(match id {
        "power-weights" => Battery::Weights(power_weights(exponents, &PS, d)?),
        "perturbed-constant-weights" => Battery::Weights(perturbed_constant_weights(count, seed, &PS, d)?),
        "symbols" => Battery::Functions(symbols(count, seed, d)),
        "bloom-triples" => {
            if exponents.is_empty() {
                return Err(Error::Config("bloom-triples need weight exponents".into()));
            }
            let bs = symbols(count, seed, d);
            let n = exponents.len();
            Battery::Triples(
                bs.into_iter()
                    .enumerate()
                    .map(|(i, b)| BloomTriple {
                        b,
                        mu: exponents[i % n],
                        lambda: exponents[(i + 1) % n],
                    })
                    .collect(),
            )
        }
        other => Battery::Functions(functions(BatterySpec::parse(&format!("{other}:{count}"))?, seed, d)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d() -> Domain1D {
        Domain1D::new(-8.0, 8.0, 384).unwrap()
    }

    #[test]
    fn fixed_indicators() {
        let Battery::Functions(fs) = battery_generate("indicators", 3, 0, d(), &[]).unwrap() else {
            panic!()
        };
        let expect = [(-1.0, 1.0), (0.0, 1.0), (-4.0, -2.0)];
        for (f, (a, b)) in fs.iter().zip(expect) {
            assert_eq!(f.f, GridFunction::indicator(d(), a, b));
        }
    }

    #[test]
    fn power_weight_battery() {
        let Battery::Weights(ws) = battery_generate("power-weights", 0, 0, d(), &[-0.4, 0.0, 0.5]).unwrap() else {
            panic!()
        };
        assert_eq!(ws.len(), 3);
        let c = &ws[1].constants;
        assert!(c.ap.values().all(|&v| v == 1.0));
        assert_eq!((c.a1, c.ainf), (1.0, 1.0));
        assert!(ws.iter().all(|w| w.weight.values().iter().all(|&v| v > 0.0)));
    }

    #[test]
    fn seeded_reproducibility() {
        for id in ["random-bumps", "oscillatory", "symbols", "perturbed-constant-weights", "bloom-triples"] {
            let a = battery_generate(id, 6, 42, d(), &[0.0, 0.3]).unwrap();
            let b = battery_generate(id, 6, 42, d(), &[0.0, 0.3]).unwrap();
            assert_eq!(a, b, "{id}");
            let c = battery_generate(id, 6, 43, d(), &[0.0, 0.3]).unwrap();
            assert_ne!(a, c, "{id}");
        }
        let Battery::Functions(fs) = battery_generate("random-bumps", 20, 1, d(), &[]).unwrap() else { panic!() };
        assert!(fs.iter().all(|f| !f.f.is_zero()));
        let Battery::Functions(fs) = battery_generate("oscillatory", 20, 1, d(), &[]).unwrap() else { panic!() };
        assert!(fs.iter().all(|f| !f.f.is_zero()));
    }

    #[test]
    fn unknown_id() {
        assert!(matches!(
            battery_generate("wavelets", 3, 0, d(), &[]),
            Err(Error::UnknownBattery(_))
        ));
    }
}
