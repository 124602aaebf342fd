//! Flat `key = value` experiment configuration.
//!
//! One key per line, `#` starts a comment, lists are comma separated.
//! Function batteries are written `kind:count`, e.g.
//! `functions = indicators:3, random-bumps:10`.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::dyadic::default_lattices;
use crate::error::{Error, Result};
use crate::grid::Domain1D;
use crate::kernel::KernelSpec;
use crate::variation::ScaleFamily;

use super::battery::{BatterySpec, FunctionKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Experiment {
    E1,
    E2,
    E3,
    E4,
    E5,
    E6,
    E7,
    E8,
}

impl Experiment {
    pub const ALL: [Experiment; 8] = [
        Experiment::E1,
        Experiment::E2,
        Experiment::E3,
        Experiment::E4,
        Experiment::E5,
        Experiment::E6,
        Experiment::E7,
        Experiment::E8,
    ];

    pub fn name(&self) -> &'static str {
        ["E1", "E2", "E3", "E4", "E5", "E6", "E7", "E8"][*self as usize]
    }

    /// Default exponent list `p` for the experiment.
    fn default_p(&self) -> Vec<f64> {
        match self {
            Experiment::E1 => vec![1.2, 2.0, 4.0],
            Experiment::E2 | Experiment::E7 => vec![1.0],
            Experiment::E3 => vec![0.7, 1.0],
            _ => vec![2.0],
        }
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_uppercase();
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == t)
            .ok_or_else(|| Error::Config(format!("unknown experiment '{s}' (expected E1..E8)")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub left: f64,
    pub right: f64,
    pub cells: usize,
    pub kernel: KernelSpec,
    pub t_max: f64,
    pub scale_ratio: f64,
    pub scale_count: usize,
    pub rho: Vec<f64>,
    pub p: Vec<f64>,
    /// Power-weight exponents `a` of `|x|^a`.
    pub weights: Vec<f64>,
    pub functions: Vec<BatterySpec>,
    /// Number of symbols `b` for the commutator experiments.
    pub symbols: usize,
    pub seed: u64,
    pub out_dir: PathBuf,
    /// Initial stopping constant of the sparse construction.
    pub c0: f64,
    pub tau: f64,
    /// Plateau half-width of the witness kernel.
    pub delta: f64,
    /// Atom radii: `radii` values geometric in `[radius_min, radius_max]`.
    pub radii: usize,
    pub radius_min: f64,
    pub radius_max: f64,
    /// Atoms drawn per radius.
    pub atoms_per_radius: usize,
    /// Witness cube length in cells.
    pub witness_cells: usize,
    /// Witness cubes kept per symbol.
    pub witness_cubes: usize,
    /// Kernel-difference triples for E8.
    pub triples: usize,
}

impl ExperimentConfig {
    pub fn defaults(experiment: Experiment) -> Self {
        Self {
            experiment,
            left: -8.0,
            right: 8.0,
            cells: 3 * 1024,
            kernel: KernelSpec::GaussianHeat,
            t_max: 4.0,
            scale_ratio: 0.885,
            scale_count: 48,
            rho: vec![3.0],
            p: experiment.default_p(),
            weights: match experiment {
                Experiment::E2 | Experiment::E7 => vec![-0.5, -0.3, 0.0],
                Experiment::E3 => vec![0.0, 0.3],
                Experiment::E5 | Experiment::E6 => vec![-0.3, 0.0, 0.3],
                _ => vec![-0.3, 0.0, 0.3, 0.6],
            },
            functions: match experiment {
                Experiment::E5 => vec![BatterySpec::new(FunctionKind::Indicators, 3)],
                _ => vec![
                    BatterySpec::new(FunctionKind::Indicators, 10),
                    BatterySpec::new(FunctionKind::RandomBumps, 20),
                    BatterySpec::new(FunctionKind::Oscillatory, 20),
                ],
            },
            symbols: match experiment {
                Experiment::E6 => 10,
                _ => 4,
            },
            seed: 1,
            out_dir: PathBuf::from("out"),
            c0: 2.0,
            tau: 0.125,
            delta: 0.5,
            radii: match experiment {
                Experiment::E7 => 6,
                _ => 25,
            },
            radius_min: 1.0 / 16.0,
            radius_max: 4.0,
            atoms_per_radius: 2,
            witness_cells: 16,
            witness_cubes: 2,
            triples: 200,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", n + 1)))?;
            pairs.push((k.trim().to_string(), v.trim().to_string(), n + 1));
        }
        let exp = pairs
            .iter()
            .find(|(k, _, _)| k == "experiment")
            .map(|(_, v, _)| v.parse::<Experiment>())
            .transpose()?
            .unwrap_or(Experiment::E1);
        let mut cfg = Self::defaults(exp);
        for (k, v, line) in pairs {
            cfg.set(&k, &v)
                .map_err(|e| Error::Config(format!("line {line}: {k}: {}", strip(e))))?;
        }
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "experiment" => self.experiment = value.parse()?,
            "left" => self.left = num(value)?,
            "right" => self.right = num(value)?,
            "cells" => self.cells = num(value)?,
            "kernel" => self.kernel = KernelSpec::parse(value)?,
            "t_max" => self.t_max = num(value)?,
            "scale_ratio" => self.scale_ratio = num(value)?,
            "scale_count" => self.scale_count = num(value)?,
            "rho" => self.rho = list(value)?,
            "p" => self.p = list(value)?,
            "weights" | "weight_exponents" => self.weights = list(value)?,
            "functions" => {
                self.functions = value
                    .split(',')
                    .filter(|s| !s.trim().is_empty())
                    .map(BatterySpec::parse)
                    .collect::<Result<_>>()?
            }
            "symbols" => self.symbols = num(value)?,
            "seed" => self.seed = num(value)?,
            "out_dir" => self.out_dir = PathBuf::from(value),
            "c0" => self.c0 = num(value)?,
            "tau" => self.tau = num(value)?,
            "delta" => self.delta = num(value)?,
            "radii" => self.radii = num(value)?,
            "radius_min" => self.radius_min = num(value)?,
            "radius_max" => self.radius_max = num(value)?,
            "atoms_per_radius" => self.atoms_per_radius = num(value)?,
            "witness_cells" => self.witness_cells = num(value)?,
            "witness_cubes" => self.witness_cubes = num(value)?,
            "triples" => self.triples = num(value)?,
            other => return Err(Error::Config(format!("unknown key '{other}'"))),
        }
        Ok(())
    }

    pub fn domain(&self) -> Result<Domain1D> {
        Domain1D::new(self.left, self.right, self.cells)
    }

    pub fn scales(&self) -> Result<ScaleFamily> {
        ScaleFamily::geometric(self.t_max, self.scale_ratio, self.scale_count)
    }

    /// Checks every precondition the experiment relies on, before any work.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        let d = self.domain().map_err(|e| Error::Config(strip(e)))?;
        let s = self.scales().map_err(|e| Error::Config(strip(e)))?;
        if self.experiment != Experiment::E8 {
            s.check(&d).map_err(|e| {
                Error::Config(format!(
                    "{}; raise scale_ratio or lower scale_count",
                    strip(e)
                ))
            })?;
        }
        if self.rho.is_empty() || self.rho.iter().any(|&r| !(r > 2.0)) {
            return bad(format!("rho values must exceed 2, got {:?}", self.rho));
        }
        if self.p.is_empty() {
            return bad("p list is empty".into());
        }
        match self.experiment {
            Experiment::E3 => {
                if self.p.iter().any(|&p| !(p > 0.5 && p <= 1.0)) {
                    return bad(format!("E3 needs p in (1/2, 1], got {:?}", self.p));
                }
            }
            Experiment::E2 | Experiment::E7 => {}
            _ => {
                if self.p.iter().any(|&p| !(p > 1.0)) {
                    return bad(format!("p values must exceed 1, got {:?}", self.p));
                }
            }
        }
        if self.weights.iter().any(|&a| !(a > -1.0) || !a.is_finite()) {
            return bad(format!("weight exponents must exceed -1, got {:?}", self.weights));
        }
        if self.weights.is_empty() {
            return bad("weight list is empty".into());
        }
        if matches!(self.experiment, Experiment::E1 | Experiment::E2 | Experiment::E4) && self.functions.is_empty() {
            return bad("function battery is empty".into());
        }
        if default_lattices(&d)[0].depth < 1 {
            return bad(format!("cells = {} must be even for the dyadic lattices", self.cells));
        }
        if !(self.c0 > 1.0) {
            return bad(format!("c0 must exceed 1, got {}", self.c0));
        }
        if !(self.tau > 0.0 && self.tau <= 0.125) {
            return bad(format!("tau must lie in (0, 1/8], got {}", self.tau));
        }
        if !(self.delta > 0.0 && self.delta <= 0.5) {
            return bad(format!("delta must lie in (0, 1/2], got {}", self.delta));
        }
        if !(self.radius_min > 0.0 && self.radius_min <= self.radius_max) || self.radii == 0 {
            return bad("atom radii must satisfy 0 < radius_min ≤ radius_max".into());
        }
        if matches!(self.experiment, Experiment::E3 | Experiment::E7) && (self.radius_max + 1.0 > self.right || -self.radius_max - 1.0 < self.left) {
            return bad("largest atom ball does not fit in the domain".into());
        }
        let tk = self.tau * self.witness_cells as f64;
        if self.experiment == Experiment::E6 && ((tk / 2.0).fract() != 0.0 || tk < 2.0) {
            return bad(format!("tau·witness_cells = {tk} must be a positive even integer"));
        }
        Ok(())
    }
}

fn strip(e: Error) -> String {
    match e {
        Error::Config(m) => m,
        other => other.to_string(),
    }
}

fn num<T: FromStr>(v: &str) -> Result<T> {
    v.trim()
        .parse()
        .map_err(|_| Error::Config(format!("cannot parse '{v}'")))
}

fn list(v: &str) -> Result<Vec<f64>> {
    v.split(',').filter(|s| !s.trim().is_empty()).map(num).collect()
}
