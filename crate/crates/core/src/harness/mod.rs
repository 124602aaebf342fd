//! Batch experiment runner: batteries, configuration, ratio sweeps and output.

pub mod battery;
pub mod check;
pub mod config;
pub mod experiments;
pub mod table;

use std::path::Path;

use crate::error::Result;

pub use config::{Experiment, ExperimentConfig};
pub use experiments::{run_experiment, run_with_scales};
pub use table::{RatioTable, Row, Summary};

/// Tables and summary of one `run`, with the optional refined pass.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub table: RatioTable,
    pub refined: Option<RatioTable>,
    pub summary: Summary,
}

impl RunOutput {
    pub fn n_failures(&self) -> usize {
        self.table.n_failures() + self.refined.as_ref().map_or(0, |t| t.n_failures())
    }
}

/// `max(r₁/r₀, r₀/r₁)`; 1 when both vanish.
pub fn refinement_factor(r0: f64, r1: f64) -> f64 {
    if r0 == 0.0 && r1 == 0.0 {
        1.0
    } else if r0 == 0.0 || r1 == 0.0 {
        f64::INFINITY
    } else {
        (r1 / r0).max(r0 / r1)
    }
}

/// Runs `cfg` and, for `refine = k > 0`, a second pass with `2^k` times the
/// cells (for E8, the scale family refined `k` times instead).
pub fn run(cfg: &ExperimentConfig, refine: u32) -> Result<RunOutput> {
    let table = run_experiment(cfg)?;
    let refined = if refine == 0 {
        None
    } else if cfg.experiment == Experiment::E8 {
        let mut s = cfg.scales()?;
        for _ in 0..refine {
            s = s.refine();
        }
        Some(run_with_scales(cfg, &s)?)
    } else {
        let mut fine = cfg.clone();
        fine.cells = cfg.cells << refine;
        Some(run_experiment(&fine)?)
    };
    let factor = refined
        .as_ref()
        .map(|r| refinement_factor(table.max_ratio(), r.max_ratio()));
    let mut summary = table.summary(factor);
    if let Some(r) = &refined {
        summary.n_failures += r.n_failures();
    }
    Ok(RunOutput {
        table,
        refined,
        summary,
    })
}

/// Writes `<E>.csv`, `<E>_refined.csv` (if any) and `<E>_summary.json`.
pub fn write_outputs(out: &RunOutput, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let name = &out.table.experiment;
    out.table.save_csv(dir.join(format!("{name}.csv")))?;
    if let Some(r) = &out.refined {
        r.save_csv(dir.join(format!("{name}_refined.csv")))?;
    }
    table::save_summary(&out.summary, dir.join(format!("{name}_summary.json")))
}
