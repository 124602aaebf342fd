use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use varharm::dyadic::default_lattices;
use varharm::harness::{self, check::run_checks, Experiment, ExperimentConfig};
use varharm::{GridFunction, Weight, WeightConstants};

#[derive(Parser)]
#[command(name = "varharm", version, about = "Ratio sweeps for variation operators on weighted spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write `<E>.csv` and `<E>_summary.json`.
    Run {
        #[arg(long)]
        experiment: Experiment,
        /// Flat `key = value` config file; defaults are used for missing keys.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Also run with `2^k` times the cells (E8: a `k`-fold refined scale family).
        #[arg(long, default_value_t = 0)]
        refine: u32,
    },
    /// Run the built-in invariant checks.
    Check,
    /// Print the constants of a weight given as a grid CSV.
    Info {
        #[arg(long)]
        weights: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "1.5,2,3")]
        p: Vec<f64>,
    },
}

const EXIT_FAILURES: u8 = 2;
const EXIT_CONFIG: u8 = 3;

fn run(experiment: Experiment, config: Option<PathBuf>, out: Option<PathBuf>, seed: Option<u64>, refine: u32) -> ExitCode {
    let cfg = match config {
        Some(path) => ExperimentConfig::load(&path).map(|mut c| {
            c.experiment = experiment;
            c
        }),
        None => Ok(ExperimentConfig::defaults(experiment)),
    };
    let mut cfg = match cfg {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if let Some(o) = out {
        cfg.out_dir = o;
    }
    if let Err(e) = cfg.validate() {
        eprintln!("{e}");
        return ExitCode::from(EXIT_CONFIG);
    }
    let result = harness::run(&cfg, refine).and_then(|o| harness::write_outputs(&o, &cfg.out_dir).map(|_| o));
    match result {
        Ok(o) => {
            let s = &o.summary;
            println!(
                "{}: {} cases, {} failures, max ratio {:.6e}, min ratio {:.6e}{}",
                s.experiment,
                s.n_cases,
                s.n_failures,
                s.max_ratio,
                s.min_ratio,
                s.refinement_factor.map(|f| format!(", refinement factor {f:.4}")).unwrap_or_default()
            );
            if o.n_failures() > 0 {
                ExitCode::from(EXIT_FAILURES)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::FAILURE
        }
    }
}

fn info(path: PathBuf, p: Vec<f64>) -> ExitCode {
    let result = GridFunction::load_csv(&path).and_then(|f| {
        let lats = default_lattices(f.domain());
        let w = Weight::new(f)?;
        let c = WeightConstants::compute(&w, &p, &lats)?;
        Ok(serde_json::to_string_pretty(&c)?)
    });
    match result {
        Ok(s) => {
            println!("{s}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(EXIT_CONFIG)
        }
    }
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run {
            experiment,
            config,
            out,
            seed,
            refine,
        } => run(experiment, config, out, seed, refine),
        Command::Check => {
            let results = run_checks();
            let failed = results.iter().filter(|(_, r)| r.is_err()).count();
            for (name, r) in results {
                match r {
                    Ok(()) => println!("PASS {name}"),
                    Err(m) => println!("FAIL {name}: {m}"),
                }
            }
            if failed > 0 {
                ExitCode::from(EXIT_FAILURES)
            } else {
                ExitCode::SUCCESS
            }
        }
        Command::Info { weights, p } => info(weights, p),
    }
}
