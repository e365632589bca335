//! povmkit: construct, validate, sparsify, and verify POVMs, and run the
//! reproducible experiments (CSV + JSON output).

mod commands;
mod experiments;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

use commands::{NormArgs, SparsifyArgs};
use experiments::{ConfigOverrides, ExperimentConfig};

#[derive(Parser)]
#[command(name = "povmkit", version, about = "POVM distinguishability norms, zonotope geometry, and sparsification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the invariants of a POVM, sub-POVM, design, or zonotope file.
    Validate {
        /// JSON file to check.
        path: PathBuf,
    },
    /// Evaluate norms of a Hermitian operator file.
    Norm {
        /// Operator JSON ({"d": .., "m": [[[re, im], ..], ..]}).
        #[arg(long)]
        delta: PathBuf,
        /// POVM file for the distinguishability norm.
        #[arg(long)]
        povm: Option<PathBuf>,
        /// Factor dimensions (comma separated) for the multipartite norm.
        #[arg(long, value_delimiter = ',')]
        dims: Option<Vec<usize>>,
        /// Enable the Monte Carlo uniform-norm estimate at this sample count.
        #[arg(long)]
        samples: Option<usize>,
        /// Seed for the estimators.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Sample the renormalized random POVM (S^{-1/2} P_i S^{-1/2}).
    RandomPovm {
        #[arg(short, long)]
        d: usize,
        #[arg(short, long)]
        n: usize,
        #[arg(long)]
        seed: u64,
        /// Output file (stdout if omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sparsify a POVM into a sub-POVM by weighted importance sampling.
    Sparsify {
        /// Input POVM file.
        #[arg(long)]
        povm: PathBuf,
        /// Number of outcome draws.
        #[arg(long)]
        budget: usize,
        /// Nominal approximation quality (recorded, not enforced).
        #[arg(long, default_value_t = 0.2)]
        epsilon: f64,
        /// Directions for the ratio certificate.
        #[arg(long, default_value_t = 200)]
        directions: usize,
        #[arg(long)]
        seed: u64,
        /// Sub-POVM output file (stdout if omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Ratio report output file.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Tensor two POVM files.
    Tensor {
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Report the approximate-design defect of a design file.
    DesignCheck {
        path: PathBuf,
        /// Exit nonzero unless the file is an exact design within 1e-9.
        #[arg(long)]
        expect_exact: bool,
    },
    /// Run a named experiment and write CSV + JSON records.
    Experiment(ExperimentArgs),
}

#[derive(Args)]
struct ExperimentArgs {
    /// One of: prop4-sandwich, thm1-concentration, thm3-local,
    /// thm4-subpovm, moment-identities, design-check.
    #[arg(long)]
    name: String,
    /// Root seed; fully determines all randomness.
    #[arg(long)]
    seed: u64,
    /// Output directory for <name>.csv and <name>.json.
    #[arg(long, default_value = "runs")]
    out: PathBuf,
    /// Monte Carlo samples per estimate.
    #[arg(long)]
    samples: Option<usize>,
    /// Verification directions per report.
    #[arg(long)]
    directions: Option<usize>,
    /// Dimensions (comma separated; meaning depends on the experiment).
    #[arg(long, value_delimiter = ',')]
    dims: Option<Vec<usize>>,
    /// Outcome sweep for thm1-concentration / outcome count for thm4.
    #[arg(long, value_delimiter = ',')]
    n_sweep: Option<Vec<usize>>,
    /// Approximation parameter ε.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Sub-POVM outcome budget.
    #[arg(long)]
    budget: Option<usize>,
    /// Outcome-count multiplier: n = multiplier · ε⁻² · d².
    #[arg(long)]
    multiplier: Option<f64>,
    /// Trials (repeats/seeds) per configuration.
    #[arg(long)]
    trials: Option<usize>,
    /// Worker threads; output is identical for any worker count.
    #[arg(long, default_value_t = 1)]
    workers: usize,
}

fn run() -> Result<ExitCode> {
    let cli = Cli::parse();
    match cli.command {
        Command::Validate { path } => {
            let failures = commands::cmd_validate(&path)?;
            Ok(if failures == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
        Command::Norm {
            delta,
            povm,
            dims,
            samples,
            seed,
        } => {
            commands::cmd_norm(&NormArgs {
                delta_path: &delta,
                povm_path: povm.as_deref(),
                dims,
                samples,
                seed,
            })?;
            Ok(ExitCode::SUCCESS)
        }
        Command::RandomPovm { d, n, seed, out } => {
            commands::cmd_random_povm(d, n, seed, out.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Sparsify {
            povm,
            budget,
            epsilon,
            directions,
            seed,
            out,
            report,
        } => {
            commands::cmd_sparsify(&SparsifyArgs {
                povm_path: &povm,
                budget,
                epsilon,
                directions,
                seed,
                out: out.as_deref(),
                report: report.as_deref(),
            })?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Tensor { left, right, out } => {
            commands::cmd_tensor(&left, &right, out.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::DesignCheck { path, expect_exact } => {
            let failures = commands::cmd_design_check(&path, expect_exact)?;
            Ok(if failures == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
        Command::Experiment(args) => {
            let overrides = ConfigOverrides {
                dims: args.dims,
                n_sweep: args.n_sweep,
                budget: args.budget,
                epsilon: args.epsilon,
                samples: args.samples,
                directions: args.directions,
                trials: args.trials,
                multiplier: args.multiplier,
            };
            let config =
                ExperimentConfig::resolve(&args.name, args.seed, args.workers, &overrides)?;
            let violations = experiments::run_and_write(&config, &args.out)?;
            Ok(if violations == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
