// SPDX-License-Identifier: Apache-2.0

//! Command-line front end: verification suites, training runs, sampling
//! runs, differential equation solving and Fourier-vs-Hartley comparisons,
//! driven by config files with explicit seeds.

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use thiserror::Error;

pub mod commands;
pub mod config;
pub mod output;

/// CLI failure classes; chosen so CI can branch on exit codes.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("check failed: {0}")]
    CheckFailed(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::CheckFailed(_) => 4,
            CliError::Io(_) => 1,
        }
    }
}

/// Maps core errors arising inside a numerical run.
pub fn numerical(e: qhartley::Error) -> CliError {
    CliError::Numerical(e.to_string())
}

#[derive(Parser, Debug)]
#[command(
    name = "qhartley",
    version,
    about = "Quantum Hartley-basis generative models on a statevector simulator"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run the transform and feature-map verification suite.
    Verify {
        /// Optional config file (only [output] is read).
        #[arg(long)]
        config: Option<PathBuf>,
        /// Smallest register size to check.
        #[arg(long, default_value_t = 1)]
        n_min: usize,
        /// Largest register size to check.
        #[arg(long, default_value_t = 5)]
        n_max: usize,
        /// Seed for the randomized norm-factor checks.
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Write the per-check margin report under this directory.
        #[arg(long)]
        out: Option<String>,
        /// Negative control: corrupt the QHT (skip the adjoint sqrt X) and
        /// confirm the suite notices.
        #[arg(long, hide = true, default_value_t = false)]
        corrupt_qht: bool,
    },
    /// Train a univariate model against an analytic density.
    Train {
        #[arg(long)]
        config: PathBuf,
        /// Output directory (overrides [output] dir).
        #[arg(long)]
        out: Option<String>,
        /// Seed override for [train] seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Train a univariate model to satisfy a differential equation.
    SolveDe {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Train a bivariate model against a binormal density.
    Train2d {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Draw shot samples from a trained univariate model.
    Sample {
        #[arg(long)]
        config: PathBuf,
        /// Trained model JSON produced by `train`.
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        out: Option<String>,
        /// Seed override for [sample] seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Shot override for [sample] shots.
        #[arg(long)]
        shots: Option<u64>,
        /// Print the total variation distance between the empirical
        /// histogram and the model's own grid distribution.
        #[arg(long, default_value_t = false)]
        tvd: bool,
    },
    /// Draw shot samples from a trained bivariate model.
    Sample2d {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        out: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        shots: Option<u64>,
    },
    /// Train Fourier and Hartley models side by side on the exponential
    /// target and report losses and parameter counts.
    Compare {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Emit the squared-overlap map of the Hartley feature map as CSV.
    OverlapMap {
        #[arg(long, default_value_t = 5)]
        qubits: usize,
        /// Grid spacing over [0, 2^n - 1].
        #[arg(long, default_value_t = 0.1)]
        step: f64,
        /// Drop the x-dependent ancilla rotation (negative control).
        #[arg(long, default_value_t = false)]
        no_ancilla_rz: bool,
        #[arg(long)]
        out: Option<String>,
    },
}

/// Entry point shared by `main` and the test suite.
pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Verify {
            config,
            n_min,
            n_max,
            seed,
            out,
            corrupt_qht,
        } => commands::verify::run(config.as_deref(), n_min, n_max, seed, out, corrupt_qht),
        Command::Train { config, out, seed } => commands::train::run_train(&config, out, seed),
        Command::SolveDe { config, out, seed } => commands::train::run_solve_de(&config, out, seed),
        Command::Train2d { config, out, seed } => commands::train::run_train2d(&config, out, seed),
        Command::Sample {
            config,
            model,
            out,
            seed,
            shots,
            tvd,
        } => commands::sample::run_sample(&config, &model, out, seed, shots, tvd),
        Command::Sample2d {
            config,
            model,
            out,
            seed,
            shots,
        } => commands::sample::run_sample2d(&config, &model, out, seed, shots),
        Command::Compare { config, out, seed } => commands::compare::run(&config, out, seed),
        Command::OverlapMap {
            qubits,
            step,
            no_ancilla_rz,
            out,
        } => commands::overlap::run(qubits, step, no_ancilla_rz, out),
    }
}
