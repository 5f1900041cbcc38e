//! `bjorth`: strong Birkhoff-James orthogonality from the command line.
//!
//! Every command prints one compact JSON document on stdout. Exit codes:
//!
//! | code | meaning                                                        |
//! |------|----------------------------------------------------------------|
//! | 0    | success                                                        |
//! | 2    | unreadable or malformed input, bad arguments                   |
//! | 3    | operands of different shapes                                   |
//! | 4    | principled failure: a map is refuted, with a witness           |
//! | 5    | exceptional shape (ℂ, ℂ⊕ℂ, M₂) where the canonical form fails  |

mod commands;
mod gallery;
mod outcome;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use bjorth_core::Shape;

#[derive(Debug, Parser)]
#[command(name = "bjorth", version, about = "Strong Birkhoff-James orthogonality on block matrix algebras")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide a ⊥ b, b ⊥ a and mutual orthogonality.
    Check {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Distances from a to b𝔄 and from b to a𝔄.
    Dist { a: PathBuf, b: PathBuf },
    /// Recover γ, u, v, π, J from a map, or refute it.
    Decompose {
        map: PathBuf,
        #[arg(long)]
        tol: Option<f64>,
        /// Pairs tried when looking for a violation to attach to a failure.
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Factor a singularity preserver as P·(A or Aᵀ)^σ·Q per block.
    Factor {
        map: PathBuf,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Randomized check that a map preserves mutual orthogonality and singularity.
    Verify {
        map: PathBuf,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        skip_surjectivity: bool,
    },
    /// Generate random inputs.
    Gen {
        kind: GenKind,
        #[arg(long, value_parser = parse_shape)]
        shape: Shape,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file, or file prefix for kinds that produce two documents.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one of the low-dimensional counterexamples.
    Gallery {
        name: gallery::Fixture,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Sample an orthograph and write DOT and JSON files.
    Orthograph {
        #[arg(long, value_parser = parse_shape)]
        shape: Shape,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 24)]
        samples: usize,
        /// Add matrix units, block indicators and block-supported samples.
        #[arg(long)]
        structured: bool,
        #[arg(long)]
        tol: Option<f64>,
        /// Output directory.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum GenKind {
    Element,
    Unitary,
    /// Mutually orthogonal pair.
    Pair,
    /// Random canonical form and its map.
    Canonical,
    /// Random semilinear factorization and its map.
    Factorization,
    /// Map of the blockwise transpose.
    Transpose,
}

fn parse_shape(text: &str) -> Result<Shape, String> {
    Shape::parse(text).map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = commands::run(cli.command);
    outcome.emit()
}
