//! Experiment harness for the fractional dispersive lattice laboratory.
//!
//! One binary, one subcommand per experiment, each driven by a strict TOML
//! config. Every run writes a `manifest.json` (full resolved configuration
//! plus code version) next to its CSV/JSON outputs; identical manifests
//! produce byte-identical tables.
//!
//! Exit codes: `0` the run completed and any gate passed; `2` a gated
//! experiment was inconclusive (under-resolved, non-monotone, …);
//! `1` a gate definitively failed or an error occurred.

mod config;
mod report;
mod run;

use clap::Parser;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "fnls-lab",
    version,
    about = "Spectral experiments for a fractional lattice dispersion: \
             trajectories, refinement rates, kernel bounds, space-time \
             estimates, stationary sets, and polyhedron analysis.",
    after_help = "Exit codes: 0 = pass/complete, 2 = inconclusive, \
                  1 = gate failure or error.\n\
                  Every subcommand takes a strict TOML config: unknown keys \
                  are fatal. Each run writes manifest.json, CSV tables, and \
                  a JSON summary into the configured output directory."
)]
enum Cli {
    /// Integrate one trajectory; record mass/energy and optional field dumps.
    Simulate {
        /// TOML config: [problem] [grid] [data] [time] [output] [limits].
        config: PathBuf,
    },
    /// Mesh-refinement rate experiment against a certified reference run.
    Converge {
        /// TOML config: [problem] [experiment] [data] [output] [limits].
        config: PathBuf,
    },
    /// Certified sup sweep of the dispersive kernel bound over (α, h, N, t).
    KernelDecay {
        /// TOML config: [sweep] [output] [limits].
        config: PathBuf,
    },
    /// Mesh-uniformity of the space-time estimate across an h ladder.
    Strichartz {
        /// TOML config: [estimate] [ladder] [data] [output] [limits].
        config: PathBuf,
    },
    /// Stationary-set sweep and oscillatory-integral decay fits.
    CriticalPoints {
        /// TOML config: [sweep] [[fits]] [output] [limits].
        config: PathBuf,
    },
    /// Polyhedron distance / adaptedness / decay for polynomial files.
    NewtonPoly {
        /// TOML config: [input] [output] [limits].
        config: PathBuf,
    },
}

fn main() -> ExitCode {
    // Exit 2 is reserved for "experiment inconclusive", so argument errors
    // must not use clap's default code 2: remap them to 1. Help/version
    // keep their conventional success exit.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e)
            if matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            ) =>
        {
            e.print().expect("writing help");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            e.print().expect("writing diagnostics");
            return ExitCode::from(1);
        }
    };
    let result = match &cli {
        Cli::Simulate { config } => run::simulate::run(config),
        Cli::Converge { config } => run::converge::run(config),
        Cli::KernelDecay { config } => run::kernel_decay::run(config),
        Cli::Strichartz { config } => run::strichartz::run(config),
        Cli::CriticalPoints { config } => run::critical_points::run(config),
        Cli::NewtonPoly { config } => run::newton_poly::run(config),
    };
    match result {
        Ok(outcome) => ExitCode::from(outcome.code() as u8),
        Err(err) => {
            if err.downcast_ref::<config::EmptyConfig>().is_some() {
                eprintln!("error: configuration file is empty\n");
                eprintln!("{}", usage());
            } else {
                eprintln!("error: {err:#}");
            }
            ExitCode::from(1)
        }
    }
}

fn usage() -> String {
    use clap::CommandFactory;
    Cli::command().render_long_help().to_string()
}
