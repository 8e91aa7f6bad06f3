//! `z2mem`: sweeps over the transverse-field Ising chain and the valence-bond
//! identities, written as deterministic CSV.
//!
//! Exit codes: 0 success, 1 usage or invalid input, 2 eigensolver did not
//! converge, 3 request beyond the dense code paths, 4 a reported check failed.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use z2memory::Error;

use commands::{PzArgs, RangeArgs, RvbArgs, ScanE1Args, StabilizerArgs, ThermalArgs};

#[derive(Debug, Parser)]
#[command(name = "z2mem", version, about = "Exact-diagonalization sweeps for the Z2 quantum memory")]
struct Cli {
    /// Worker threads; defaults to the number of logical processors.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write to this file instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Eigensolver residual tolerance.
    #[arg(long, global = true, default_value_t = 1e-10)]
    tol: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// e1 of the ground-state VCM against N for several lambda.
    ScanE1(ScanE1Args),
    /// Distribution of the total magnetization M_z.
    Pz(PzArgs),
    /// e2 of the ground-state VCM against N.
    E2(RangeArgs),
    /// Lowest gap against N with the adiabatic time 1/gap^2.
    Gap(RangeArgs),
    /// e1 of the VCM of the superposed doublet state against N.
    Superpose(RangeArgs),
    /// e1 of W for Gibbs states over a log-spaced temperature grid.
    Thermal(ThermalArgs),
    /// Valence-bond and RVB identities.
    Rvb(RvbArgs),
    /// Stabilizer algebra of the bond operators.
    Stabilizer(StabilizerArgs),
}

const EXIT_USAGE: u8 = 1;
const EXIT_CONVERGENCE: u8 = 2;
const EXIT_CAPABILITY: u8 = 3;
const EXIT_CHECK_FAILED: u8 = 4;

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Convergence { .. } => EXIT_CONVERGENCE,
        Error::Capability(_) => EXIT_CAPABILITY,
        Error::Domain(_) | Error::Contract(_) => EXIT_USAGE,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    if let Some(threads) = cli.threads {
        if threads == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(EXIT_USAGE);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    }

    let tol = cli.tol;
    let result = match &cli.command {
        Command::ScanE1(a) => commands::scan_e1(a, tol),
        Command::Pz(a) => commands::pz(a, tol),
        Command::E2(a) => commands::e2(a, tol),
        Command::Gap(a) => commands::gap(a, tol),
        Command::Superpose(a) => commands::superpose(a, tol),
        Command::Thermal(a) => commands::thermal(a, tol),
        Command::Rvb(a) => commands::rvb(a),
        Command::Stabilizer(a) => commands::stabilizer(a),
    };
    let outcome = match result {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(&e));
        }
    };
    if let Err(e) = output::emit(&outcome.text, cli.out.as_deref()) {
        eprintln!("error: cannot write output: {e}");
        return ExitCode::from(EXIT_USAGE);
    }
    if outcome.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_CHECK_FAILED)
    }
}
