//! `susy-pep`: fit a deep sech^2 well, build its supersymmetric partners
//! and compare the observables of the deep and shallow descriptions.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use output::Format;

#[derive(Parser)]
#[command(name = "susy-pep", version, about)]
struct Cli {
    /// Log progress (repeat for more detail).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit (A_tilde, beta) to the target binding energy and rms radius.
    Fit(Common),
    /// Analytic and numerical levels of the deep well.
    Spectrum(Common),
    /// Tabulate the deep well and its partners.
    Partner {
        #[command(flatten)]
        common: Common,
        /// Number of states to remove (default: all below the physical state).
        #[arg(short, long)]
        k: Option<usize>,
    },
    /// Radii, transfer strengths, wave functions and phase shifts.
    Report {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        sweep: Sweep,
    },
    /// s-wave phase shifts of the deep well and its partners.
    Phase {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        sweep: Sweep,
    },
    /// Zero-range strengths D0 of both descriptions and their ratio.
    TransferRatio(Common),
}

#[derive(Clone, Copy, ValueEnum)]
enum PresetName {
    Deuteron,
    Be11,
    Alpha,
}

impl PresetName {
    fn key(self) -> &'static str {
        match self {
            PresetName::Deuteron => "deuteron",
            PresetName::Be11 => "be11",
            PresetName::Alpha => "alpha",
        }
    }
}

#[derive(Args)]
#[group(skip)]
struct Common {
    /// Built-in system.
    #[arg(long, value_enum, conflicts_with = "config", required_unless_present = "config")]
    preset: Option<PresetName>,
    /// key = value system description.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Mesh step in fm.
    #[arg(long, value_name = "FM")]
    step: Option<f64>,
    /// Outer mesh radius in fm.
    #[arg(long, value_name = "FM")]
    rmax: Option<f64>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Both)]
    format: Format,
}

#[derive(Args, Clone, Copy)]
struct Sweep {
    /// Lowest scattering energy, MeV.
    #[arg(long, value_name = "MEV", default_value_t = 0.1)]
    emin: f64,
    /// Highest scattering energy, MeV.
    #[arg(long, value_name = "MEV", default_value_t = 20.0)]
    emax: f64,
    /// Energy step in MeV; 0 disables the sweep.
    #[arg(long, value_name = "MEV", default_value_t = 0.1)]
    estep: f64,
    /// Matching radius for the phase shifts, fm.
    #[arg(long, value_name = "FM", default_value_t = susy_pep::observables::DEFAULT_MATCHING_RADIUS)]
    rmatch: f64,
}

const EXIT_NUMERICAL: u8 = 2;
const EXIT_CONFIG: u8 = 3;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(if err.is_numerical() { EXIT_NUMERICAL } else { EXIT_CONFIG })
        }
    }
}
