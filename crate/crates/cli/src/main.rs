use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use integrable_cli::{emit_report, parse_scenario, run_scenario, Overrides};

/// Exit status for unreadable or invalid scenarios.
const USAGE_FAILURE: u8 = 2;

#[derive(Parser)]
#[command(name = "integrable", version, about = "Run integrable-systems verification scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario; exits 0 iff every check passes.
    Run {
        scenario: PathBuf,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Override the solver tolerance.
        #[arg(long)]
        tolerance: Option<f64>,
        /// Override the scenario seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Record wall-clock duration (the report is then no longer reproducible).
        #[arg(long)]
        timing: bool,
    },
    /// Parse and validate a scenario without running it.
    Validate { scenario: PathBuf },
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Validate { scenario } => match parse_scenario(&scenario) {
            Ok(s) => {
                println!("{}: valid {:?} scenario", scenario.display(), s.kind);
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("{e}");
                ExitCode::from(USAGE_FAILURE)
            }
        },
        Command::Run {
            scenario,
            report,
            tolerance,
            seed,
            timing,
        } => {
            let started = Instant::now();
            let mut parsed = match parse_scenario(&scenario) {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("{e}");
                    return ExitCode::from(USAGE_FAILURE);
                }
            };
            if let Err(e) = (Overrides { tolerance, seed }).apply(&mut parsed) {
                eprintln!("{e}");
                return ExitCode::from(USAGE_FAILURE);
            }
            let mut rep = run_scenario(&parsed);
            if timing {
                rep.duration_ms = Some(started.elapsed().as_millis() as u64);
            }
            let written = match &report {
                Some(path) => emit_report(&rep, path),
                None => rep.to_json().map(|s| print!("{s}")),
            };
            if let Err(e) = written {
                eprintln!("{e}");
                return ExitCode::from(USAGE_FAILURE);
            }
            for c in rep.checks.iter().filter(|c| !c.passed) {
                eprintln!("FAIL {}{}", c.name, c.error.as_ref().map(|e| format!(": {e}")).unwrap_or_default());
            }
            if rep.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
