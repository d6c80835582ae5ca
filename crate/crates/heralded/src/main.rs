//! Thin command-line front end over [`heralded::scan`] and [`heralded::verify`].
//!
//! Exit codes: 0 on success, 1 when a verification invariant fails (or the
//! verification machinery itself breaks), 2 on bad input — config errors,
//! I/O errors, and parameter regimes the physics or the numerics reject.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use heralded::scan::{self, ScanConfig};
use heralded::verify::{self, Suite, DEFAULT_SEED};
use heralded::Error;

#[derive(Parser)]
#[command(
    name = "heralded",
    version,
    about = "Heralded noiseless amplification/attenuation: parameter scans and verification suites"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a parameter sweep from a TOML config and emit CSV.
    Scan {
        /// Path to the scan config (TOML).
        #[arg(long, value_name = "FILE")]
        config: PathBuf,
        /// Override a config key, e.g. --set sweep.steps=200 or --set delta=-0.6.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
        /// Write the CSV here, overriding the config's `output` (default: stdout).
        #[arg(long, value_name = "FILE")]
        output: Option<PathBuf>,
    },
    /// Run a verification suite and print its machine-readable report.
    Verify {
        /// One of: monotonicity, gaussian-bounds, oracle-equivalence,
        /// representation-triangle, all.
        suite: String,
        /// Seed for the randomized suites (recorded in the report).
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}

fn run(cli: Cli) -> heralded::Result<ExitCode> {
    match cli.command {
        Command::Scan {
            config,
            set,
            output,
        } => {
            let mut config = ScanConfig::from_file(&config)?;
            for assignment in &set {
                config.apply_override(assignment)?;
            }
            if output.is_some() {
                config.output = output;
            }
            let csv = scan::write_scan(&config)?;
            match &config.output {
                Some(path) => eprintln!("wrote {}", path.display()),
                None => print!("{csv}"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { suite, seed } => {
            let suites: Vec<Suite> = if suite == "all" {
                Suite::all().to_vec()
            } else {
                vec![Suite::from_name(&suite)?]
            };
            let mut all_passed = true;
            for suite in suites {
                let report = verify::run_suite(suite, seed)?;
                println!("{}", report.render());
                all_passed &= report.passed();
            }
            Ok(if all_passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
    }
}

/// Maps library errors onto the documented exit codes. Everything the user
/// could have caused — malformed configs, I/O, parameter regimes the physics
/// or the grid numerics reject — is 2; internal consistency breakages
/// surface as 1, like a failed invariant.
fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Config(_)
        | Error::Io(_)
        | Error::InvalidArgument(_)
        | Error::InvalidGain(_)
        | Error::InvalidCovariance(_)
        | Error::UnphysicalOutput { .. }
        | Error::ZeroInputAmplitude(_)
        | Error::DivergentAmplification { .. }
        | Error::GridTooSmall(_)
        | Error::NonIntegrable(_)
        | Error::CutoffUnfaithful { .. }
        | Error::DegenerateHerald(_) => 2,
        Error::SingularMatrix { .. } | Error::CutoffMismatch { .. } | Error::ZeroNorm(_) => 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn user_errors_exit_with_two_and_breakage_with_one() {
        assert_eq!(exit_code_for(&Error::Config("bad".into())), 2);
        assert_eq!(exit_code_for(&Error::InvalidGain(-1.0)), 2);
        assert_eq!(
            exit_code_for(&Error::UnphysicalOutput {
                gain: 2.0,
                max_variance: 3.0,
                bound: 0.83,
            }),
            2
        );
        assert_eq!(exit_code_for(&Error::ZeroNorm(0.0)), 1);
    }
}
