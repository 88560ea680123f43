mod args;
mod index;
mod orbit;
mod regions;
mod style;
mod svgmap;
mod verify;

use std::fmt;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILED: u8 = 1;
pub const EXIT_INADMISSIBLE: u8 = 2;
pub const EXIT_BOUNDARY: u8 = 3;
pub const EXIT_USAGE: u8 = 64;

/// A bad invocation that clap itself cannot detect.
#[derive(Debug)]
pub struct Usage(pub String);

impl fmt::Display for Usage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<Usage>().is_some() {
        return EXIT_USAGE;
    }
    match err.downcast_ref::<orbit_index::Error>() {
        Some(orbit_index::Error::Inadmissible(_) | orbit_index::Error::Domain(_)) => EXIT_INADMISSIBLE,
        Some(orbit_index::Error::InvalidArgument(_)) => EXIT_USAGE,
        _ => EXIT_FAILED,
    }
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(Usage("--jobs must be at least 1".into()).into());
        }
        rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global()?;
    }
    match cli.command {
        Command::Index(a) => index::run(&a),
        Command::Regions(a) => regions::run(&a),
        Command::Verify(a) => verify::run(&a),
        Command::Orbit(a) => orbit::run(&a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("{}: {e:#}", style::paint("error", style::RED));
            ExitCode::from(exit_code(&e))
        }
    }
}
