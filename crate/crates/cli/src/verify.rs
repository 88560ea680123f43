use std::time::Instant;

use anyhow::Result;
use orbit_index::campaign::run_campaign;

use crate::args::VerifyArgs;
use crate::style::{paint, GREEN, RED};
use crate::{Usage, EXIT_FAILED, EXIT_OK};

pub fn run(args: &VerifyArgs) -> Result<u8> {
    if !(args.guard >= 0.0 && args.guard.is_finite()) {
        return Err(Usage(format!("--guard must be a non-negative number, got {}", args.guard)).into());
    }
    if args.steps < 64 {
        return Err(Usage(format!("--steps must be at least 64, got {}", args.steps)).into());
    }
    let start = Instant::now();
    let report = run_campaign(args.samples, args.seed, args.guard, args.steps);
    let elapsed = start.elapsed().as_secs_f64();
    let json = serde_json::to_string_pretty(&report)?;
    println!("{json}");
    if let Some(path) = &args.out {
        std::fs::write(path, format!("{json}\n"))?;
    }
    let verdict = if report.passed() { paint("agree", GREEN) } else { paint("DISAGREE", RED) };
    eprintln!(
        "{verdict}: {}/{} admissible samples ({} drawn) in {elapsed:.2} s",
        report.agreements, report.admissible, report.total
    );
    Ok(if report.passed() { EXIT_OK } else { EXIT_FAILED })
}
