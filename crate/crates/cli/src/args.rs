use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use orbit_index::campaign::{DEFAULT_GUARD, DEFAULT_STEPS};
use orbit_index::dynamics::DEFAULT_STEPS_PER_PERIOD;
use orbit_index::surface::SurfaceKind;

#[derive(Debug, Parser)]
#[command(name = "orbit-index", version, about = "Morse indices of circular orbits on constant-curvature surfaces")]
pub struct Cli {
    /// Worker threads for sweeps and campaigns [default: number of processors]
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Index, region and stability of one circular orbit
    Index(IndexArgs),
    /// Region map over a (xi, alpha) grid, written as CSV and SVG
    Regions(RegionsArgs),
    /// Compare the closed-form index with the numerical engine on random generators
    Verify(VerifyArgs),
    /// Integrate an orbit and report its monodromy
    Orbit(OrbitArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Surface {
    Sphere,
    Hyperbolic,
    Euclidean,
}

impl From<Surface> for SurfaceKind {
    fn from(s: Surface) -> Self {
        match s {
            Surface::Sphere => SurfaceKind::Sphere,
            Surface::Hyperbolic => SurfaceKind::Hyperbolic,
            Surface::Euclidean => SurfaceKind::Euclidean,
        }
    }
}

/// An open interval written `lo:hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Span(pub f64, pub f64);

impl FromStr for Span {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (lo, hi) = s.split_once(':').ok_or_else(|| format!("expected lo:hi, got '{s}'"))?;
        let lo: f64 = lo.trim().parse().map_err(|e| format!("bad lower bound '{lo}': {e}"))?;
        let hi: f64 = hi.trim().parse().map_err(|e| format!("bad upper bound '{hi}': {e}"))?;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(format!("degenerate range {lo}:{hi}"));
        }
        Ok(Span(lo, hi))
    }
}

#[derive(Debug, Args)]
pub struct IndexArgs {
    #[arg(long, value_enum)]
    pub surface: Surface,
    /// Normalized orbit radius r/R
    #[arg(long, allow_negative_numbers = true)]
    pub xi: f64,
    /// Power-law exponent
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: f64,
    /// Also run the numerical crossing count and compare
    #[arg(long)]
    pub verify: bool,
    /// Print JSON (the default)
    #[arg(long, conflicts_with = "csv")]
    pub json: bool,
    /// Print a one-row CSV table instead of JSON
    #[arg(long)]
    pub csv: bool,
    /// Grid steps for the numerical check
    #[arg(long, default_value_t = DEFAULT_STEPS)]
    pub steps: usize,
}

#[derive(Debug, Args)]
pub struct RegionsArgs {
    #[arg(long, value_enum)]
    pub surface: Surface,
    #[arg(long, allow_hyphen_values = true)]
    pub xi_range: Span,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha_range: Span,
    #[arg(long, default_value_t = 200)]
    pub nx: usize,
    #[arg(long, default_value_t = 200)]
    pub na: usize,
    /// Samples per separatrix polyline
    #[arg(long, default_value_t = 256)]
    pub resolution: usize,
    /// Output prefix; writes <out>.csv and <out>.svg
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// Width of the excluded band around d = 0, cd+b^2 = 0 and k edges
    #[arg(long, default_value_t = DEFAULT_GUARD)]
    pub guard: f64,
    /// Grid steps per path
    #[arg(long, default_value_t = DEFAULT_STEPS)]
    pub steps: usize,
    /// Also write the report to this file
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OrbitArgs {
    #[arg(long, value_enum)]
    pub surface: Surface,
    #[arg(long, allow_negative_numbers = true)]
    pub xi: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: f64,
    #[arg(long, default_value_t = 3)]
    pub periods: usize,
    #[arg(long, default_value_t = DEFAULT_STEPS_PER_PERIOD)]
    pub steps_per_period: usize,
    /// Start at rest instead of on the circular orbit
    #[arg(long)]
    pub radial: bool,
    /// Output prefix; writes <out>.csv and <out>.json
    #[arg(long)]
    pub out: PathBuf,
}
