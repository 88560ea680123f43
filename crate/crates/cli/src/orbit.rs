use std::path::PathBuf;

use anyhow::{Context, Result};
use orbit_index::dynamics::{circular_state, floquet, integrate_el_until_escape, monodromy, ELState, Trajectory};
use orbit_index::surface::{orbit_data, stability_verdict, ModelPoint, SurfaceKind};
use serde::Serialize;

use crate::args::OrbitArgs;
use crate::style::{paint, YELLOW};
use crate::{Usage, EXIT_OK};

#[derive(Debug, Serialize)]
pub struct OrbitReport {
    pub surface: SurfaceKind,
    pub xi: f64,
    pub alpha: f64,
    pub period: f64,
    pub periods: usize,
    pub steps_per_period: usize,
    pub radial_start: bool,
    /// Floquet multipliers as [re, im].
    pub multipliers: Vec<[f64; 2]>,
    pub spectral_radius: f64,
    pub floquet_tag: &'static str,
    pub stability: &'static str,
    pub tags_consistent: bool,
    pub radial_drift: f64,
    pub angular_momentum_drift: f64,
    pub energy_drift: f64,
    pub escaped_at: Option<f64>,
}

#[derive(Serialize)]
struct Row {
    t: f64,
    xi: f64,
    theta: f64,
    xidot: f64,
    thetadot: f64,
    angmom: f64,
}

fn write_trajectory(path: &PathBuf, traj: &Trajectory) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    for ((t, s), l) in traj.times.iter().zip(&traj.states).zip(&traj.angular_momentum) {
        w.serialize(Row { t: *t, xi: s.xi, theta: s.theta, xidot: s.xi_dot, thetadot: s.theta_dot, angmom: *l })?;
    }
    w.flush()?;
    Ok(())
}

pub fn run(args: &OrbitArgs) -> Result<u8> {
    if args.periods == 0 || args.steps_per_period == 0 {
        return Err(Usage("--periods and --steps-per-period must be positive".into()).into());
    }
    let surface: SurfaceKind = args.surface.into();
    let point = ModelPoint::new(surface, args.xi, args.alpha)?;
    let orbit = orbit_data(&point)?;
    let state0 = if args.radial {
        ELState { xi: args.xi, theta: 0.0, xi_dot: 0.0, theta_dot: 0.0 }
    } else {
        circular_state(&point)?
    };
    let total = orbit.period * args.periods as f64;
    let (traj, escaped_at) =
        integrate_el_until_escape(surface, args.alpha, state0, total, args.periods * args.steps_per_period)?;

    let gen = orbit.coeffs.generator()?;
    let fq = floquet(&monodromy(&gen, orbit.period)?);
    let verdict = stability_verdict(&orbit.coeffs)?;
    let report = OrbitReport {
        surface,
        xi: args.xi,
        alpha: args.alpha,
        period: orbit.period,
        periods: args.periods,
        steps_per_period: args.steps_per_period,
        radial_start: args.radial,
        multipliers: fq.multipliers.iter().map(|z| [z.re, z.im]).collect(),
        spectral_radius: fq.spectral_radius,
        floquet_tag: fq.tag.tag(),
        stability: verdict.tag(),
        tags_consistent: fq.tag.compatible_with(verdict),
        radial_drift: traj.radial_drift(args.xi),
        angular_momentum_drift: traj.angular_momentum_drift(),
        energy_drift: traj.energy_drift(),
        escaped_at,
    };

    let mut csv_path = args.out.clone().into_os_string();
    csv_path.push(".csv");
    let mut json_path = args.out.clone().into_os_string();
    json_path.push(".json");
    write_trajectory(&PathBuf::from(csv_path), &traj)?;
    let json = serde_json::to_string_pretty(&report)?;
    std::fs::write(PathBuf::from(&json_path), format!("{json}\n"))?;
    println!("{json}");
    if let Some(t) = escaped_at {
        eprintln!("{}: left the domain at t = {t}", paint("escaped", YELLOW));
    }
    Ok(EXIT_OK)
}
