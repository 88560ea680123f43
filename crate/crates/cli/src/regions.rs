use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use orbit_index::closed_form::DSign;
use orbit_index::surface::{boundary_curves, sweep_regions, GridCell, SurfaceKind};
use serde::Serialize;

use crate::args::RegionsArgs;
use crate::svgmap::{render, MapSpec};
use crate::{Usage, EXIT_OK};

#[derive(Serialize)]
struct Row<'a> {
    xi: f64,
    alpha: f64,
    region: &'a str,
    iota1: Option<i64>,
    k: Option<u32>,
    d_sign: Option<&'static str>,
    cdb2_sign: Option<&'static str>,
    stability: Option<&'static str>,
}

fn d_name(s: DSign) -> &'static str {
    match s {
        DSign::Negative => "negative",
        DSign::Zero => "zero",
        DSign::Positive => "positive",
    }
}

fn sign_name(s: i8) -> &'static str {
    match s.signum() {
        -1 => "negative",
        0 => "zero",
        _ => "positive",
    }
}

fn row(c: &GridCell) -> Row<'_> {
    match &c.label {
        Some(l) => Row {
            xi: c.xi,
            alpha: c.alpha,
            region: &l.name,
            iota1: Some(l.index),
            k: l.k,
            d_sign: c.d_sign.map(d_name),
            cdb2_sign: c.cdb2_sign.map(sign_name),
            stability: Some(l.stability.tag()),
        },
        None => Row {
            xi: c.xi,
            alpha: c.alpha,
            region: "inadmissible",
            iota1: None,
            k: None,
            d_sign: None,
            cdb2_sign: None,
            stability: None,
        },
    }
}

pub fn write_csv(path: &Path, cells: &[GridCell]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    for c in cells {
        w.serialize(row(c))?;
    }
    w.flush()?;
    Ok(())
}

fn with_ext(prefix: &Path, ext: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

pub fn run(args: &RegionsArgs) -> Result<u8> {
    if args.nx == 0 || args.na == 0 {
        return Err(Usage("--nx and --na must be positive".into()).into());
    }
    if args.resolution < 16 {
        return Err(Usage(format!("--resolution must be at least 16, got {}", args.resolution)).into());
    }
    let surface: SurfaceKind = args.surface.into();
    let xr = (args.xi_range.0, args.xi_range.1);
    let ar = (args.alpha_range.0, args.alpha_range.1);
    let cells = sweep_regions(surface, xr, ar, args.nx, args.na)?;
    let curves = boundary_curves(surface, xr, ar, args.resolution)?;

    let csv_path = with_ext(&args.out, "csv");
    let svg_path = with_ext(&args.out, "svg");
    write_csv(&csv_path, &cells)?;
    let spec = MapSpec { surface, xi_range: xr, alpha_range: ar, nx: args.nx, na: args.na };
    std::fs::write(&svg_path, render(&spec, &cells, &curves))
        .with_context(|| format!("writing {}", svg_path.display()))?;

    let mut counts: BTreeMap<i64, usize> = BTreeMap::new();
    let mut inadmissible = 0;
    for c in &cells {
        match &c.label {
            Some(l) => *counts.entry(l.index).or_default() += 1,
            None => inadmissible += 1,
        }
    }
    let summary: Vec<String> = counts.iter().map(|(i, n)| format!("{i}:{n}")).collect();
    eprintln!(
        "{} cells ({} inadmissible); index counts {}; wrote {} and {}",
        cells.len(),
        inadmissible,
        summary.join(" "),
        csv_path.display(),
        svg_path.display()
    );
    Ok(EXIT_OK)
}
