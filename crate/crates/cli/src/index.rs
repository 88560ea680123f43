use anyhow::Result;
use orbit_index::closed_form::{table_iota1, CaseTag};
use orbit_index::maslov::iota1;
use orbit_index::surface::{orbit_data, region_classify, Coefficients, ModelPoint, StabilityVerdict, SurfaceKind};
use serde::Serialize;

use crate::args::IndexArgs;
use crate::style::{paint, YELLOW};
use crate::{EXIT_BOUNDARY, EXIT_FAILED, EXIT_OK};

#[derive(Debug, Serialize)]
pub struct QueryReport {
    pub surface: SurfaceKind,
    pub xi: f64,
    pub alpha: f64,
    pub coeffs: Coefficients,
    pub theta_dot_sq: f64,
    pub period: f64,
    pub case_tag: CaseTag,
    pub k: Option<u32>,
    /// Equal to the Morse index of the orbit.
    pub iota1: i64,
    pub region: String,
    pub on_boundary: Option<&'static str>,
    pub stability: StabilityVerdict,
    pub oracle_iota1: Option<i64>,
    pub agreement: Option<bool>,
}

pub fn query(surface: SurfaceKind, xi: f64, alpha: f64, verify: bool, steps: usize) -> Result<QueryReport> {
    let point = ModelPoint::new(surface, xi, alpha)?;
    let orbit = orbit_data(&point)?;
    let label = region_classify(&point)?;
    let c = orbit.coeffs;
    let (iota, case_tag) = table_iota1(c.a, c.b, c.c, c.d, orbit.period)?;
    let oracle = if verify {
        Some(iota1(&orbit.index_path(steps)?)?.iota1)
    } else {
        None
    };
    Ok(QueryReport {
        surface,
        xi,
        alpha,
        coeffs: c,
        theta_dot_sq: orbit.theta_dot_sq,
        period: orbit.period,
        case_tag,
        k: case_tag.k,
        iota1: iota,
        region: label.name,
        on_boundary: label.boundary,
        stability: label.stability,
        oracle_iota1: oracle,
        agreement: oracle.map(|o| o == iota),
    })
}

fn opt<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

pub fn run(args: &IndexArgs) -> Result<u8> {
    let r = query(args.surface.into(), args.xi, args.alpha, args.verify, args.steps)?;
    if args.csv {
        let mut w = csv::Writer::from_writer(std::io::stdout());
        w.write_record([
            "surface", "xi", "alpha", "a", "b", "c", "d", "period", "k", "iota1", "region", "stability", "oracle_iota1",
            "agreement",
        ])?;
        w.write_record([
            r.surface.to_string(),
            r.xi.to_string(),
            r.alpha.to_string(),
            r.coeffs.a.to_string(),
            r.coeffs.b.to_string(),
            r.coeffs.c.to_string(),
            r.coeffs.d.to_string(),
            r.period.to_string(),
            opt(r.k),
            r.iota1.to_string(),
            r.region.clone(),
            r.stability.tag().to_string(),
            opt(r.oracle_iota1),
            opt(r.agreement),
        ])?;
        w.flush()?;
    } else {
        println!("{}", serde_json::to_string_pretty(&r)?);
    }
    if r.agreement == Some(false) {
        eprintln!("closed form {} disagrees with numerical count {}", r.iota1, opt(r.oracle_iota1));
        return Ok(EXIT_FAILED);
    }
    if let Some(curve) = r.on_boundary {
        eprintln!("{}: point lies on the separatrix {curve}", paint("on-boundary", YELLOW));
        return Ok(EXIT_BOUNDARY);
    }
    Ok(EXIT_OK)
}
