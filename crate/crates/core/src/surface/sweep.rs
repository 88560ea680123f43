use rayon::prelude::*;
use serde::Serialize;

use super::{orbit_data, region_classify, ModelPoint, RegionLabel, SurfaceKind};
use crate::closed_form::{cdb2_sign, d_sign, DSign};
use crate::error::{Error, Result};

/// One grid sample. `label` is None for inadmissible points, with the reason
/// in `note`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridCell {
    pub xi: f64,
    pub alpha: f64,
    pub label: Option<RegionLabel>,
    pub d_sign: Option<DSign>,
    pub cdb2_sign: Option<i8>,
    pub note: Option<String>,
}

fn cell(surface: SurfaceKind, xi: f64, alpha: f64) -> GridCell {
    let mut out = GridCell { xi, alpha, label: None, d_sign: None, cdb2_sign: None, note: None };
    let res = ModelPoint::new(surface, xi, alpha).and_then(|p| Ok((orbit_data(&p)?, region_classify(&p)?)));
    match res {
        Ok((orbit, label)) => {
            let c = orbit.coeffs;
            out.d_sign = Some(d_sign(c.a, c.b, c.c, c.d));
            out.cdb2_sign = Some(cdb2_sign(c.b, c.c, c.d));
            out.label = Some(label);
        }
        Err(e) => out.note = Some(e.to_string()),
    }
    out
}

/// Region labels at the centres of an nx × na grid over the open window,
/// row-major with α outer and ξ inner. Evaluated in parallel; the order is
/// fixed by the grid.
pub fn sweep_regions(
    surface: SurfaceKind,
    xi_range: (f64, f64),
    alpha_range: (f64, f64),
    nx: usize,
    na: usize,
) -> Result<Vec<GridCell>> {
    for (name, r) in [("xi", xi_range), ("alpha", alpha_range)] {
        if !(r.0.is_finite() && r.1.is_finite() && r.0 < r.1) {
            return Err(Error::InvalidArgument(format!("degenerate {name} range {}:{}", r.0, r.1)));
        }
    }
    if nx == 0 || na == 0 {
        return Err(Error::InvalidArgument("grid needs at least one cell per axis".into()));
    }
    let centre = |r: (f64, f64), n: usize, i: usize| r.0 + (r.1 - r.0) * (i as f64 + 0.5) / n as f64;
    Ok((0..nx * na)
        .into_par_iter()
        .map(|idx| {
            let (ia, ix) = (idx / nx, idx % nx);
            cell(surface, centre(xi_range, nx, ix), centre(alpha_range, na, ia))
        })
        .collect())
}
