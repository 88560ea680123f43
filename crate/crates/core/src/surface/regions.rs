use serde::Serialize;

use super::{orbit_data, potential_base, ModelPoint, SurfaceKind};
use crate::closed_form::{cdb2_sign, d_sign, k_from_turns, table_iota1, DSign};
use crate::error::{Error, Result};

use super::Coefficients;

/// Separatrix functions within this absolute distance of zero count as on
/// the curve.
pub const BOUNDARY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum StabilityVerdict {
    #[serde(rename = "stable")]
    LinearlyStable,
    #[serde(rename = "unstable-jordan")]
    LinearlyUnstableJordan,
    #[serde(rename = "unstable-hyperbolic")]
    LinearlyUnstableHyperbolic,
    #[serde(rename = "unstable-nilpotent")]
    LinearlyUnstableNilpotent,
}

impl StabilityVerdict {
    pub fn tag(self) -> &'static str {
        match self {
            Self::LinearlyStable => "stable",
            Self::LinearlyUnstableJordan => "unstable-jordan",
            Self::LinearlyUnstableHyperbolic => "unstable-hyperbolic",
            Self::LinearlyUnstableNilpotent => "unstable-nilpotent",
        }
    }

    pub fn is_stable(self) -> bool {
        self == Self::LinearlyStable
    }
}

pub fn stability_verdict(c: &Coefficients) -> Result<StabilityVerdict> {
    if !(c.a > 0.0) {
        return Err(Error::InvalidArgument(format!("a must be positive, got {}", c.a)));
    }
    Ok(match d_sign(c.a, c.b, c.c, c.d) {
        DSign::Negative if cdb2_sign(c.b, c.c, c.d) == 0 => StabilityVerdict::LinearlyStable,
        DSign::Negative => StabilityVerdict::LinearlyUnstableJordan,
        DSign::Positive => StabilityVerdict::LinearlyUnstableHyperbolic,
        DSign::Zero => StabilityVerdict::LinearlyUnstableNilpotent,
    })
}

/// (3ξ⁴−2ξ²+3)·arctan ξ + (α−1)ξ(1−ξ²); d has the opposite sign.
pub fn sphere_f1(xi: f64, alpha: f64) -> f64 {
    let x2 = xi * xi;
    (3.0 * x2 * x2 - 2.0 * x2 + 3.0) * xi.atan() + (alpha - 1.0) * xi * (1.0 - x2)
}

/// (ξ⁴−6ξ²+1)·arctan ξ − (α−1)ξ(1−ξ²); same sign as cd + b².
pub fn sphere_f2(xi: f64, alpha: f64) -> f64 {
    let x2 = xi * xi;
    (x2 * x2 - 6.0 * x2 + 1.0) * xi.atan() - (alpha - 1.0) * xi * (1.0 - x2)
}

/// Turns √(−ad)T/2π on the sphere; defined where f₁ ≥ 0.
pub fn sphere_f3(xi: f64, alpha: f64) -> f64 {
    (sphere_f1(xi, alpha) / (xi.atan() * (1.0 + xi * xi).powi(2))).sqrt()
}

fn hyp_log(xi: f64) -> f64 {
    potential_base(SurfaceKind::Hyperbolic, xi)
}

pub fn hyperbolic_g1(xi: f64, alpha: f64) -> f64 {
    let x2 = xi * xi;
    (3.0 * x2 * x2 + 2.0 * x2 + 3.0) * hyp_log(xi) + 2.0 * (alpha - 1.0) * xi * (1.0 + x2)
}

pub fn hyperbolic_g2(xi: f64, alpha: f64) -> f64 {
    let x2 = xi * xi;
    (x2 * x2 + 6.0 * x2 + 1.0) * hyp_log(xi) - 2.0 * (alpha - 1.0) * xi * (1.0 + x2)
}

pub fn hyperbolic_g3(xi: f64, alpha: f64) -> f64 {
    (hyperbolic_g1(xi, alpha) / ((1.0 - xi * xi).powi(2) * hyp_log(xi))).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionLabel {
    pub name: String,
    pub index: i64,
    pub k: Option<u32>,
    pub stability: StabilityVerdict,
    /// The separatrix the point lies on, if any.
    pub boundary: Option<&'static str>,
}

fn sign_char(v: f64) -> char {
    if v.abs() <= BOUNDARY_TOL {
        '0'
    } else if v > 0.0 {
        '+'
    } else {
        '-'
    }
}

/// Name, index, k and boundary from the separatrix functions alone.
fn label_parts(p: &ModelPoint) -> (String, i64, Option<u32>, Option<&'static str>) {
    let (xi, al) = (p.xi0, p.alpha);
    match p.surface {
        SurfaceKind::Sphere => {
            let w = if xi > 1.0 { 1 } else { 2 };
            let f1 = sphere_f1(xi, al);
            match sign_char(f1) {
                '0' => (format!("Omega{w}^0"), 0, None, Some("f1=0")),
                '-' => (format!("Omega{w}^-"), 0, None, None),
                _ => {
                    let k = k_from_turns(sphere_f3(xi, al));
                    let s = sign_char(sphere_f2(xi, al));
                    let index = 2 * k as i64 + i64::from(s == '-');
                    let boundary = (s == '0').then_some("f2=0");
                    (format!("Omega{w},{k}^{{+,{s}}}"), index, Some(k), boundary)
                }
            }
        }
        SurfaceKind::Hyperbolic => match sign_char(hyperbolic_g1(xi, al)) {
            '0' => ("Omega3^0".into(), 0, None, Some("g1=0")),
            '-' => ("Omega3^-".into(), 0, None, None),
            _ => {
                let k = k_from_turns(hyperbolic_g3(xi, al));
                (format!("Omega3,{k}^+"), 2 * k as i64, Some(k), None)
            }
        },
        SurfaceKind::Euclidean => match sign_char(al + 2.0) {
            '0' => ("E^0".into(), 0, None, Some("alpha=-2")),
            '-' => ("E^-".into(), 0, None, None),
            _ => {
                let k = k_from_turns((al + 2.0).sqrt());
                (format!("E,{k}^+"), 2 * k as i64, Some(k), None)
            }
        },
    }
}

/// Region of the parameter plane containing the point. Off the separatrices
/// the attached index is checked against the case table on the orbit's own
/// coefficients.
pub fn region_classify(point: &ModelPoint) -> Result<RegionLabel> {
    let orbit = orbit_data(point)?;
    let (name, index, k, boundary) = label_parts(&orbit.point);
    let c = orbit.coeffs;
    if boundary.is_none() {
        let (table, _) = table_iota1(c.a, c.b, c.c, c.d, orbit.period)?;
        if table != index {
            return Err(Error::SelfCheck(format!(
                "{} (xi0={}, alpha={}): region {name} carries {index}, case table gives {table}",
                point.surface, point.xi0, point.alpha
            )));
        }
    }
    if point.surface == SurfaceKind::Hyperbolic && hyperbolic_g2(point.xi0, point.alpha) <= 0.0 {
        return Err(Error::SelfCheck(format!("g2 <= 0 at xi0={}, alpha={}", point.xi0, point.alpha)));
    }
    Ok(RegionLabel {
        name,
        index,
        k,
        stability: stability_verdict(&c)?,
        boundary,
    })
}
