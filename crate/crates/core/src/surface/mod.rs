//! Power-law central forces on the sphere, the hyperbolic plane and the
//! Euclidean plane, in normalized units (radius ξ = r/R, rescaled time).
//!
//! Conformal factors and potentials:
//! - sphere: p = 2/(1+ξ²)², q = (arctan ξ)^α
//! - hyperbolic: p = 2/(1−ξ²)², q = (ln((1+ξ)/(1−ξ)))^α
//! - Euclidean: p = 1, q = ξ^α

mod boundary;
mod distance;
mod orbit;
mod regions;
mod sweep;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};

pub use boundary::{
    boundary_curves, hyperbolic_band_edge, hyperbolic_ladder, hyperbolic_level_alpha, sphere_h, sphere_h_asymptote,
    BoundaryCurve, MAX_BAND,
};
pub use distance::{conformal_density, riemann_distance, riemann_distance_quadrature};
pub use orbit::{closed_form_coefficients, generic_coefficients, orbit_data, CircularOrbit, Coefficients, OrbitAux};
pub use regions::{
    hyperbolic_g1, hyperbolic_g2, hyperbolic_g3, region_classify, sphere_f1, sphere_f2, sphere_f3,
    stability_verdict, RegionLabel, StabilityVerdict, BOUNDARY_TOL,
};
pub use sweep::{sweep_regions, GridCell};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SurfaceKind {
    Sphere,
    Hyperbolic,
    Euclidean,
}

impl SurfaceKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Sphere => "sphere",
            Self::Hyperbolic => "hyperbolic",
            Self::Euclidean => "euclidean",
        }
    }
}

impl fmt::Display for SurfaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SurfaceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sphere" => Ok(Self::Sphere),
            "hyperbolic" => Ok(Self::Hyperbolic),
            "euclidean" => Ok(Self::Euclidean),
            _ => Err(Error::InvalidArgument(format!("unknown surface '{s}'"))),
        }
    }
}

/// Value and first two derivatives of a radial function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub v: f64,
    pub d1: f64,
    pub d2: f64,
}

fn check_radius(surface: SurfaceKind, xi: f64, allow_zero: bool) -> Result<()> {
    let ok = xi.is_finite()
        && if allow_zero { xi >= 0.0 } else { xi > 0.0 }
        && (surface != SurfaceKind::Hyperbolic || xi < 1.0);
    if ok {
        Ok(())
    } else {
        Err(Error::Domain(format!("xi = {xi} outside the {surface} domain")))
    }
}

/// arctan ξ, ln((1+ξ)/(1−ξ)) or ξ: the base of the power-law potential.
pub(crate) fn potential_base(surface: SurfaceKind, xi: f64) -> f64 {
    match surface {
        SurfaceKind::Sphere => xi.atan(),
        SurfaceKind::Hyperbolic => ((1.0 + xi) / (1.0 - xi)).ln(),
        SurfaceKind::Euclidean => xi,
    }
}

pub fn conformal_factor(surface: SurfaceKind, xi: f64) -> Result<f64> {
    check_radius(surface, xi, true)?;
    Ok(conformal_jet(surface, xi).v)
}

pub fn potential(surface: SurfaceKind, xi: f64, alpha: f64) -> Result<f64> {
    check_radius(surface, xi, false)?;
    Ok(potential_base(surface, xi).powf(alpha))
}

pub fn conformal_jet(surface: SurfaceKind, xi: f64) -> Jet {
    let x2 = xi * xi;
    match surface {
        SurfaceKind::Sphere => {
            let s = 1.0 + x2;
            Jet {
                v: 2.0 / (s * s),
                d1: -8.0 * xi / s.powi(3),
                d2: 8.0 * (5.0 * x2 - 1.0) / s.powi(4),
            }
        }
        SurfaceKind::Hyperbolic => {
            let s = 1.0 - x2;
            Jet {
                v: 2.0 / (s * s),
                d1: 8.0 * xi / s.powi(3),
                d2: (8.0 + 40.0 * x2) / s.powi(4),
            }
        }
        SurfaceKind::Euclidean => Jet { v: 1.0, d1: 0.0, d2: 0.0 },
    }
}

pub fn potential_jet(surface: SurfaceKind, xi: f64, alpha: f64) -> Jet {
    let u = potential_base(surface, xi);
    let (u1, u2) = match surface {
        SurfaceKind::Sphere => {
            let s = 1.0 + xi * xi;
            (1.0 / s, -2.0 * xi / (s * s))
        }
        SurfaceKind::Hyperbolic => {
            let s = 1.0 - xi * xi;
            (2.0 / s, 4.0 * xi / (s * s))
        }
        SurfaceKind::Euclidean => (1.0, 0.0),
    };
    let v = u.powf(alpha);
    let d1 = alpha * u.powf(alpha - 1.0) * u1;
    let d2 = alpha * (alpha - 1.0) * u.powf(alpha - 2.0) * u1 * u1 + alpha * u.powf(alpha - 1.0) * u2;
    Jet { v, d1, d2 }
}

/// A parameter point (ξ₀, α) on a surface, checked against the admissible
/// ranges for circular orbits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelPoint {
    pub surface: SurfaceKind,
    pub xi0: f64,
    pub alpha: f64,
}

impl ModelPoint {
    pub fn new(surface: SurfaceKind, xi0: f64, alpha: f64) -> Result<Self> {
        let bad = |why: &str| Err(Error::Inadmissible(format!("{surface} (xi0={xi0}, alpha={alpha}): {why}")));
        if !xi0.is_finite() || !alpha.is_finite() {
            return bad("non-finite input");
        }
        if xi0 <= 0.0 {
            return bad("xi0 must be positive");
        }
        if alpha == 0.0 {
            return bad("alpha must be nonzero");
        }
        match surface {
            SurfaceKind::Sphere if alpha > 0.0 && xi0 <= 1.0 => return bad("alpha > 0 needs xi0 > 1"),
            SurfaceKind::Sphere if alpha < 0.0 && xi0 >= 1.0 => return bad("alpha < 0 needs xi0 in (0,1)"),
            SurfaceKind::Hyperbolic if xi0 >= 1.0 => return bad("xi0 must lie in (0,1)"),
            SurfaceKind::Hyperbolic | SurfaceKind::Euclidean if alpha > 0.0 => return bad("alpha must be negative"),
            _ => {}
        }
        let p = conformal_jet(surface, xi0);
        let q = potential_jet(surface, xi0, alpha);
        let eta_prime = p.d1 * xi0 * xi0 + 2.0 * p.v * xi0;
        let tds = -2.0 * q.d1 / eta_prime;
        if !(tds > 0.0 && tds.is_finite()) {
            return bad("no circular orbit (theta_dot^2 <= 0)");
        }
        Ok(Self { surface, xi0, alpha })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn factor_and_potential_examples() {
        assert_eq!(conformal_factor(SurfaceKind::Sphere, 1.0).unwrap(), 0.5);
        let q = potential(SurfaceKind::Sphere, 1.0, 2.0).unwrap();
        assert!((q - (PI / 4.0).powi(2)).abs() < 1e-15);
        let q = potential(SurfaceKind::Hyperbolic, 0.5, -1.0).unwrap();
        assert!((q - 1.0 / 3f64.ln()).abs() < 1e-15);
        for xi in [0.0, 0.3, 7.0] {
            assert_eq!(conformal_factor(SurfaceKind::Euclidean, xi).unwrap(), 1.0);
        }
        assert!(conformal_factor(SurfaceKind::Hyperbolic, 1.0).is_err());
        assert!(potential(SurfaceKind::Sphere, 0.0, 1.0).is_err());
    }

    #[test]
    fn jets_match_finite_differences() {
        let h = 1e-4;
        for (s, xi) in [(SurfaceKind::Sphere, 0.7), (SurfaceKind::Sphere, 2.3), (SurfaceKind::Hyperbolic, 0.4), (SurfaceKind::Euclidean, 1.7)] {
            for alpha in [-1.5, 0.7, 2.0] {
                let f = |x: f64| potential_jet(s, x, alpha).v;
                let g = |x: f64| conformal_jet(s, x).v;
                for (jet, fun) in [(potential_jet(s, xi, alpha), &f as &dyn Fn(f64) -> f64), (conformal_jet(s, xi), &g)] {
                    let d1 = (fun(xi + h) - fun(xi - h)) / (2.0 * h);
                    let d2 = (fun(xi + h) - 2.0 * fun(xi) + fun(xi - h)) / (h * h);
                    assert!((jet.d1 - d1).abs() < 1e-6 * d1.abs().max(1.0), "{s} {alpha}");
                    assert!((jet.d2 - d2).abs() < 1e-4 * d2.abs().max(1.0), "{s} {alpha}");
                }
            }
        }
    }

    #[test]
    fn admissibility() {
        assert!(ModelPoint::new(SurfaceKind::Sphere, 2.0, 1.0).is_ok());
        assert!(ModelPoint::new(SurfaceKind::Sphere, 0.5, -1.0).is_ok());
        assert!(ModelPoint::new(SurfaceKind::Sphere, 0.5, 1.0).is_err());
        assert!(ModelPoint::new(SurfaceKind::Sphere, 1.0, -1.0).is_err());
        assert!(ModelPoint::new(SurfaceKind::Hyperbolic, 0.5, -1.0).is_ok());
        assert!(ModelPoint::new(SurfaceKind::Hyperbolic, 1.2, -1.0).is_err());
        assert!(ModelPoint::new(SurfaceKind::Hyperbolic, 0.5, 1.0).is_err());
        assert!(ModelPoint::new(SurfaceKind::Euclidean, 3.0, -0.5).is_ok());
        assert!(ModelPoint::new(SurfaceKind::Euclidean, 3.0, 0.5).is_err());
        assert!(ModelPoint::new(SurfaceKind::Euclidean, 3.0, 0.0).is_err());
        match ModelPoint::new(SurfaceKind::Sphere, 0.5, 2.0) {
            Err(Error::Inadmissible(msg)) => assert!(msg.contains("xi0 > 1")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn parse_surface() {
        assert_eq!("Sphere".parse::<SurfaceKind>().unwrap(), SurfaceKind::Sphere);
        assert!("torus".parse::<SurfaceKind>().is_err());
    }
}
