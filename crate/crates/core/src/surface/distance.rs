use super::SurfaceKind;
use crate::error::{Error, Result};

fn check(surface: SurfaceKind, r: f64, big_r: f64) -> Result<()> {
    if !(big_r > 0.0 && big_r.is_finite()) {
        return Err(Error::InvalidArgument(format!("R must be positive, got {big_r}")));
    }
    if !(r >= 0.0 && r.is_finite()) {
        return Err(Error::Domain(format!("r must be non-negative, got {r}")));
    }
    if surface == SurfaceKind::Hyperbolic && r >= big_r {
        return Err(Error::Domain(format!("r = {r} must stay below R = {big_r} on the hyperbolic plane")));
    }
    Ok(())
}

/// Length density μ_R(r) of the radial line: 2R²/(R² ± r²), or 1 when flat.
pub fn conformal_density(surface: SurfaceKind, r: f64, big_r: f64) -> f64 {
    let r2 = big_r * big_r;
    match surface {
        SurfaceKind::Sphere => 2.0 * r2 / (r2 + r * r),
        SurfaceKind::Hyperbolic => 2.0 * r2 / (r2 - r * r),
        SurfaceKind::Euclidean => 1.0,
    }
}

/// Distance from the origin to radius r.
pub fn riemann_distance(surface: SurfaceKind, r: f64, big_r: f64) -> Result<f64> {
    check(surface, r, big_r)?;
    Ok(match surface {
        SurfaceKind::Sphere => 2.0 * big_r * (r / big_r).atan(),
        SurfaceKind::Hyperbolic => big_r * ((big_r + r) / (big_r - r)).ln(),
        SurfaceKind::Euclidean => r,
    })
}

/// The same distance by double-exponential quadrature of μ_R over [0, r].
pub fn riemann_distance_quadrature(surface: SurfaceKind, r: f64, big_r: f64) -> Result<f64> {
    check(surface, r, big_r)?;
    if r == 0.0 {
        return Ok(0.0);
    }
    let out = quadrature::integrate(|x| conformal_density(surface, x, big_r), 0.0, r, 1e-13 * r.max(big_r));
    Ok(out.integral)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn examples() {
        for big_r in [0.5, 1.0, 3.0] {
            let s = riemann_distance(SurfaceKind::Sphere, big_r, big_r).unwrap();
            assert!((s - PI * big_r / 2.0).abs() < 1e-14 * big_r);
            let h = riemann_distance(SurfaceKind::Hyperbolic, big_r / 2.0, big_r).unwrap();
            assert!((h - big_r * 3f64.ln()).abs() < 1e-14 * big_r);
        }
        assert_eq!(riemann_distance(SurfaceKind::Euclidean, 2.5, 1.0).unwrap(), 2.5);
        assert!(riemann_distance(SurfaceKind::Hyperbolic, 1.0, 1.0).is_err());
        assert!(riemann_distance(SurfaceKind::Sphere, 1.0, 0.0).is_err());
    }

    #[test]
    fn quadrature_matches_closed_form() {
        for (s, r) in [(SurfaceKind::Sphere, 7.0), (SurfaceKind::Hyperbolic, 0.99), (SurfaceKind::Euclidean, 3.0)] {
            let exact = riemann_distance(s, r, 1.0).unwrap();
            let quad = riemann_distance_quadrature(s, r, 1.0).unwrap();
            assert!((exact - quad).abs() <= 1e-8 * exact, "{s}: {exact} vs {quad}");
        }
    }
}
