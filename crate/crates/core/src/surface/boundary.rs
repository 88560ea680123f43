use serde::Serialize;

use super::regions::{hyperbolic_g1, hyperbolic_g3, sphere_f1};
use super::{potential_base, ModelPoint, SurfaceKind};
use crate::error::{Error, Result};

/// Highest k band traced on the hyperbolic plane.
pub const MAX_BAND: u32 = 16;

const SCAN_POINTS: usize = 2048;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryCurve {
    pub name: String,
    pub points: Vec<[f64; 2]>,
}

/// The α at which d vanishes on the sphere: f₁(ξ, h(ξ)) = 0.
pub fn sphere_h(xi: f64) -> f64 {
    let x2 = xi * xi;
    1.0 + (3.0 * x2 * x2 - 2.0 * x2 + 3.0) * xi.atan() / (xi * (x2 - 1.0))
}

/// Slope and intercept of the oblique asymptote of h, fitted from two far
/// samples.
pub fn sphere_h_asymptote() -> (f64, f64) {
    let (x1, x2) = (1e4, 2e4);
    let slope = (sphere_h(x2) - sphere_h(x1)) / (x2 - x1);
    (slope, sphere_h(x1) - slope * x1)
}

fn sphere_f2_zero(xi: f64) -> f64 {
    let x2 = xi * xi;
    1.0 + (x2 * x2 - 6.0 * x2 + 1.0) * xi.atan() / (xi * (1.0 - x2))
}

fn sphere_band_edge(xi: f64) -> f64 {
    1.0 + 2.0 * (xi * xi - 1.0) * xi.atan() / xi
}

fn hyperbolic_g1_zero(xi: f64) -> f64 {
    let x2 = xi * xi;
    1.0 - (3.0 * x2 * x2 + 2.0 * x2 + 3.0) * potential_base(SurfaceKind::Hyperbolic, xi) / (2.0 * xi * (1.0 + x2))
}

/// The α at which g₃(ξ, α) = m, solved for α directly.
pub fn hyperbolic_level_alpha(xi: f64, m: f64) -> f64 {
    let x2 = xi * xi;
    let g = potential_base(SurfaceKind::Hyperbolic, xi);
    1.0 + (m * m * (1.0 - x2).powi(2) - (3.0 * x2 * x2 + 2.0 * x2 + 3.0)) * g / (2.0 * xi * (1.0 + x2))
}

/// g₃ extended by −1 where g₁ < 0, so that level searches see a sign change.
fn g3_ext(xi: f64, alpha: f64) -> f64 {
    if hyperbolic_g1(xi, alpha) < 0.0 {
        -1.0
    } else {
        hyperbolic_g3(xi, alpha)
    }
}

/// Outermost ξ ∈ (0,1) with g₃(ξ, α) = m: the upper edge of band k = m − 1.
/// A bracket is grown toward ξ → 1⁻, where g₃ → ∞, then refined by bisection.
pub fn hyperbolic_band_edge(alpha: f64, m: f64) -> Option<f64> {
    let f = |xi: f64| g3_ext(xi, alpha) - m;
    let mut hi = 0.5;
    while f(hi) <= 0.0 {
        hi = 0.5 * (1.0 + hi);
        if 1.0 - hi < 1e-15 {
            return None;
        }
    }
    let at = |j: usize| hi * j as f64 / SCAN_POINTS as f64;
    let j = (1..SCAN_POINTS).rev().find(|&j| f(at(j)) <= 0.0)?;
    let (mut lo, mut hi) = (at(j), at(j + 1));
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Representative ξ for each band k = 0..=kmax at fixed α, or None where the
/// band is empty.
pub fn hyperbolic_ladder(alpha: f64, kmax: u32) -> Vec<(u32, Option<f64>)> {
    // edges[m] solves g₃ = m; m = 0 is the g₁ = 0 curve. A missing lower
    // edge means g₃ already exceeds that level everywhere below.
    let edges: Vec<Option<f64>> = (0..=kmax + 1).map(|m| hyperbolic_band_edge(alpha, m as f64)).collect();
    (0..=kmax)
        .map(|k| {
            let lower = edges[k as usize].unwrap_or(0.0);
            let xi = edges[k as usize + 1].filter(|&u| u > lower).and_then(|u| {
                let mid = 0.5 * (lower + u);
                let ok = hyperbolic_g1(mid, alpha) > 0.0 && hyperbolic_g3(mid, alpha) > k as f64;
                ok.then_some(mid)
            });
            (k, xi)
        })
        .collect()
}

fn check_range(name: &str, r: (f64, f64)) -> Result<()> {
    if r.0.is_finite() && r.1.is_finite() && r.0 < r.1 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("degenerate {name} range {}:{}", r.0, r.1)))
    }
}

fn grid(r: (f64, f64), n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| r.0 + (r.1 - r.0) * i as f64 / (n - 1) as f64)
}

/// Splits a sampled curve into polylines over the runs of kept samples.
fn polylines(name: &str, samples: impl Iterator<Item = Option<[f64; 2]>>) -> Vec<BoundaryCurve> {
    let mut out = Vec::new();
    let mut cur: Vec<[f64; 2]> = Vec::new();
    for s in samples.chain(std::iter::once(None)) {
        match s {
            Some(p) => cur.push(p),
            None if cur.len() >= 2 => out.push(BoundaryCurve { name: name.into(), points: std::mem::take(&mut cur) }),
            None => cur.clear(),
        }
    }
    out
}

/// Sampled separatrices inside the window `xi_range × alpha_range`.
pub fn boundary_curves(
    surface: SurfaceKind,
    xi_range: (f64, f64),
    alpha_range: (f64, f64),
    resolution: usize,
) -> Result<Vec<BoundaryCurve>> {
    check_range("xi", xi_range)?;
    check_range("alpha", alpha_range)?;
    if resolution < 16 {
        return Err(Error::InvalidArgument(format!("resolution must be at least 16, got {resolution}")));
    }
    let inside = |xi: f64, al: f64| {
        xi > xi_range.0
            && xi < xi_range.1
            && al > alpha_range.0
            && al < alpha_range.1
            && ModelPoint::new(surface, xi, al).is_ok()
    };
    let mut out = Vec::new();
    match surface {
        SurfaceKind::Sphere => {
            let curves: [(&str, fn(f64) -> f64, bool); 3] = [
                ("f1=0", sphere_h, false),
                ("f2=0", sphere_f2_zero, true),
                ("f3=1", sphere_band_edge, true),
            ];
            for (name, alpha_of, needs_plus) in curves {
                let samples = grid(xi_range, resolution).map(|xi| {
                    let al = alpha_of(xi);
                    let keep = inside(xi, al) && (!needs_plus || sphere_f1(xi, al) > 0.0);
                    keep.then_some([xi, al])
                });
                out.extend(polylines(name, samples));
            }
        }
        SurfaceKind::Hyperbolic => {
            let samples = grid(xi_range, resolution).map(|xi| {
                let al = hyperbolic_g1_zero(xi);
                inside(xi, al).then_some([xi, al])
            });
            out.extend(polylines("g1=0", samples));
            for m in 1..=MAX_BAND + 1 {
                let samples = grid(alpha_range, resolution).map(|al| {
                    let xi = hyperbolic_band_edge(al, m as f64)?;
                    inside(xi, al).then_some([xi, al])
                });
                out.extend(polylines(&format!("g3={m}"), samples));
            }
        }
        SurfaceKind::Euclidean => {
            for al in [-2.0, -1.0] {
                if al > alpha_range.0 && al < alpha_range.1 {
                    let lo = xi_range.0.max(0.0);
                    if lo < xi_range.1 {
                        out.push(BoundaryCurve {
                            name: format!("alpha={al}"),
                            points: vec![[lo, al], [xi_range.1, al]],
                        });
                    }
                }
            }
        }
    }
    Ok(out)
}
