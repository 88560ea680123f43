use std::f64::consts::TAU;

use serde::Serialize;

use super::{conformal_jet, potential_base, potential_jet, ModelPoint, SurfaceKind};
use crate::error::{Error, Result};
use crate::maslov::SymplecticPath;
use crate::symplectic::GeneratorMatrix;

const AGREE_RTOL: f64 = 1e-10;
const AGREE_SCALE_TOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Coefficients {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Coefficients {
    pub fn cdb2(&self) -> f64 {
        self.c * self.d + self.b * self.b
    }

    pub fn generator(&self) -> Result<GeneratorMatrix> {
        GeneratorMatrix::new(self.a, self.b, self.c, self.d)
    }
}

/// Values at ξ₀ that feed the coefficients: p, p′, q′, η = pξ², η′, ζ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrbitAux {
    pub p0: f64,
    pub p0_prime: f64,
    pub q0_prime: f64,
    pub eta0: f64,
    pub eta0_prime: f64,
    pub zeta0: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CircularOrbit {
    pub point: ModelPoint,
    pub theta_dot_sq: f64,
    pub period: f64,
    pub coeffs: Coefficients,
    pub aux: OrbitAux,
}

impl CircularOrbit {
    /// Fundamental solution over one period, built from the balanced
    /// generator. Near the poles the raw coefficients span many decades and
    /// the crossing forms become unresolvable; the balanced path has the
    /// same index.
    pub fn index_path(&self, steps: usize) -> Result<SymplecticPath> {
        SymplecticPath::fundamental_solution(self.coeffs.generator()?.balanced(), self.period, steps)
    }
}

/// Coefficients from the jets of p and q alone, valid for any conformal
/// factor. Also returns θ̇² and the magnitude of the largest term in d, which
/// bounds the rounding in d.
pub fn generic_coefficients(point: &ModelPoint) -> (Coefficients, f64, OrbitAux, f64) {
    let xi = point.xi0;
    let p = conformal_jet(point.surface, xi);
    let q = potential_jet(point.surface, xi, point.alpha);
    let eta = p.v * xi * xi;
    let eta1 = p.d1 * xi * xi + 2.0 * p.v * xi;
    let eta2 = p.d2 * xi * xi + 4.0 * p.d1 * xi + 2.0 * p.v;
    let tds = -2.0 * q.d1 / eta1;
    let zeta = eta1.signum() * (-2.0 * q.d1 * eta1).sqrt();
    let terms = [2.0 * q.d1 * eta1 / eta, q.d2, q.d1 * eta2 / eta1];
    let coeffs = Coefficients {
        a: 1.0 / p.v,
        b: zeta / eta,
        c: 1.0 / eta,
        d: terms[0] + terms[1] - terms[2],
    };
    let aux = OrbitAux {
        p0: p.v,
        p0_prime: p.d1,
        q0_prime: q.d1,
        eta0: eta,
        eta0_prime: eta1,
        zeta0: zeta,
    };
    let scale = terms.iter().fold(0.0f64, |m, t| m.max(t.abs()));
    (coeffs, tds, aux, scale)
}

/// The surface-specific closed forms: (a, b, c, d) and θ̇².
pub fn closed_form_coefficients(point: &ModelPoint) -> (Coefficients, f64) {
    let (xi, al) = (point.xi0, point.alpha);
    let x2 = xi * xi;
    let u = potential_base(point.surface, xi);
    match point.surface {
        SurfaceKind::Sphere => {
            let s2 = (1.0 + x2).powi(2);
            let m = 1.0 - x2;
            let f1 = (3.0 * x2 * x2 - 2.0 * x2 + 3.0) * u + (al - 1.0) * xi * m;
            let c = Coefficients {
                a: s2 / 2.0,
                b: (2.0 - 2.0 * x2) / xi * (-al * u.powf(al - 1.0) / (2.0 * xi * m)).sqrt(),
                c: s2 / (2.0 * x2),
                d: al * u.powf(al - 2.0) * f1 / (xi * s2 * m),
            };
            (c, -al * u.powf(al - 1.0) * s2 / (2.0 * xi * m))
        }
        SurfaceKind::Hyperbolic => {
            let m2 = (1.0 - x2).powi(2);
            let s = 1.0 + x2;
            let g1 = (3.0 * x2 * x2 + 2.0 * x2 + 3.0) * u + 2.0 * (al - 1.0) * xi * s;
            let c = Coefficients {
                a: m2 / 2.0,
                b: 2.0 * s / xi * (-al * u.powf(al - 1.0) / (xi * s)).sqrt(),
                c: m2 / (2.0 * x2),
                d: 2.0 * al * u.powf(al - 2.0) * g1 / (xi * m2 * s),
            };
            (c, -al * u.powf(al - 1.0) * m2 / (xi * s))
        }
        SurfaceKind::Euclidean => {
            let pw = xi.powf(al - 2.0);
            let c = Coefficients {
                a: 1.0,
                b: 2.0 / xi * (-al * pw).sqrt(),
                c: 1.0 / x2,
                d: al * (al + 2.0) * pw,
            };
            (c, -al * pw)
        }
    }
}

fn agree(x: f64, y: f64, scale: f64) -> bool {
    (x - y).abs() <= AGREE_RTOL * x.abs().max(y.abs()) + AGREE_SCALE_TOL * scale
}

/// Circular-orbit data at an admissible point. The closed forms are the
/// reported values; they are cross-checked against the generic pipeline.
pub fn orbit_data(point: &ModelPoint) -> Result<CircularOrbit> {
    let point = ModelPoint::new(point.surface, point.xi0, point.alpha)?;
    let (generic, tds_g, aux, d_scale) = generic_coefficients(&point);
    let (closed, tds) = closed_form_coefficients(&point);
    let pairs = [
        ("a", closed.a, generic.a, 0.0),
        ("b", closed.b, generic.b, 0.0),
        ("c", closed.c, generic.c, 0.0),
        ("d", closed.d, generic.d, d_scale),
        ("theta_dot^2", tds, tds_g, 0.0),
    ];
    for (name, x, y, scale) in pairs {
        if !agree(x, y, scale) {
            return Err(Error::SelfCheck(format!(
                "{} at (xi0={}, alpha={}): closed form {name} = {x:e}, generic = {y:e}",
                point.surface, point.xi0, point.alpha
            )));
        }
    }
    Ok(CircularOrbit {
        point,
        theta_dot_sq: tds,
        period: TAU / tds.sqrt(),
        coeffs: closed,
        aux,
    })
}
