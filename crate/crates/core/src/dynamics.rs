//! Time integration: the nonlinear Euler-Lagrange flow of the central-force
//! model, monodromy of the linearized system, Floquet classification, and
//! unit-speed radial geodesics.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::surface::{
    conformal_density, conformal_jet, orbit_data, potential_jet, riemann_distance, ModelPoint, StabilityVerdict,
    SurfaceKind,
};
use crate::symplectic::{inf_norm, matrix_exponential, GeneratorMatrix, SymplecticMatrix};

pub const DEFAULT_STEPS_PER_PERIOD: usize = 2048;

/// Multipliers this far outside the unit circle count as hyperbolic.
pub const HYPERBOLIC_MARGIN: f64 = 1e-3;
/// Powers checked for polynomial growth, and the growth factor that flags it.
pub const GROWTH_POWERS: usize = 64;
pub const GROWTH_FACTOR: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ELState {
    pub xi: f64,
    pub theta: f64,
    pub xi_dot: f64,
    pub theta_dot: f64,
}

impl ELState {
    fn axpy(&self, h: f64, k: &ELState) -> ELState {
        ELState {
            xi: self.xi + h * k.xi,
            theta: self.theta + h * k.theta,
            xi_dot: self.xi_dot + h * k.xi_dot,
            theta_dot: self.theta_dot + h * k.theta_dot,
        }
    }

    pub fn to_array(&self) -> [f64; 4] {
        [self.xi, self.theta, self.xi_dot, self.theta_dot]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<ELState>,
    pub angular_momentum: Vec<f64>,
    pub energy: Vec<f64>,
}

impl Trajectory {
    /// max |ξ(t) − ξ₀| over the run.
    pub fn radial_drift(&self, xi0: f64) -> f64 {
        self.states.iter().map(|s| (s.xi - xi0).abs()).fold(0.0, f64::max)
    }

    /// max |L(t) − L(0)| / |L(0)|, or the absolute drift when L(0) = 0.
    pub fn angular_momentum_drift(&self) -> f64 {
        relative_drift(&self.angular_momentum)
    }

    pub fn energy_drift(&self) -> f64 {
        relative_drift(&self.energy)
    }
}

fn relative_drift(xs: &[f64]) -> f64 {
    let x0 = xs.first().copied().unwrap_or(0.0);
    let scale = if x0 == 0.0 { 1.0 } else { x0.abs() };
    xs.iter().map(|x| (x - x0).abs()).fold(0.0, f64::max) / scale
}

fn in_domain(surface: SurfaceKind, xi: f64) -> bool {
    xi.is_finite() && xi > 0.0 && (surface != SurfaceKind::Hyperbolic || xi < 1.0)
}

fn rhs(surface: SurfaceKind, alpha: f64, s: &ELState) -> ELState {
    let xi = s.xi;
    let p = conformal_jet(surface, xi);
    let q = potential_jet(surface, xi, alpha);
    let eta = p.v * xi * xi;
    let eta1 = p.d1 * xi * xi + 2.0 * p.v * xi;
    let td2 = s.theta_dot * s.theta_dot;
    ELState {
        xi: s.xi_dot,
        theta: s.theta_dot,
        xi_dot: (-0.5 * p.d1 * s.xi_dot * s.xi_dot + 0.5 * p.d1 * xi * xi * td2 + p.v * xi * td2 + q.d1) / p.v,
        theta_dot: -eta1 * s.xi_dot * s.theta_dot / eta,
    }
}

fn invariants(surface: SurfaceKind, alpha: f64, s: &ELState) -> (f64, f64) {
    let p = conformal_jet(surface, s.xi).v;
    let q = potential_jet(surface, s.xi, alpha).v;
    let l = p * s.xi * s.xi * s.theta_dot;
    let e = 0.5 * p * (s.xi_dot * s.xi_dot + s.xi * s.xi * s.theta_dot * s.theta_dot) - q;
    (l, e)
}

/// Initial data of the circular orbit through (ξ₀, θ = 0).
pub fn circular_state(point: &ModelPoint) -> Result<ELState> {
    let o = orbit_data(point)?;
    Ok(ELState { xi: point.xi0, theta: 0.0, xi_dot: 0.0, theta_dot: o.theta_dot_sq.sqrt() })
}

/// Fixed-step RK4 over [0, T]. Leaving the domain stops the run with
/// `EscapedDomain` carrying the last state inside it.
pub fn integrate_el(surface: SurfaceKind, alpha: f64, state0: ELState, period: f64, steps: usize) -> Result<Trajectory> {
    let (traj, escape) = integrate_el_until_escape(surface, alpha, state0, period, steps)?;
    match escape {
        Some(t) => Err(Error::EscapedDomain { t, last: traj.states.last().expect("initial state recorded").to_array() }),
        None => Ok(traj),
    }
}

/// As [`integrate_el`], but an escape ends the run early and returns the
/// trajectory so far with the time of the failed step.
pub fn integrate_el_until_escape(
    surface: SurfaceKind,
    alpha: f64,
    state0: ELState,
    period: f64,
    steps: usize,
) -> Result<(Trajectory, Option<f64>)> {
    if !(period > 0.0 && period.is_finite()) {
        return Err(Error::InvalidArgument(format!("T must be positive, got {period}")));
    }
    if steps == 0 {
        return Err(Error::InvalidArgument("steps must be positive".into()));
    }
    if !(alpha != 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidArgument(format!("alpha must be finite and nonzero, got {alpha}")));
    }
    if !in_domain(surface, state0.xi) || !state0.to_array().iter().all(|x| x.is_finite()) {
        return Err(Error::Domain(format!("initial state {state0:?} outside the {surface} domain")));
    }
    let h = period / steps as f64;
    let f = |s: &ELState| rhs(surface, alpha, s);
    let mut traj = Trajectory {
        times: Vec::with_capacity(steps + 1),
        states: Vec::with_capacity(steps + 1),
        angular_momentum: Vec::with_capacity(steps + 1),
        energy: Vec::with_capacity(steps + 1),
    };
    let push = |t: f64, s: ELState, traj: &mut Trajectory| {
        let (l, e) = invariants(surface, alpha, &s);
        traj.times.push(t);
        traj.states.push(s);
        traj.angular_momentum.push(l);
        traj.energy.push(e);
    };
    let mut s = state0;
    push(0.0, s, &mut traj);
    for i in 0..steps {
        let k1 = f(&s);
        let k2 = f(&s.axpy(0.5 * h, &k1));
        let k3 = f(&s.axpy(0.5 * h, &k2));
        let k4 = f(&s.axpy(h, &k3));
        let next = ELState {
            xi: s.xi + h / 6.0 * (k1.xi + 2.0 * k2.xi + 2.0 * k3.xi + k4.xi),
            theta: s.theta + h / 6.0 * (k1.theta + 2.0 * k2.theta + 2.0 * k3.theta + k4.theta),
            xi_dot: s.xi_dot + h / 6.0 * (k1.xi_dot + 2.0 * k2.xi_dot + 2.0 * k3.xi_dot + k4.xi_dot),
            theta_dot: s.theta_dot + h / 6.0 * (k1.theta_dot + 2.0 * k2.theta_dot + 2.0 * k3.theta_dot + k4.theta_dot),
        };
        let t = (i + 1) as f64 * h;
        if !in_domain(surface, next.xi) || !next.to_array().iter().all(|x| x.is_finite()) {
            return Ok((traj, Some(t)));
        }
        s = next;
        push(t, s, &mut traj);
    }
    Ok((traj, None))
}

/// γ(T) = e^{AT}, certified symplectic relative to ‖γ(T)‖².
pub fn monodromy(gen: &GeneratorMatrix, period: f64) -> Result<SymplecticMatrix> {
    if !(period > 0.0 && period.is_finite()) {
        return Err(Error::InvalidArgument(format!("T must be positive, got {period}")));
    }
    let m = matrix_exponential(gen.matrix(), period)?;
    let tol = 1e-9 * inf_norm(&m).powi(2).max(1.0);
    SymplecticMatrix::new(m, tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum FloquetTag {
    #[serde(rename = "stable")]
    Stable,
    #[serde(rename = "unstable-jordan")]
    UnstableJordan,
    #[serde(rename = "unstable-hyperbolic")]
    UnstableHyperbolic,
}

impl FloquetTag {
    pub fn tag(self) -> &'static str {
        match self {
            Self::Stable => "stable",
            Self::UnstableJordan => "unstable-jordan",
            Self::UnstableHyperbolic => "unstable-hyperbolic",
        }
    }

    /// Polynomial growth covers both Jordan and nilpotent verdicts.
    pub fn compatible_with(self, v: StabilityVerdict) -> bool {
        matches!(
            (self, v),
            (Self::Stable, StabilityVerdict::LinearlyStable)
                | (Self::UnstableJordan, StabilityVerdict::LinearlyUnstableJordan)
                | (Self::UnstableJordan, StabilityVerdict::LinearlyUnstableNilpotent)
                | (Self::UnstableHyperbolic, StabilityVerdict::LinearlyUnstableHyperbolic)
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Floquet {
    pub multipliers: Vec<Complex64>,
    pub spectral_radius: f64,
    pub tag: FloquetTag,
}

/// Roots of λ² − yλ + 1, the pair {λ, 1/λ} with λ + 1/λ = y.
fn reciprocal_pair(y: Complex64) -> [Complex64; 2] {
    let disc = (y * y - 4.0).sqrt();
    [(y + disc) / 2.0, (y - disc) / 2.0]
}

fn multipliers(m: &DMatrix<f64>) -> Vec<Complex64> {
    match m.nrows() {
        2 => reciprocal_pair(Complex64::from(m.trace())).to_vec(),
        4 => {
            // λ⁴ − s₁λ³ + s₂λ² − s₁λ + 1 in y = λ + 1/λ: y² − s₁y + s₂ − 2.
            let s1 = m.trace();
            let s2 = 0.5 * (s1 * s1 - (m * m).trace());
            let ys = reciprocal_pair_sum(s1, s2 - 2.0);
            ys.iter().flat_map(|&y| reciprocal_pair(y)).collect()
        }
        _ => m.complex_eigenvalues().iter().copied().collect(),
    }
}

/// Roots of y² − s y + p.
fn reciprocal_pair_sum(s: f64, p: f64) -> [Complex64; 2] {
    let disc = Complex64::from(s * s - 4.0 * p).sqrt();
    [(s + disc) / 2.0, (s - disc) / 2.0]
}

/// ‖Mⁿ‖∞ for n = 1..=count.
pub fn power_norms(m: &DMatrix<f64>, count: usize) -> Vec<f64> {
    let mut p = m.clone();
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        if i > 0 {
            p = &p * m;
        }
        out.push(inf_norm(&p));
    }
    out
}

/// Multipliers with λ ↔ 1/λ pairing built in, and a stability tag: outside
/// the unit circle is hyperbolic, otherwise growth of the powers decides.
pub fn floquet(m: &SymplecticMatrix) -> Floquet {
    let mat = m.matrix();
    let mults = multipliers(mat);
    let spectral_radius = mults.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let tag = if spectral_radius > 1.0 + HYPERBOLIC_MARGIN {
        FloquetTag::UnstableHyperbolic
    } else {
        let norms = power_norms(mat, GROWTH_POWERS);
        if norms.iter().any(|&x| x > GROWTH_FACTOR * norms[0].max(1.0)) {
            FloquetTag::UnstableJordan
        } else {
            FloquetTag::Stable
        }
    };
    Floquet { multipliers: mults, spectral_radius, tag }
}

/// Largest arc length reachable from the origin along a radial geodesic.
pub fn radial_extent(surface: SurfaceKind, big_r: f64) -> f64 {
    match surface {
        SurfaceKind::Sphere => std::f64::consts::PI * big_r,
        SurfaceKind::Hyperbolic => {
            riemann_distance(surface, big_r * (1.0 - 1e-12), big_r).unwrap_or(f64::INFINITY)
        }
        SurfaceKind::Euclidean => f64::INFINITY,
    }
}

/// Radius r at arc length s along a unit-speed radial geodesic, from
/// μ_R(r)·dr/ds = 1 by RK4.
pub fn radial_geodesic(surface: SurfaceKind, big_r: f64, s: f64) -> Result<f64> {
    if !(big_r > 0.0 && big_r.is_finite()) {
        return Err(Error::InvalidArgument(format!("R must be positive, got {big_r}")));
    }
    let extent = radial_extent(surface, big_r);
    if !(s >= 0.0 && s < extent) {
        return Err(Error::Domain(format!("arc length {s} outside [0, {extent}) on the {surface}")));
    }
    if surface == SurfaceKind::Euclidean || s == 0.0 {
        return Ok(s);
    }
    let steps = ((s / big_r) * 4096.0).ceil().max(64.0) as usize;
    let h = s / steps as f64;
    let f = |r: f64| 1.0 / conformal_density(surface, r, big_r);
    let mut r = 0.0;
    for _ in 0..steps {
        let k1 = f(r);
        let k2 = f(r + 0.5 * h * k1);
        let k3 = f(r + 0.5 * h * k2);
        let k4 = f(r + h * k3);
        r += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    if surface == SurfaceKind::Hyperbolic && r >= big_r {
        return Err(Error::Domain(format!("arc length {s} reaches the boundary r = R")));
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symplectic::{diamond_product, symplectic_defect};
    use std::f64::consts::{PI, TAU};

    #[test]
    fn circular_orbit_stays_circular() {
        for (s, xi, al) in [(SurfaceKind::Euclidean, 1.0, -1.0), (SurfaceKind::Sphere, 2.0, 1.0), (SurfaceKind::Hyperbolic, 0.5, -1.0)] {
            let p = ModelPoint::new(s, xi, al).unwrap();
            let o = orbit_data(&p).unwrap();
            let traj = integrate_el(s, al, circular_state(&p).unwrap(), 3.0 * o.period, 3 * DEFAULT_STEPS_PER_PERIOD).unwrap();
            assert!(traj.radial_drift(xi) <= 1e-6, "{s}");
            assert!(traj.angular_momentum_drift() <= 1e-8, "{s}");
            let turns = traj.states.last().unwrap().theta / TAU;
            assert!((turns - 3.0).abs() < 1e-6);
        }
    }

    #[test]
    fn radial_data_stays_radial() {
        let s0 = ELState { xi: 0.6, theta: 0.3, xi_dot: 0.0, theta_dot: 0.0 };
        let traj = integrate_el(SurfaceKind::Hyperbolic, -1.0, s0, 0.05, 200).unwrap();
        assert!(traj.states.iter().all(|s| s.theta == 0.3 && s.theta_dot == 0.0));
        assert!(traj.states.last().unwrap().xi < 0.6);
    }

    #[test]
    fn escape_is_reported() {
        // Radial fall reaches the centre in finite time.
        let s0 = ELState { xi: 0.3, theta: 0.0, xi_dot: 0.0, theta_dot: 0.0 };
        match integrate_el(SurfaceKind::Hyperbolic, -1.0, s0, 5.0, 2000) {
            Err(Error::EscapedDomain { t, last }) => {
                assert!(t > 0.0 && last[0] > 0.0 && last[0] < 0.3);
            }
            other => panic!("{other:?}"),
        }
        assert!(integrate_el(SurfaceKind::Hyperbolic, -1.0, ELState { xi: 1.2, ..s0 }, 1.0, 10).is_err());
    }

    #[test]
    fn monodromy_examples() {
        let g = GeneratorMatrix::new(1.0, 0.0, 1.0, 1.0).unwrap();
        let m = monodromy(&g, 1.0).unwrap();
        let fq = floquet(&m);
        assert!((fq.spectral_radius - 1f64.exp()).abs() < 1e-9);
        assert_eq!(fq.tag, FloquetTag::UnstableHyperbolic);

        let g = GeneratorMatrix::new(1.0, 2.0, 1.0, -1.0).unwrap();
        let m = monodromy(&g, TAU).unwrap();
        assert!(symplectic_defect(m.matrix()).unwrap() < 1e-9);
        let fq = floquet(&m);
        assert!(fq.multipliers.iter().all(|z| (z.norm() - 1.0).abs() < 1e-6));
        assert_eq!(fq.tag, FloquetTag::UnstableJordan);

        let g = GeneratorMatrix::new(1.0, 2.0, 1.0, -4.0).unwrap();
        let fq = floquet(&monodromy(&g, 1.3).unwrap());
        assert_eq!(fq.tag, FloquetTag::Stable);
    }

    #[test]
    fn floquet_constructed() {
        let id = SymplecticMatrix::new(DMatrix::identity(4, 4), 1e-12).unwrap();
        let fq = floquet(&id);
        assert!(fq.multipliers.iter().all(|z| (z - Complex64::from(1.0)).norm() < 1e-12));
        assert_eq!(fq.tag, FloquetTag::Stable);

        let hyp = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 0.5]);
        let rot = DMatrix::from_row_slice(2, 2, &[1f64.cos(), -1f64.sin(), 1f64.sin(), 1f64.cos()]);
        let m = SymplecticMatrix::new(diamond_product(&hyp, &rot).unwrap(), 1e-12).unwrap();
        let fq = floquet(&m);
        assert!((fq.spectral_radius - 2.0).abs() < 1e-12);
        assert_eq!(fq.tag, FloquetTag::UnstableHyperbolic);
        for z in &fq.multipliers {
            assert!(fq.multipliers.iter().any(|w| (w - z.inv()).norm() < 1e-7));
            assert!(fq.multipliers.iter().any(|w| (w - z.conj()).norm() < 1e-7));
        }
    }

    #[test]
    fn geodesic_examples() {
        assert_eq!(radial_geodesic(SurfaceKind::Sphere, 1.0, 0.0).unwrap(), 0.0);
        assert!((radial_geodesic(SurfaceKind::Sphere, 1.0, PI / 2.0).unwrap() - 1.0).abs() < 1e-7);
        assert_eq!(radial_geodesic(SurfaceKind::Euclidean, 2.0, 3.7).unwrap(), 3.7);
        let r = radial_geodesic(SurfaceKind::Hyperbolic, 2.0, 2.0 * 3f64.ln()).unwrap();
        assert!((r - 1.0).abs() < 1e-7);
        assert!(radial_geodesic(SurfaceKind::Sphere, 1.0, 4.0).is_err());
        assert!(radial_geodesic(SurfaceKind::Hyperbolic, 1.0, 40.0).is_err());
    }
}
