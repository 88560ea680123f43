use std::f64::consts::TAU;

use nalgebra::DMatrix;
use serde::Serialize;

use super::lagrangian::{crossing_form_matrix, inertia, kernel_coords, Track, Tracker};
use super::path::SymplecticPath;
use crate::error::{Error, Result};

/// Default singular-value threshold for kernels of γ(t) − I.
pub const KERNEL_TOL: f64 = 1e-8;
/// Distance to 2πZ below which an eigenphase counts as a crossing.
pub const PHASE_ZERO_TOL: f64 = 1e-8;
const MAX_HALVINGS: usize = 40;
const BISECTION_ITERS: usize = 80;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CrossingLocation {
    Start,
    Interior,
    End,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Crossing {
    pub t: f64,
    pub kernel_dim: usize,
    pub m_plus: usize,
    pub m_minus: usize,
    pub location: CrossingLocation,
}

impl Crossing {
    pub fn is_regular(&self) -> bool {
        self.m_plus + self.m_minus == self.kernel_dim
    }

    pub fn signature(&self) -> i64 {
        self.m_plus as i64 - self.m_minus as i64
    }

    /// Contribution to μ^CLM: m⁺ at the start, the signature inside, −m⁻ at the end.
    pub fn contribution(&self) -> i64 {
        match self.location {
            CrossingLocation::Start => self.m_plus as i64,
            CrossingLocation::Interior => self.signature(),
            CrossingLocation::End => -(self.m_minus as i64),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndexResult {
    pub clm: i64,
    pub iota1: i64,
    pub crossings: Vec<Crossing>,
    /// 0 when the unperturbed crossings were all regular.
    pub epsilon_used: f64,
}

impl IndexResult {
    fn new(n: usize, clm: i64, crossings: Vec<Crossing>, epsilon_used: f64) -> Self {
        let iota1 = clm - n as i64;
        assert_eq!(iota1 + n as i64, clm, "iota1 = clm - n");
        Self { clm, iota1, crossings, epsilon_used }
    }
}

fn near_zero_mod(theta: f64) -> bool {
    let r = theta.rem_euclid(TAU);
    r < PHASE_ZERO_TOL || TAU - r < PHASE_ZERO_TOL
}

/// Count of level crossings at L = 0⁺: a phase resting on 2πm counts as below it.
fn floor_count_at_zero(theta: f64) -> i64 {
    if near_zero_mod(theta) {
        (theta / TAU).round() as i64 - 1
    } else {
        (theta / TAU).floor() as i64
    }
}

fn floor_count(theta: f64, level: f64) -> i64 {
    ((theta - level) / TAU).floor() as i64
}

struct Engine<'a> {
    path: &'a SymplecticPath,
    tracker: Tracker<'a>,
    track: Track,
}

/// One phase passing a level inside a tracked step.
#[derive(Debug, Clone, Copy)]
struct Event {
    t: f64,
    direction: i64,
}

impl<'a> Engine<'a> {
    fn new(path: &'a SymplecticPath, extra: &[f64]) -> Result<Self> {
        let mut tracker = Tracker::new(path);
        let track = tracker.track(extra)?;
        Ok(Self { path, tracker, track })
    }

    fn n(&self) -> usize {
        self.path.n()
    }

    fn last(&self) -> usize {
        self.track.times.len() - 1
    }

    fn merge_tol(&self) -> f64 {
        1e-9 * (1.0 + self.path.period())
    }

    /// Frame at time `t`, found from the nearest tracked step.
    fn frame_at(&self, t: f64) -> Result<DMatrix<f64>> {
        if let Some(i) = self.track.index_of(t) {
            return Ok(self.track.frames[i].clone());
        }
        let i = self
            .track
            .times
            .partition_point(|&s| s <= t)
            .saturating_sub(1)
            .min(self.last() - 1);
        Ok(self.tracker.phases_between(&self.track, i, t)?.0)
    }

    /// Bisects the time at which phase `j` passes `level` inside step `i`.
    fn refine(&self, i: usize, j: usize, level: f64) -> Result<f64> {
        let (mut lo, mut hi) = (self.track.times[i], self.track.times[i + 1]);
        let below_lo = self.track.phases[i][j] < level;
        let tol = 1e-14 * (1.0 + self.path.period());
        for _ in 0..BISECTION_ITERS {
            if hi - lo <= tol {
                break;
            }
            let mid = 0.5 * (lo + hi);
            let (_, ph) = self.tracker.phases_between(&self.track, i, mid)?;
            if (ph[j] < level) == below_lo {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Kernel dimension and inertia of the crossing form at `t`.
    fn classify(&self, t: f64, eps: f64, tol: f64) -> Result<(usize, usize, usize)> {
        let q = self.frame_at(t)?;
        let k = kernel_coords(&q, self.n(), eps, tol);
        let f = crossing_form_matrix(&q, self.n(), &self.path.velocity(t));
        let restricted = k.transpose() * &f * &k;
        let scale = f.amax().max(1.0);
        let (p, m) = inertia(&restricted, 1e-9 * scale);
        Ok((k.ncols(), p, m))
    }

    fn cluster(&self, mut events: Vec<Event>) -> Vec<Vec<Event>> {
        events.sort_by(|a, b| a.t.partial_cmp(&b.t).unwrap());
        let mut out: Vec<Vec<Event>> = Vec::new();
        for e in events {
            match out.last_mut() {
                Some(c) if e.t - c.last().unwrap().t <= self.merge_tol() => c.push(e),
                _ => out.push(vec![e]),
            }
        }
        out
    }

    /// Crossings of the unperturbed path, plus whether some phase rests on
    /// 2πZ over a whole stretch of grid points (a continuous crossing).
    fn raw_scan(&self, tol: f64) -> Result<(Vec<Crossing>, bool)> {
        let last = self.last();
        let m = 2 * self.n();
        let near: Vec<Vec<bool>> = self
            .track
            .phases
            .iter()
            .map(|ph| ph.iter().map(|&x| near_zero_mod(x)).collect())
            .collect();

        let mut persistent = false;
        for j in 0..m {
            let mut run = 0;
            for row in near.iter() {
                run = if row[j] { run + 1 } else { 0 };
                if run >= 3 {
                    persistent = true;
                }
            }
        }

        let mut events = Vec::new();
        for i in 0..last {
            for j in 0..m {
                let (a, b) = (self.track.phases[i][j], self.track.phases[i + 1][j]);
                if !near[i][j] && !near[i + 1][j] {
                    let (fa, fb) = ((a / TAU).floor(), (b / TAU).floor());
                    if fa != fb {
                        let level = TAU * fa.max(fb);
                        let t = self.refine(i, j, level)?;
                        events.push(Event { t, direction: if b > a { 1 } else { -1 } });
                    }
                } else if near[i + 1][j] && i + 1 < last && !near[i][j] && !near[i + 2][j] {
                    events.push(Event { t: self.track.times[i + 1], direction: 0 });
                }
            }
        }

        let mut crossings = Vec::new();
        let (k, p, mm) = self.classify(0.0, 0.0, tol)?;
        crossings.push(Crossing { t: 0.0, kernel_dim: k, m_plus: p, m_minus: mm, location: CrossingLocation::Start });
        for c in self.cluster(events) {
            let t = c.iter().map(|e| e.t).sum::<f64>() / c.len() as f64;
            let (k, p, mm) = self.classify(t, 0.0, tol)?;
            crossings.push(Crossing { t, kernel_dim: k.max(1), m_plus: p, m_minus: mm, location: CrossingLocation::Interior });
        }
        if near[last].iter().any(|&b| b) {
            let t = self.path.period();
            let (k, p, mm) = self.classify(t, 0.0, tol)?;
            crossings.push(Crossing { t, kernel_dim: k.max(1), m_plus: p, m_minus: mm, location: CrossingLocation::End });
        }
        Ok((crossings, persistent))
    }

    /// μ^CLM at L = 0⁺ from the phases alone.
    fn zero_level_count(&self, ia: usize, ib: usize) -> i64 {
        self.track.phases[ib]
            .iter()
            .zip(&self.track.phases[ia])
            .map(|(&b, &a)| floor_count_at_zero(b) - floor_count_at_zero(a))
            .sum()
    }

    fn perturbed_count(&self, eps: f64, ia: usize, ib: usize) -> i64 {
        let level = 2.0 * eps;
        self.track.phases[ib]
            .iter()
            .zip(&self.track.phases[ia])
            .map(|(&b, &a)| floor_count(b, level) - floor_count(a, level))
            .sum()
    }

    /// Largest ε for which no endpoint phase lies in (0, 2ε] mod 2π.
    fn epsilon_cap(&self, ia: usize, ib: usize) -> f64 {
        let mut cap = std::f64::consts::PI;
        for &i in &[ia, ib] {
            for &x in &self.track.phases[i] {
                let r = x.rem_euclid(TAU);
                if r > PHASE_ZERO_TOL && r < TAU - PHASE_ZERO_TOL {
                    cap = cap.min(r / 2.0);
                }
            }
        }
        cap
    }

    /// Crossings of e^{−εĴ} Gr γ on steps ia..ib; every one must be regular
    /// and its signature must match the net phase motion through the level.
    fn perturbed_crossings(&self, eps: f64, ia: usize, ib: usize) -> Result<Vec<Crossing>> {
        let level = 2.0 * eps;
        let m = 2 * self.n();
        let mut events = Vec::new();
        for i in ia..ib {
            for j in 0..m {
                let (a, b) = (self.track.phases[i][j], self.track.phases[i + 1][j]);
                let (fa, fb) = (floor_count(a, level), floor_count(b, level));
                if fa != fb {
                    let lvl = level + TAU * fa.max(fb) as f64;
                    let t = self.refine(i, j, lvl)?;
                    events.push(Event { t, direction: (fb - fa).signum() });
                }
            }
        }
        let tol = (eps / 4.0).clamp(1e-12, KERNEL_TOL);
        let mut crossings = Vec::new();
        for c in self.cluster(events) {
            let t = c.iter().map(|e| e.t).sum::<f64>() / c.len() as f64;
            let net: i64 = c.iter().map(|e| e.direction).sum();
            let (k, p, mm) = self.classify(t, eps, tol)?;
            let crossing = Crossing { t, kernel_dim: k, m_plus: p, m_minus: mm, location: CrossingLocation::Interior };
            if k != c.len() || !crossing.is_regular() || crossing.signature() != net {
                return Err(Error::NonRegularCrossing { t });
            }
            crossings.push(crossing);
        }
        Ok(crossings)
    }

    fn initial_epsilon(&self, cap: f64) -> f64 {
        let scale = 1.0 + self.path.generator_norm() * self.path.period();
        (1e-4 / scale).min(cap / 2.0)
    }

    /// Halves ε until two consecutive values agree and the crossings of the
    /// perturbed path are regular.
    fn stabilized(&self, ia: usize, ib: usize) -> Result<(i64, Vec<Crossing>, f64)> {
        let cap = self.epsilon_cap(ia, ib);
        let mut eps = self.initial_epsilon(cap);
        let mut prev = self.perturbed_count(eps, ia, ib);
        for _ in 0..MAX_HALVINGS {
            let half = eps / 2.0;
            let next = self.perturbed_count(half, ia, ib);
            if next == prev {
                match self.perturbed_crossings(eps, ia, ib) {
                    Ok(c) => {
                        let sum: i64 = c.iter().map(Crossing::signature).sum();
                        if sum == prev {
                            return Ok((prev, c, eps));
                        }
                    }
                    Err(Error::NonRegularCrossing { .. }) => {}
                    Err(e) => return Err(e),
                }
            }
            eps = half;
            prev = next;
        }
        Err(Error::EpsilonExhausted { last_eps: eps })
    }

    fn full_index(&self) -> Result<IndexResult> {
        let n = self.n();
        let last = self.last();
        let (raw, persistent) = self.raw_scan(KERNEL_TOL)?;
        if !persistent && raw.iter().all(Crossing::is_regular) {
            let rs: i64 = raw.iter().map(Crossing::contribution).sum();
            if rs == self.zero_level_count(0, last) {
                return Ok(IndexResult::new(n, rs, raw, 0.0));
            }
        }
        let (clm, crossings, eps) = self.stabilized(0, last)?;
        Ok(IndexResult::new(n, clm, crossings, eps))
    }
}

/// Crossings of Gr γ(t) with Δ on the unperturbed path.
///
/// Phases resting on 2πZ over a stretch (continuous crossings) do not
/// produce separate entries; they show up as extra kernel dimensions, and
/// hence non-regular forms, at the isolated crossings that are reported.
pub fn detect_crossings(path: &SymplecticPath, tol: f64) -> Result<Vec<Crossing>> {
    Ok(Engine::new(path, &[])?.raw_scan(tol)?.0)
}

/// Whether some kernel direction of γ(t) − I persists over a time interval.
pub fn has_continuous_crossing(path: &SymplecticPath) -> Result<bool> {
    Ok(Engine::new(path, &[])?.raw_scan(KERNEL_TOL)?.1)
}

/// Inertia (m⁺, m⁻) of ⟨−Jγ̇γ⁻¹u, u⟩ on ker(γ(t₀) − I).
pub fn crossing_form(path: &SymplecticPath, t0: f64) -> Result<(usize, usize)> {
    if !(0.0..=path.period()).contains(&t0) {
        return Err(Error::InvalidArgument(format!("t0 = {t0} outside [0, T]")));
    }
    let n = path.n();
    let q = Tracker::graph_frame(&path.eval(t0));
    let k = kernel_coords(&q, n, 0.0, KERNEL_TOL);
    if k.ncols() == 0 {
        return Err(Error::InvalidArgument(format!("t0 = {t0} is not a crossing")));
    }
    let f = crossing_form_matrix(&q, n, &path.velocity(t0));
    let scale = f.amax().max(1.0);
    Ok(inertia(&(k.transpose() * &f * &k), 1e-9 * scale))
}

/// μ^CLM(Δ, Gr γ) over [0, T].
pub fn clm_index(path: &SymplecticPath) -> Result<i64> {
    Ok(iota1(path)?.clm)
}

/// ι₁(γ) = μ^CLM(Δ, Gr γ) − n, with the crossings that produced it.
pub fn iota1(path: &SymplecticPath) -> Result<IndexResult> {
    Engine::new(path, &[])?.full_index()
}

/// μ^CLM(Δ, Gr γ|[t0, t1]) for a sub-interval, always via the perturbed path.
pub fn clm_index_between(path: &SymplecticPath, t0: f64, t1: f64) -> Result<i64> {
    if !(0.0 <= t0 && t0 < t1 && t1 <= path.period()) {
        return Err(Error::InvalidArgument(format!("bad interval [{t0}, {t1}]")));
    }
    let e = Engine::new(path, &[t0, t1])?;
    let ia = e.track.index_of(t0).expect("grid contains t0");
    let ib = e.track.index_of(t1).expect("grid contains t1");
    Ok(e.stabilized(ia, ib)?.0)
}

/// μ^CLM with the sub-interval split at `tc`, using one ε for both halves.
pub fn clm_index_split(path: &SymplecticPath, tc: f64) -> Result<(i64, i64, i64)> {
    if !(0.0 < tc && tc < path.period()) {
        return Err(Error::InvalidArgument(format!("split {tc} not interior")));
    }
    let e = Engine::new(path, &[tc])?;
    let (ia, ic, ib) = (0, e.track.index_of(tc).expect("grid contains tc"), e.last());
    let cap = e.epsilon_cap(ia, ib).min(e.epsilon_cap(ic, ic));
    let eps = e.initial_epsilon(cap);
    Ok((
        e.perturbed_count(eps, ia, ic),
        e.perturbed_count(eps, ic, ib),
        e.perturbed_count(eps, ia, ib),
    ))
}

/// Index of the perturbed path at a given ε, together with the admissible
/// upper bound for ε at the endpoints.
pub fn clm_with_epsilon(path: &SymplecticPath, eps: f64) -> Result<(i64, f64)> {
    let e = Engine::new(path, &[])?;
    let cap = e.epsilon_cap(0, e.last());
    if !(eps > 0.0 && eps < cap) {
        return Err(Error::InvalidArgument(format!("eps {eps:e} outside (0, {cap:e})")));
    }
    Ok((e.perturbed_count(eps, 0, e.last()), cap))
}
