//! Graph Lagrangians Gr γ(t) ⊂ (R^{2n} ⊕ R^{2n}, (−ω) ⊕ ω) and their
//! eigenphases relative to the diagonal Δ.
//!
//! A Lagrangian L with orthonormal frame Q is sent to a unitary U = X + iY in
//! the complex coordinates of the compatible structure Ĵ = diag(−J, J). With
//! U₀ the image of Δ, the unitary W = (U₀*U)(U₀*U)ᵀ does not depend on the frame,
//! and L ∩ Δ ≠ 0 exactly when W has eigenvalue 1. The eigenphases of W are
//! tracked continuously; e^{−εĴ} rotates every phase by −2ε.

use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::path::{PathGenerator, SymplecticPath};
use crate::error::{Error, Result};
use crate::symplectic::standard_j;

/// Eigenphases of W at one time, unwrapped along the path.
pub(crate) type Phases = Vec<f64>;

#[derive(Debug, Clone)]
pub(crate) struct Track {
    pub times: Vec<f64>,
    pub frames: Vec<DMatrix<f64>>,
    pub phases: Vec<Phases>,
}

impl Track {
    pub fn index_of(&self, t: f64) -> Option<usize> {
        self.times.iter().position(|&s| s == t)
    }
}

pub(crate) struct Tracker<'a> {
    path: &'a SymplecticPath,
    n: usize,
    u0: DMatrix<Complex64>,
    step_exp: Option<(f64, DMatrix<f64>)>,
    limit: f64,
}

fn wrap_pi(x: f64) -> f64 {
    (x + PI).rem_euclid(TAU) - PI
}

/// Centre of the largest gap between phases, on the circle.
fn largest_gap_centre(phases: &[f64]) -> f64 {
    let mut p: Vec<f64> = phases.iter().map(|x| x.rem_euclid(TAU)).collect();
    p.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut best = (TAU - p[p.len() - 1] + p[0], p[p.len() - 1]);
    for w in p.windows(2) {
        let gap = w[1] - w[0];
        if gap > best.0 {
            best = (gap, w[0]);
        }
    }
    best.1 + best.0 / 2.0
}

impl<'a> Tracker<'a> {
    pub fn new(path: &'a SymplecticPath) -> Self {
        let n = path.n();
        let u0 = Self::unitary(n, &Self::diagonal_frame(n));
        let m = 2 * n;
        Self {
            path,
            n,
            u0,
            step_exp: None,
            limit: (PI / 8.0).min(PI / (2.0 * m as f64)),
        }
    }

    /// Orthonormal frame [I; I]/√2 of Δ.
    pub fn diagonal_frame(n: usize) -> DMatrix<f64> {
        let s = 1.0 / 2f64.sqrt();
        let mut d = DMatrix::zeros(4 * n, 2 * n);
        for i in 0..2 * n {
            d[(i, i)] = s;
            d[(2 * n + i, i)] = s;
        }
        d
    }

    /// Orthonormal frame of Gr(m) = {(x, m x)}.
    pub fn graph_frame(m: &DMatrix<f64>) -> DMatrix<f64> {
        let k = m.nrows();
        let mut z = DMatrix::zeros(2 * k, k);
        z.view_mut((0, 0), (k, k)).fill_with_identity();
        z.view_mut((k, 0), (k, k)).copy_from(m);
        z.qr().q()
    }

    /// Rows (x₁, y₁, x₂, y₂) of a frame mapped to X + iY with X = (x₁; x₂), Y = (−y₁; y₂).
    fn unitary(n: usize, q: &DMatrix<f64>) -> DMatrix<Complex64> {
        let m = 2 * n;
        DMatrix::from_fn(m, m, |r, c| {
            if r < n {
                Complex64::new(q[(r, c)], -q[(n + r, c)])
            } else {
                let r2 = r - n;
                Complex64::new(q[(2 * n + r2, c)], q[(3 * n + r2, c)])
            }
        })
    }

    /// Sorted eigenphases in the window (β − π, β + π).
    pub fn raw_phases(&self, q: &DMatrix<f64>, beta: f64) -> Result<Vec<f64>> {
        let m = 2 * self.n;
        let u = Self::unitary(self.n, q);
        let v = self.u0.adjoint() * u;
        let w = &v * v.transpose();
        let rot = Complex64::from_polar(1.0, -beta);
        let w = w * rot;
        let id = DMatrix::<Complex64>::identity(m, m);
        let inv = (&id + &w)
            .try_inverse()
            .ok_or_else(|| Error::SelfCheck("Cayley transform hit eigenvalue -1".into()))?;
        let h = (&id - &w) * inv * Complex64::new(0.0, 1.0);
        let hr = DMatrix::from_fn(m, m, |i, j| 0.5 * (h[(i, j)].re + h[(j, i)].re));
        let eig = SymmetricEigen::new(hr);
        let mut out: Vec<f64> = eig
            .eigenvalues
            .iter()
            .map(|&x| beta + 2.0 * x.atan())
            .collect();
        out.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Ok(out)
    }

    /// Phases of frame `q`, matched against the unwrapped `prev`.
    /// Returns the new unwrapped phases and the largest single move.
    pub fn matched(&self, prev: &[f64], q: &DMatrix<f64>) -> Result<(Phases, f64)> {
        let beta = largest_gap_centre(prev) - PI;
        let cur = self.raw_phases(q, beta)?;
        let wrapped: Vec<f64> = prev.iter().map(|&p| beta + wrap_pi(p - beta)).collect();
        let mut order: Vec<usize> = (0..prev.len()).collect();
        order.sort_by(|&i, &j| wrapped[i].partial_cmp(&wrapped[j]).unwrap());
        let mut next = prev.to_vec();
        let mut max_move: f64 = 0.0;
        for (k, &idx) in order.iter().enumerate() {
            let d = cur[k] - wrapped[idx];
            max_move = max_move.max(d.abs());
            next[idx] = prev[idx] + d;
        }
        Ok((next, max_move))
    }

    fn expm_step(&self, a: &DMatrix<f64>, h: f64) -> DMatrix<f64> {
        match &self.step_exp {
            Some((h0, e)) if (h - h0).abs() <= 1e-14 * h0 => e.clone(),
            _ => (a * h).exp(),
        }
    }

    /// Frame at `t1` given the frame `q` at `t0`.
    pub fn advance(&self, q: &DMatrix<f64>, t0: f64, t1: f64) -> DMatrix<f64> {
        let n = self.n;
        match self.path.generator() {
            PathGenerator::Explicit(f) => Self::graph_frame(&f(t1)),
            _ => {
                let a = self.path.autonomous_generator().expect("autonomous");
                let e = self.expm_step(a, t1 - t0);
                let mut z = q.clone();
                let lower = &e * q.rows(2 * n, 2 * n);
                z.rows_mut(2 * n, 2 * n).copy_from(&lower);
                z.qr().q()
            }
        }
    }

    /// Tracks phases over the sample grid of the path plus `extra` times,
    /// subdividing steps whose phase motion exceeds the matching limit.
    pub fn track(&mut self, extra: &[f64]) -> Result<Track> {
        let period = self.path.period();
        let mut grid = self.path.sample_times();
        for &t in extra {
            if t > 0.0 && t < period {
                grid.push(t);
            }
        }
        grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
        grid.dedup();

        if let Some(a) = self.path.autonomous_generator() {
            let h = period / (self.path.samples().len() - 1) as f64;
            self.step_exp = Some((h, (a * h).exp()));
        }

        let q0 = Self::diagonal_frame(self.n);
        let th0 = vec![0.0; 2 * self.n];
        let mut track = Track {
            times: vec![0.0],
            frames: vec![q0],
            phases: vec![th0],
        };
        let min_h = 1e-13 * (1.0 + period);
        for &target in &grid[1..] {
            loop {
                let t = *track.times.last().unwrap();
                if t >= target {
                    break;
                }
                let q = track.frames.last().unwrap().clone();
                let prev = track.phases.last().unwrap().clone();
                let mut t1 = target;
                let (qn, thn) = loop {
                    let qn = self.advance(&q, t, t1);
                    let (thn, mv) = self.matched(&prev, &qn)?;
                    if mv <= self.limit {
                        break (qn, thn);
                    }
                    let h = (t1 - t) / 2.0;
                    if h < min_h {
                        return Err(Error::DegenerateCrossing { t0: t, t1 });
                    }
                    t1 = t + h;
                };
                track.times.push(t1);
                track.frames.push(qn);
                track.phases.push(thn);
            }
        }
        Ok(track)
    }

    /// Frame and matched phases at `s` in [times[i], times[i+1]].
    pub fn phases_between(&self, track: &Track, i: usize, s: f64) -> Result<(DMatrix<f64>, Phases)> {
        let q = self.advance(&track.frames[i], track.times[i], s);
        let (ph, mv) = self.matched(&track.phases[i], &q)?;
        if mv > 2.0 * self.limit {
            return Err(Error::DegenerateCrossing { t0: track.times[i], t1: s });
        }
        Ok((q, ph))
    }
}

/// e^{−εĴ} = diag(e^{εJ}, e^{−εJ}) applied to a 4n-row frame.
pub(crate) fn rotate_frame(q: &DMatrix<f64>, n: usize, eps: f64) -> DMatrix<f64> {
    if eps == 0.0 {
        return q.clone();
    }
    let j = standard_j(n);
    let id = DMatrix::<f64>::identity(2 * n, 2 * n);
    let plus = &id * eps.cos() + &j * eps.sin();
    let minus = &id * eps.cos() - &j * eps.sin();
    let mut out = q.clone();
    out.rows_mut(0, 2 * n).copy_from(&(plus * q.rows(0, 2 * n)));
    out.rows_mut(2 * n, 2 * n).copy_from(&(minus * q.rows(2 * n, 2 * n)));
    out
}

/// Kernel directions (in frame coordinates) of e^{−εĴ}L ∩ Δ, by SVD with
/// singular-value threshold `tol`.
pub(crate) fn kernel_coords(q: &DMatrix<f64>, n: usize, eps: f64, tol: f64) -> DMatrix<f64> {
    let r = rotate_frame(q, n, eps);
    let s = 1.0 / 2f64.sqrt();
    let m = (r.rows(0, 2 * n) - r.rows(2 * n, 2 * n)) * s;
    let svd = m.svd(false, true);
    let vt = svd.v_t.expect("v_t requested");
    let idx: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] < tol)
        .collect();
    let mut k = DMatrix::zeros(2 * n, idx.len());
    for (c, &i) in idx.iter().enumerate() {
        k.set_column(c, &vt.row(i).transpose());
    }
    k
}

/// Crossing form Ω(v, Gv) on frame coordinates, G = diag(0, γ̇γ⁻¹).
pub(crate) fn crossing_form_matrix(q: &DMatrix<f64>, n: usize, velocity: &DMatrix<f64>) -> DMatrix<f64> {
    let j = standard_j(n);
    let q2 = q.rows(2 * n, 2 * n);
    let f = q2.transpose() * (-(j * velocity)) * q2;
    (&f + f.transpose()) * 0.5
}

/// (m⁺, m⁻) of a symmetric matrix, with zero threshold `tol`.
pub(crate) fn inertia(m: &DMatrix<f64>, tol: f64) -> (usize, usize) {
    if m.nrows() == 0 {
        return (0, 0);
    }
    let eig = SymmetricEigen::new(m.clone());
    let plus = eig.eigenvalues.iter().filter(|&&x| x > tol).count();
    let minus = eig.eigenvalues.iter().filter(|&&x| x < -tol).count();
    (plus, minus)
}
