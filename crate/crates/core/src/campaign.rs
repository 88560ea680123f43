//! Seeded comparison of the closed-form table against the numerical engine.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::closed_form::table_iota1;
use crate::maslov::{iota1, SymplecticPath};
use crate::symplectic::GeneratorMatrix;

pub const DEFAULT_GUARD: f64 = 1e-6;
pub const DEFAULT_STEPS: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sample {
    pub id: usize,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub period: f64,
}

impl Sample {
    /// Name of the separatrix the sample sits within `guard` of, if any.
    pub fn guard_hit(&self, guard: f64) -> Option<&'static str> {
        let (b, c, d) = (self.b, self.c, self.d);
        if d.abs() < guard {
            return Some("d=0");
        }
        let scale = 1.0f64.max(b * b).max((c * d).abs());
        if (c * d + b * b).abs() < guard * scale {
            return Some("cd+b^2=0");
        }
        if d < 0.0 {
            let turn = ((-self.a * d).sqrt() * self.period).rem_euclid(TAU);
            if turn < guard || TAU - turn < guard {
                return Some("k boundary");
            }
        }
        None
    }
}

/// Draws a ∈ (0.1, 5], b, c, d ∈ [−5, 5], T ∈ (0.5, 20].
pub fn draw_samples(count: usize, seed: u64) -> Vec<Sample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|id| {
            let a = 5.1 - rng.gen_range(0.1..5.0);
            let b = rng.gen_range(-5.0..=5.0);
            let c = rng.gen_range(-5.0..=5.0);
            let d = rng.gen_range(-5.0..=5.0);
            let period = 20.5 - rng.gen_range(0.5..20.0);
            Sample { id, a, b, c, d, period }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Disagreement {
    pub sample: Sample,
    pub closed_form: Option<i64>,
    pub oracle: Option<i64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CampaignReport {
    pub seed: u64,
    pub guard: f64,
    pub steps: usize,
    pub total: usize,
    pub admissible: usize,
    pub agreements: usize,
    pub disagreements: Vec<Disagreement>,
}

impl CampaignReport {
    pub fn passed(&self) -> bool {
        self.disagreements.is_empty()
    }
}

/// Closed-form and numerical ι₁ for one generator, or a description of the failure.
pub fn compare(s: &Sample, steps: usize) -> std::result::Result<(i64, i64), Disagreement> {
    let fail = |closed_form, oracle, error| Disagreement { sample: *s, closed_form, oracle, error };
    let closed_form = table_iota1(s.a, s.b, s.c, s.d, s.period)
        .map_err(|e| fail(None, None, Some(e.to_string())))?
        .0;
    let oracle = GeneratorMatrix::new(s.a, s.b, s.c, s.d)
        .and_then(|g| SymplecticPath::fundamental_solution(g, s.period, steps))
        .and_then(|p| iota1(&p))
        .map_err(|e| fail(Some(closed_form), None, Some(e.to_string())))?
        .iota1;
    if closed_form == oracle {
        Ok((closed_form, oracle))
    } else {
        Err(fail(Some(closed_form), Some(oracle), None))
    }
}

/// Runs the campaign on the current rayon pool; output order follows sample order.
pub fn run_campaign(count: usize, seed: u64, guard: f64, steps: usize) -> CampaignReport {
    let samples: Vec<Sample> = draw_samples(count, seed)
        .into_iter()
        .filter(|s| s.guard_hit(guard).is_none())
        .collect();
    let results: Vec<_> = samples.par_iter().map(|s| compare(s, steps)).collect();
    let admissible = samples.len();
    let mut disagreements = Vec::new();
    let mut agreements = 0;
    for r in results {
        match r {
            Ok(_) => agreements += 1,
            Err(d) => disagreements.push(d),
        }
    }
    CampaignReport {
        seed,
        guard,
        steps,
        total: count,
        admissible,
        agreements,
        disagreements,
    }
}
