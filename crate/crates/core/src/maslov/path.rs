use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::symplectic::{inf_norm, matrix_exponential, standard_j, symplectic_defect, GeneratorMatrix};

/// Closure form of an explicitly given path t ↦ γ(t).
///
/// Central differences evaluate it slightly outside [0, T], so it should be
/// defined on a neighbourhood of the interval.
pub type PathFn = Arc<dyn Fn(f64) -> DMatrix<f64> + Send + Sync>;

/// Tolerance for the per-sample symplecticity check, scaled by max(1, ‖γ‖²).
pub const SAMPLE_TOL: f64 = 1e-8;

const MIN_STEPS: usize = 64;

#[derive(Clone)]
pub enum PathGenerator {
    Model(GeneratorMatrix),
    Autonomous(DMatrix<f64>),
    Explicit(PathFn),
}

impl fmt::Debug for PathGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Model(g) => f.debug_tuple("Model").field(g).finish(),
            Self::Autonomous(a) => f.debug_tuple("Autonomous").field(a).finish(),
            Self::Explicit(_) => f.write_str("Explicit(..)"),
        }
    }
}

impl From<GeneratorMatrix> for PathGenerator {
    fn from(g: GeneratorMatrix) -> Self {
        Self::Model(g)
    }
}

impl From<DMatrix<f64>> for PathGenerator {
    fn from(a: DMatrix<f64>) -> Self {
        Self::Autonomous(a)
    }
}

/// A sampled symplectic path γ: [0, T] → Sp(2n) with γ(0) = I.
///
/// The generator is kept alongside the samples so the engine can evaluate
/// the path at arbitrary times near crossings.
#[derive(Debug, Clone)]
pub struct SymplecticPath {
    n: usize,
    period: f64,
    generator: PathGenerator,
    samples: Vec<(f64, DMatrix<f64>)>,
}

fn uniform_grid(period: f64, steps: usize) -> Vec<f64> {
    (0..=steps)
        .map(|i| if i == steps { period } else { period * i as f64 / steps as f64 })
        .collect()
}

fn check_sample(t: f64, m: &DMatrix<f64>) -> Result<()> {
    if m.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument(format!("non-finite sample at t = {t}")));
    }
    let scale = inf_norm(m).powi(2).max(1.0);
    let defect = symplectic_defect(m)?;
    if defect > SAMPLE_TOL * scale {
        return Err(Error::InvalidArgument(format!(
            "sample at t = {t} is not symplectic (defect {defect:e})"
        )));
    }
    Ok(())
}

impl SymplecticPath {
    /// Samples γ(t) = e^{At} on a uniform grid of `steps` intervals.
    pub fn fundamental_solution(
        generator: impl Into<PathGenerator>,
        period: f64,
        steps: usize,
    ) -> Result<Self> {
        let generator = generator.into();
        let a = match &generator {
            PathGenerator::Model(g) => g.matrix().clone(),
            PathGenerator::Autonomous(a) => a.clone(),
            PathGenerator::Explicit(_) => {
                return Err(Error::InvalidArgument(
                    "fundamental_solution needs an autonomous generator".into(),
                ))
            }
        };
        if a.nrows() != a.ncols() || a.nrows() % 2 != 0 || a.nrows() == 0 {
            return Err(Error::InvalidArgument("generator must be 2n x 2n".into()));
        }
        if a.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("non-finite generator".into()));
        }
        Self::check_grid(period, steps)?;
        let n = a.nrows() / 2;
        let mut samples = Vec::with_capacity(steps + 1);
        for t in uniform_grid(period, steps) {
            let m = if t == 0.0 {
                DMatrix::identity(2 * n, 2 * n)
            } else {
                matrix_exponential(&a, t)?
            };
            check_sample(t, &m)?;
            samples.push((t, m));
        }
        Ok(Self { n, period, generator, samples })
    }

    /// Wraps an explicit path. `f(0)` must equal the identity to 1e-10.
    pub fn from_fn(n: usize, period: f64, steps: usize, f: PathFn) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("n must be positive".into()));
        }
        Self::check_grid(period, steps)?;
        let id = DMatrix::<f64>::identity(2 * n, 2 * n);
        let g0 = f(0.0);
        if g0.shape() != (2 * n, 2 * n) || (&g0 - &id).amax() > 1e-10 {
            return Err(Error::InvalidArgument("explicit path must start at the identity".into()));
        }
        let mut samples = Vec::with_capacity(steps + 1);
        for t in uniform_grid(period, steps) {
            let m = if t == 0.0 { id.clone() } else { f(t) };
            if m.shape() != (2 * n, 2 * n) {
                return Err(Error::InvalidArgument(format!("sample at t = {t} has wrong shape")));
            }
            check_sample(t, &m)?;
            samples.push((t, m));
        }
        Ok(Self { n, period, generator: PathGenerator::Explicit(f), samples })
    }

    fn check_grid(period: f64, steps: usize) -> Result<()> {
        if !(period.is_finite() && period > 0.0) {
            return Err(Error::InvalidArgument(format!("period must be positive, got {period}")));
        }
        if steps < MIN_STEPS {
            return Err(Error::InvalidArgument(format!("steps must be at least {MIN_STEPS}")));
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn generator(&self) -> &PathGenerator {
        &self.generator
    }

    pub fn samples(&self) -> &[(f64, DMatrix<f64>)] {
        &self.samples
    }

    pub fn sample_times(&self) -> Vec<f64> {
        self.samples.iter().map(|(t, _)| *t).collect()
    }

    /// The constant generator, if the path is autonomous.
    pub fn autonomous_generator(&self) -> Option<&DMatrix<f64>> {
        match &self.generator {
            PathGenerator::Model(g) => Some(g.matrix()),
            PathGenerator::Autonomous(a) => Some(a),
            PathGenerator::Explicit(_) => None,
        }
    }

    /// γ(t), evaluated from the generator.
    pub fn eval(&self, t: f64) -> DMatrix<f64> {
        match &self.generator {
            PathGenerator::Explicit(f) => f(t),
            _ => {
                let a = self.autonomous_generator().expect("autonomous");
                (a * t).exp()
            }
        }
    }

    /// γ̇(t)γ(t)⁻¹: the generator itself, or a fourth-order central difference.
    pub fn velocity(&self, t: f64) -> DMatrix<f64> {
        match &self.generator {
            PathGenerator::Explicit(f) => {
                let h = 1e-3 * self.period.max(1.0);
                let dg = (f(t - 2.0 * h) - f(t + 2.0 * h) + (f(t + h) - f(t - h)) * 8.0) / (12.0 * h);
                let j = standard_j(self.n);
                // γ⁻¹ = −Jγᵀ J for symplectic γ.
                let inv = -(&j * f(t).transpose() * &j);
                dg * inv
            }
            _ => self.autonomous_generator().expect("autonomous").clone(),
        }
    }

    /// Size of the generator, used to scale the perturbation parameter.
    pub fn generator_norm(&self) -> f64 {
        match self.autonomous_generator() {
            Some(a) => inf_norm(a),
            None => {
                let k = 16;
                (0..=k)
                    .map(|i| inf_norm(&self.velocity(self.period * i as f64 / k as f64)))
                    .fold(0.0, f64::max)
            }
        }
    }

    /// Whether every sample has zero upper-right n×n block to `tol`.
    pub fn is_lower_block_triangular(&self, tol: f64) -> bool {
        let n = self.n;
        self.samples
            .iter()
            .all(|(_, m)| m.view((0, n), (n, n)).amax() <= tol)
    }
}
