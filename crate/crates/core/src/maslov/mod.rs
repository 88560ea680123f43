//! Numerical μ^CLM and ι₁ for symplectic paths.
//!
//! The engine follows the eigenphases of the graph Lagrangian Gr γ(t)
//! relative to the diagonal and evaluates crossing forms where a phase
//! reaches the crossing level. Paths with only regular crossings are
//! counted directly; otherwise the graph is rotated by e^{−εĴ} and ε is
//! halved until the count settles.

mod index;
mod lagrangian;
mod path;
mod zhu;

pub use index::{
    clm_index, clm_index_between, clm_index_split, clm_with_epsilon, crossing_form,
    detect_crossings, has_continuous_crossing, iota1, Crossing, CrossingLocation, IndexResult,
    KERNEL_TOL, PHASE_ZERO_TOL,
};
pub use path::{PathFn, PathGenerator, SymplecticPath, SAMPLE_TOL};
pub use zhu::zhu_index;
