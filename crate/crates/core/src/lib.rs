//! Maslov-type and generalized Conley-Zehnder indices of symplectic paths,
//! with the circular-orbit index theory of power-law central forces on the
//! sphere, the hyperbolic plane and the Euclidean plane.
//!
//! The crate is split into:
//! - [`symplectic`]: J, ω, ⋄-product, exponentials, generator eigenstructure.
//! - [`maslov`]: a numerical crossing-count engine for μ^CLM and ι₁.
//! - [`closed_form`]: the case table for the model generator A(a,b,c,d).
//! - [`surface`]: circular orbits, region classification, separatrices.
//! - [`dynamics`]: Euler-Lagrange integration, monodromy, Floquet analysis.
//! - [`campaign`]: seeded comparison of the case table against the engine.

pub mod campaign;
pub mod closed_form;
pub mod dynamics;
pub mod error;
pub mod maslov;
pub mod surface;
pub mod symplectic;

pub use error::{Error, Result};
