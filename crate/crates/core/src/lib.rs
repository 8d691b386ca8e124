//! Symbol-level invariants of first-order linear PDE operators acting on vector measures, and
//! grid experiments probing the dimension of measures that satisfy such constraints.
//!
//! * [`exterior`]: exact multivector algebra, annihilators and simplicity.
//! * [`operator`]: operators `P(D) = Σ Pᵢ∂ᵢ + P₀`, symbol matrices, wave cones and the
//!   minimal-rank invariant ℓ with exact certificates.
//! * [`measure`]: grid measures, sharp plane measures, weak residuals, blow-ups,
//!   invariance, densities and box-counting.

pub mod error;
pub mod exterior;
pub mod linalg;
pub mod measure;
pub mod operator;
pub mod par;
pub mod rational;

pub use error::{Error, Result};
