//! Numerical laboratory for stochastic scalar conservation laws
//!
//! ```text
//! du + div f(u) dt = Σ_k g_k(x) dβ_k(t),   x ∈ ℝᴺ
//! ```
//!
//! with almost-periodic data whose spectrum lies in the group generated by a
//! finite, ℤ-independent set of frequencies Λ = {λ₁,…,λ_P}. Such problems are
//! solved exactly as periodic problems on 𝕋ᴾ along the map
//! `y(x) = (λ₁·x, …, λ_P·x)`; this crate provides
//!
//! * [`ap`]: exact trigonometric-polynomial algebra over Λ, mean values,
//!   Besicovitch seminorms and the lift onto torus grids;
//! * [`noise`]: zero-mean additive forcing with analytic bound certificates
//!   and counter-based Brownian paths;
//! * [`flux`]: flux models, lifted torus fluxes and the non-degeneracy scanner;
//! * [`solver`]: the monotone stochastic finite-volume integrator together
//!   with contraction and cell-entropy audits;
//! * [`longtime`]: time averages, Wasserstein comparisons, decay of solution
//!   differences and Sobolev growth.

pub mod ap;
pub mod error;
pub mod flux;
pub mod longtime;
pub mod noise;
pub mod solver;
pub mod spectral;

pub use error::{Error, Result};
pub use num_complex;
