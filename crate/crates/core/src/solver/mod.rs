//! Monotone finite-volume integrator for `v_t + div_y f̃(v) = ε Δv + Σ h_k dβ_k`
//! on periodic grids, with contraction and cell-entropy audits.

pub mod audit;
mod config;
mod kernel;
mod run;

pub use audit::{entropy_residual, EntropyAudit, ENTROPY_TOLERANCE};
pub use config::{Scheme, SolverConfig, StepParams};
pub use run::{step, CoupledRun, ObservationRecord, Solver, TimeGrid, Trajectory, DECAY_FRACTIONS};

#[cfg(test)]
mod tests;
