//! Flux models, their lifting to torus directions, and the non-degeneracy scanner.

mod lifted;
mod model;
pub mod scan;

pub use lifted::{lift_flux, LiftedFlux, ScalarFlux};
pub use model::{FluxFamily, FluxModel};
pub use scan::{nondegeneracy_scan, ScanConfig, ScanReport, ScanRow};
