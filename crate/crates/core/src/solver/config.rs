use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::noise::NoiseModel;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scheme {
    EngquistOsher,
    Rusanov,
    GodunovBurgers,
    /// Anti-diffusive flux with the Engquist–Osher parts swapped. Not
    /// monotone; kept as a negative control for the entropy audit.
    Downwind,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::EngquistOsher => "engquist-osher",
            Scheme::Rusanov => "rusanov",
            Scheme::GodunovBurgers => "godunov-burgers",
            Scheme::Downwind => "downwind",
        }
    }

    pub fn is_monotone(self) -> bool {
        !matches!(self, Scheme::Downwind)
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "engquist-osher" | "eo" => Ok(Scheme::EngquistOsher),
            "rusanov" => Ok(Scheme::Rusanov),
            "godunov-burgers" | "godunov" => Ok(Scheme::GodunovBurgers),
            "downwind" => Ok(Scheme::Downwind),
            other => Err(Error::InvalidInput(format!("unknown scheme {other:?}"))),
        }
    }
}

/// Parameters of a single step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepParams {
    pub scheme: Scheme,
    pub epsilon: f64,
}

#[derive(Clone, Debug)]
pub struct SolverConfig {
    pub shape: Vec<usize>,
    pub cfl: f64,
    pub t_end: f64,
    /// Viscosity ε of the parabolic approximation; 0 for the hyperbolic problem.
    pub epsilon: f64,
    pub scheme: Scheme,
    pub noise: Option<NoiseModel>,
    pub seed: u64,
    /// Keep every `snapshot_stride`-th state (0 keeps only the initial and final states).
    pub snapshot_stride: usize,
    /// Record observables every `observe_stride` steps.
    pub observe_stride: usize,
    /// Sobolev index of the Hˢ observable.
    pub sobolev_s: f64,
    /// Levels α of the inline Kruzhkov entropy audit (empty disables it).
    pub entropy_alphas: Vec<f64>,
    /// Overrides the a-priori half-width L of the ξ-window used for Δt.
    pub window: Option<f64>,
    /// Overrides the CFL time step (must not exceed it).
    pub dt: Option<f64>,
}

impl SolverConfig {
    pub fn new(shape: Vec<usize>, t_end: f64) -> Self {
        SolverConfig {
            shape,
            cfl: 0.4,
            t_end,
            epsilon: 0.0,
            scheme: Scheme::EngquistOsher,
            noise: None,
            seed: 0,
            snapshot_stride: 1,
            observe_stride: 1,
            sobolev_s: 0.3,
            entropy_alphas: Vec::new(),
            window: None,
            dt: None,
        }
    }

    pub fn with_noise(mut self, noise: NoiseModel) -> Self {
        self.noise = Some(noise);
        self
    }

    pub fn step_params(&self) -> StepParams {
        StepParams {
            scheme: self.scheme,
            epsilon: self.epsilon,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.shape.is_empty() || self.shape.contains(&0) {
            return Err(Error::InvalidInput(format!("bad grid {:?}", self.shape)));
        }
        if !(self.cfl > 0.0 && self.cfl < 1.0) {
            return Err(Error::InvalidInput(format!("cfl {} not in (0,1)", self.cfl)));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(Error::InvalidInput(format!("t_end {}", self.t_end)));
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return Err(Error::InvalidInput(format!("epsilon {}", self.epsilon)));
        }
        if self.observe_stride == 0 {
            return Err(Error::InvalidInput("observe_stride must be >= 1".into()));
        }
        if let Some(n) = &self.noise {
            if n.gens().rank() != self.shape.len() {
                return Err(Error::InvalidInput("noise rank differs from grid rank".into()));
            }
        }
        Ok(())
    }
}
