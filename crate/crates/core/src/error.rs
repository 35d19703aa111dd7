use thiserror::Error;

use crate::ap::FreqIndex;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("generators are ℤ-dependent: relation n = {0} vanishes within tolerance")]
    DependentGenerators(FreqIndex),
    #[error("generator {0} is the zero vector")]
    ZeroGenerator(usize),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("polynomials are defined over different generator sets")]
    GeneratorMismatch,
    #[error("coefficients are not Hermitian at mode {0}")]
    NotHermitian(FreqIndex),
    #[error("mode {0} is not resolved by the grid (Nyquist)")]
    AliasedMode(FreqIndex),
    #[error("quadrature needs {needed} evaluations, cap is {cap}")]
    QuadratureBudgetExceeded { needed: u128, cap: u128 },
    #[error("noise mode {0} has nonzero mean value")]
    NonZeroMean(usize),
    #[error("noise model needs at least one mode")]
    EmptyModeList,
    #[error("no integer vector in the shell J/2 <= |n| <= 2J for J = {0}")]
    EmptyBand(u32),
    #[error("CFL violated: Courant sum {courant:.6} exceeds {limit}")]
    CflViolation { courant: f64, limit: f64 },
    #[error("non-finite state after step {0}")]
    NonFiniteState(usize),
    #[error("scheme {scheme} does not support flux {flux}")]
    UnsupportedScheme { scheme: String, flux: String },
    #[error("trajectory stride too coarse: {0}")]
    StrideTooCoarse(String),
    #[error("empty time window ({t_burn}, {t_end}]")]
    EmptyWindow { t_burn: f64, t_end: f64 },
    #[error("observable mismatch: {0} vs {1}")]
    ObservableMismatch(String, String),
    #[error("flux is degenerate (fitted exponent {theta:.4}); decay run refused")]
    DegenerateFluxRefused { theta: f64 },
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}
