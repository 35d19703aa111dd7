//! Almost-periodic functions with finitely generated spectrum.
//!
//! Frequencies are never stored as floats: every spectral element is an
//! integer [`FreqIndex`] against a [`GeneratorSet`], so the group generated
//! by Λ and the map onto 𝕋ᴾ are exact.

mod generators;
mod io;
mod poly;
mod torus;

pub use generators::{
    FreqIndex, GeneratorSet, DEFAULT_INDEPENDENCE_TOLERANCE, DEFAULT_SEARCH_BOUND,
};
pub use io::{read_polynomial, write_polynomial};
pub use poly::{CubeQuadrature, TrigPolynomial, PRUNE_THRESHOLD, REALNESS_TOLERANCE};
pub use torus::TorusField;
pub(crate) use torus::strides;
