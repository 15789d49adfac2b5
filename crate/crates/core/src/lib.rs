//! Spectral analysis of functions on the Hamming cube `{-1,1}^n`.
//!
//! Walsh transforms, the heat semigroup and other level multipliers, a radial
//! fast path for very large `n`, and harnesses that check dimension-free
//! inequalities between these objects numerically.

#![forbid(unsafe_code)]

pub mod analysis;
pub mod classical;
pub mod cube;
pub mod error;
pub mod extremal;
pub mod exponent;
pub mod io;
pub mod numeric;
pub mod operators;
pub mod radial;
pub mod verify;

pub use num_complex::Complex64;

pub use analysis::{entropy, influence, lp_norm, RatioSample};
pub use classical::{BoundId, BoundParams, LensDomain, LensSide};
pub use cube::{
    character, fwht, ifwht, partial_derivative, project, random_function, CubeFunction,
    SpectralBand, Spectrum, TargetSpace,
};
pub use error::{Error, Result};
pub use exponent::Exponent;
pub use operators::{
    dual_gradient_functional, gradient_norm, heat, heat_complex, heat_probabilistic,
    inverse_heat, laplacian, ApplyMultiplier, LevelMultiplier,
};
pub use radial::{LevelSpectrum, RadialFunction};
pub use verify::{run_check, CheckReport, CheckSpec, TheoremId};
