//! Trace distance between quantum states, random state generation and
//! statistics of trace-distance non-monotonicity under tensor products
//! (NMuTP): quartets `(ρ, ζ, ξ, η)` with `d(ρ,ζ) > d(ξ,η)` but
//! `d(ρ⊗ρ, ζ⊗ζ) < d(ξ⊗ξ, η⊗η)` or the reverse.
//!
//! The matrix, state and distance code is generic over the [`Real`] scalar
//! (`f32` or `f64`); the `*64` aliases below are what the Monte Carlo
//! experiments use.

pub mod distance;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod nmutp;
pub mod sampling;
pub mod scalar;
pub mod states;

pub use error::{Error, Result};
pub use scalar::Real;

pub type ComplexMatrix64 = linalg::ComplexMatrix<f64>;
pub type ComplexMatrix32 = linalg::ComplexMatrix<f32>;
pub type DensityMatrix64 = states::DensityMatrix<f64>;
pub type DensityMatrix32 = states::DensityMatrix<f32>;
pub type UnitaryMatrix64 = states::UnitaryMatrix<f64>;
