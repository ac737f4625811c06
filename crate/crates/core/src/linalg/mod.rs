//! Dense complex linear algebra: matrices, Kronecker products, partial traces
//! and Hermitian spectra.

mod eigen;
mod matrix;

pub use eigen::{
    hermitian_eigenvalues, hermitian_eigenvalues_with, spectral_tolerance, trace_norm, JacobiOptions, Spectrum,
};
pub use matrix::{
    kron, kron_capped, partial_trace_second, trace_product, ComplexMatrix, PauliBasis, ToleranceConfig, DEFAULT_MAX_DIM,
};
